fn main() {
    std::process::exit(cgrminer::cli::run(std::env::args_os()));
}
