//! Command-line front end. Exit status: 0 success, 2 bad configuration,
//! 3 repository or commit lookup failure, 1 anything else.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{detect_pair, run_analysis_with_progress, AnalysisConfig, AnalysisError};
use crate::detect::Threshold;
use crate::model::DEFAULT_EXTENSION;
use crate::repo::{open_repository, RepoError, RepositorySource};
use crate::report::{self, OutputFormat, ReportError};
use crate::squash::SnapshotPair;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REPOSITORY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cgrminer", version, about = "Find refactorings that only appear when adjacent commits are squashed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Squash every straight commit sequence at each level and report CGRs.
    Analyze(AnalyzeArgs),
    /// List refactorings between two commits.
    Detect(DetectArgs),
    /// Render a box plot from a structured report.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Git working copy or bare repository.
    #[arg(long, value_name = "DIR")]
    repo: Option<PathBuf>,
    /// History script file.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> RepositorySource {
        match (&self.repo, &self.script) {
            (Some(dir), _) => RepositorySource::vcs(dir),
            (None, Some(file)) => RepositorySource::script(file),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Structured,
    Tabular,
    Both,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Structured => OutputFormat::Structured,
            FormatArg::Tabular => OutputFormat::Tabular,
            FormatArg::Both => OutputFormat::Both,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Granularity levels, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_level, default_value = "2,3,4")]
    levels: Vec<usize>,
    /// Similarity threshold for entity matching, in (0, 1].
    #[arg(long, value_parser = parse_threshold, default_value = "0.5")]
    threshold: Threshold,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "cgrminer-report")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
    /// Worker threads: a positive number or `auto`.
    #[arg(long, env = "CGRMINER_JOBS", value_parser = parse_jobs, default_value = "auto")]
    jobs: Jobs,
    /// Source file extension.
    #[arg(long, default_value = DEFAULT_EXTENSION)]
    ext: String,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(value_name = "BEFORE")]
    before: String,
    #[arg(value_name = "AFTER")]
    after: String,
    #[arg(long, value_parser = parse_threshold, default_value = "0.5")]
    threshold: Threshold,
    #[arg(long, default_value = DEFAULT_EXTENSION)]
    ext: String,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Structured report (report.json).
    #[arg(value_name = "REPORT")]
    report: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct Jobs(Option<usize>);

fn parse_level(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("levels must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("'{s}' is not a level")),
    }
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    let value: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    Threshold::new(value).map_err(|e| e.to_string())
}

fn parse_jobs(s: &str) -> Result<Jobs, String> {
    match s.trim() {
        "auto" => Ok(Jobs(None)),
        n => match n.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("'{s}' is not a positive worker count or 'auto'")),
            Ok(n) => Ok(Jobs(Some(n))),
        },
    }
}

enum Failure {
    Repository(String),
    Other(String),
}

impl From<RepoError> for Failure {
    fn from(e: RepoError) -> Self {
        Failure::Repository(e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Repo { .. } => Failure::Repository(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure::Other(e.to_string())
    }
}

fn progress(message: &str) {
    eprintln!("cgrminer: {message}");
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let levels: BTreeSet<usize> = args.levels.iter().copied().collect();
    let repo = open_repository(&args.source.source(), &args.ext)?;
    let config = AnalysisConfig {
        levels,
        threshold: args.threshold,
        extension: args.ext,
        jobs: args.jobs.0,
    };
    let report = run_analysis_with_progress(&repo, &config, &mut |m| progress(m))?;
    for path in report::emit_report(&report, args.format.into(), &args.out)? {
        progress(&format!("wrote {}", path.display()));
    }
    let plot = args.out.join(report::PLOT_FILE);
    match report::write_plot(&report, &plot) {
        Ok(()) => progress(&format!("wrote {}", plot.display())),
        Err(ReportError::Schema(why)) => progress(&format!("no plot: {why}")),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn detect(args: DetectArgs) -> Result<(), Failure> {
    let repo = open_repository(&args.source.source(), &args.ext)?;
    let pair = SnapshotPair {
        before: Some(repo.resolve(&args.before)?),
        after: repo.resolve(&args.after)?,
    };
    for instance in detect_pair(&repo, &pair, args.threshold)? {
        println!("{}", instance.to_listing_line());
    }
    Ok(())
}

fn plot(args: PlotArgs) -> Result<(), Failure> {
    let report = report::read_report(&args.report)?;
    report::write_plot(&report, &args.out)?;
    progress(&format!("wrote {}", args.out.display()));
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Detect(d) => detect(d),
        Command::Plot(p) => plot(p),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Repository(message)) => {
            eprintln!("cgrminer: error: {message}");
            EXIT_REPOSITORY
        }
        Err(Failure::Other(message)) => {
            eprintln!("cgrminer: error: {message}");
            EXIT_FAILURE
        }
    }
}
