//! Git access through the `git` executable.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use super::RepoError;
use crate::history::{Commit, CommitId};

#[derive(Debug, Clone)]
pub(crate) struct GitBackend {
    dir: PathBuf,
}

fn git_error(args: &[&str], detail: impl Into<String>) -> RepoError {
    RepoError::Git {
        command: format!("git {}", args.join(" ")),
        detail: detail.into(),
    }
}

impl GitBackend {
    pub fn open(dir: &Path) -> Result<Self, RepoError> {
        let backend = Self {
            dir: dir.to_path_buf(),
        };
        let inside = Command::new("git")
            .arg("-C")
            .arg(dir)
            .args(["rev-parse", "--git-dir"])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status()
            .map_err(|e| git_error(&["rev-parse"], e.to_string()))?;
        if !inside.success() {
            return Err(RepoError::NotARepository(dir.to_path_buf()));
        }
        Ok(backend)
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>, RepoError> {
        let output = Command::new("git")
            .arg("-C")
            .arg(&self.dir)
            .args(args)
            .output()
            .map_err(|e| git_error(args, e.to_string()))?;
        if !output.status.success() {
            return Err(git_error(args, String::from_utf8_lossy(&output.stderr).trim()));
        }
        Ok(output.stdout)
    }

    /// Every commit reachable from any ref, with all of its parents.
    pub fn commits(&self) -> Result<Vec<Commit>, RepoError> {
        // An unborn HEAD has no refs and nothing to list.
        if self.run(&["rev-parse", "--verify", "-q", "HEAD"]).is_err()
            && self.run(&["for-each-ref", "--count=1"])?.is_empty()
        {
            return Ok(Vec::new());
        }
        let out = self.run(&["log", "--all", "--format=%H%x1f%P%x1f%s%x1e"])?;
        let text = String::from_utf8_lossy(&out);
        let mut commits = Vec::new();
        for record in text.split('\x1e') {
            let record = record.trim_start_matches('\n');
            if record.is_empty() {
                continue;
            }
            let mut fields = record.splitn(3, '\x1f');
            let hash = fields.next().unwrap_or_default();
            let parents = fields.next().unwrap_or_default();
            let message = fields.next().unwrap_or_default();
            let id = CommitId::new(hash).map_err(|e| git_error(&["log"], e.to_string()))?;
            let parents = parents
                .split_whitespace()
                .map(|p| CommitId::new(p).expect("split_whitespace yields non-empty"))
                .collect();
            let mut commit = Commit::new(id, parents);
            commit.message = message.to_string();
            commits.push(commit);
        }
        Ok(commits)
    }

    /// Resolves a revision to a full commit hash.
    pub fn resolve(&self, revision: &str) -> Option<String> {
        let spec = format!("{revision}^{{commit}}");
        let out = self.run(&["rev-parse", "--verify", "-q", &spec]).ok()?;
        Some(String::from_utf8_lossy(&out).trim().to_string())
    }

    /// Text of every blob at `commit` whose path ends with `extension`.
    /// Non-UTF-8 blobs are treated as binary and skipped.
    pub fn files(&self, commit: &CommitId, extension: &str) -> Result<BTreeMap<String, String>, RepoError> {
        let listing = self.run(&["ls-tree", "-r", "-z", "--full-tree", commit.as_str()])?;
        let mut wanted: Vec<(String, String)> = Vec::new();
        for entry in listing.split(|&b| b == 0) {
            let entry = String::from_utf8_lossy(entry);
            let Some((meta, path)) = entry.split_once('\t') else {
                continue;
            };
            let mut meta = meta.split_whitespace();
            let (_mode, kind, hash) = (meta.next(), meta.next(), meta.next());
            if kind == Some("blob") && path.ends_with(extension) {
                if let Some(hash) = hash {
                    wanted.push((path.to_string(), hash.to_string()));
                }
            }
        }
        if wanted.is_empty() {
            return Ok(BTreeMap::new());
        }

        let args = ["cat-file", "--batch"];
        let mut child = Command::new("git")
            .arg("-C")
            .arg(&self.dir)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| git_error(&args, e.to_string()))?;
        let mut request = String::new();
        for (_, hash) in &wanted {
            request.push_str(hash);
            request.push('\n');
        }
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(request.as_bytes()));
        let output = child
            .wait_with_output()
            .map_err(|e| git_error(&args, e.to_string()))?;
        writer
            .join()
            .expect("writer thread")
            .map_err(|e| git_error(&args, e.to_string()))?;
        if !output.status.success() {
            return Err(git_error(&args, String::from_utf8_lossy(&output.stderr).trim()));
        }

        let data = output.stdout;
        let mut files = BTreeMap::new();
        let mut pos = 0usize;
        for (path, _) in wanted {
            let header_end = data[pos..]
                .iter()
                .position(|&b| b == b'\n')
                .map(|n| pos + n)
                .ok_or_else(|| git_error(&args, "truncated output"))?;
            let header = String::from_utf8_lossy(&data[pos..header_end]).to_string();
            let size: usize = header
                .rsplit(' ')
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| git_error(&args, format!("bad header '{header}'")))?;
            let start = header_end + 1;
            let end = start + size;
            if end > data.len() {
                return Err(git_error(&args, "truncated blob"));
            }
            if let Ok(text) = std::str::from_utf8(&data[start..end]) {
                files.insert(path, text.to_string());
            }
            pos = end + 1;
        }
        Ok(files)
    }
}
