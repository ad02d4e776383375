//! Line-oriented history scripts.
//!
//! ```text
//! # comment
//! commit c1
//! file src/A.java
//! <<<
//! package p; class A {}
//! >>>
//! commit c2
//! parent c1
//! delete src/A.java
//! ```
//!
//! A block without `parent` lines continues from the previous block; the
//! first block is a root. File content is the lines between the fences
//! joined with `\n`, so a content line consisting of exactly `>>>` cannot be
//! expressed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileOp {
    Write { path: String, content: String },
    Delete { path: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptCommit {
    pub id: String,
    /// Explicit parents; empty means "previous block" (or none for the first).
    pub parents: Vec<String>,
    pub ops: Vec<FileOp>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistoryScript {
    pub commits: Vec<ScriptCommit>,
}

impl HistoryScript {
    pub fn parse(text: &str) -> Result<Self, ScriptParseError> {
        let lines: Vec<&str> = text.split('\n').collect();
        let mut commits: Vec<ScriptCommit> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut i = 0usize;

        let err = |line: usize, message: String| ScriptParseError { line, message };

        while i < lines.len() {
            let number = i + 1;
            let line = lines[i].trim_end_matches('\r');
            i += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || line.starts_with('#') {
                continue;
            }
            let (directive, arg) = match trimmed.split_once(char::is_whitespace) {
                Some((d, rest)) => (d, rest.trim()),
                None => (trimmed, ""),
            };
            if directive != "commit" && commits.is_empty() {
                return Err(err(number, format!("'{directive}' before any commit")));
            }
            if arg.is_empty() {
                return Err(err(number, format!("'{directive}' needs an argument")));
            }
            match directive {
                "commit" => {
                    if arg.contains(char::is_whitespace) {
                        return Err(err(number, format!("invalid commit id '{arg}'")));
                    }
                    if !seen.insert(arg.to_string()) {
                        return Err(err(number, format!("duplicate commit id '{arg}'")));
                    }
                    commits.push(ScriptCommit {
                        id: arg.to_string(),
                        parents: Vec::new(),
                        ops: Vec::new(),
                    });
                }
                "parent" => {
                    let current = commits.last_mut().expect("checked above");
                    if !seen.contains(arg) || arg == current.id {
                        return Err(err(
                            number,
                            format!("parent '{arg}' does not name an earlier commit"),
                        ));
                    }
                    if !current.ops.is_empty() {
                        return Err(err(number, "parent lines must precede file operations".into()));
                    }
                    if current.parents.iter().any(|p| p == arg) {
                        return Err(err(number, format!("parent '{arg}' listed twice")));
                    }
                    current.parents.push(arg.to_string());
                }
                "delete" => {
                    commits.last_mut().expect("checked above").ops.push(FileOp::Delete {
                        path: arg.to_string(),
                    });
                }
                "file" => {
                    if lines.get(i).map(|l| l.trim_end_matches('\r')) != Some("<<<") {
                        return Err(err(i + 1, "expected '<<<' after file".into()));
                    }
                    i += 1;
                    let start = i;
                    while i < lines.len() && lines[i].trim_end_matches('\r') != ">>>" {
                        i += 1;
                    }
                    if i == lines.len() {
                        return Err(err(start, format!("unterminated content block for '{arg}'")));
                    }
                    let content = lines[start..i].join("\n");
                    i += 1;
                    commits.last_mut().expect("checked above").ops.push(FileOp::Write {
                        path: arg.to_string(),
                        content,
                    });
                }
                other => return Err(err(number, format!("unknown directive '{other}'"))),
            }
        }
        Ok(Self { commits })
    }

    /// Renders the script back to text; `parse(render(s)) == s`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for commit in &self.commits {
            let _ = writeln!(out, "commit {}", commit.id);
            for parent in &commit.parents {
                let _ = writeln!(out, "parent {parent}");
            }
            for op in &commit.ops {
                match op {
                    FileOp::Write { path, content } => {
                        let _ = writeln!(out, "file {path}");
                        out.push_str("<<<\n");
                        if !content.is_empty() {
                            out.push_str(content);
                            out.push('\n');
                        }
                        out.push_str(">>>\n");
                    }
                    FileOp::Delete { path } => {
                        let _ = writeln!(out, "delete {path}");
                    }
                }
            }
        }
        out
    }

    /// Parents of each block after applying the "previous block" default.
    pub fn resolved_parents(&self) -> Vec<Vec<String>> {
        self.commits
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if !c.parents.is_empty() {
                    c.parents.clone()
                } else if i == 0 {
                    Vec::new()
                } else {
                    vec![self.commits[i - 1].id.clone()]
                }
            })
            .collect()
    }

    /// Full file tree of every commit, replaying operations along first
    /// parents.
    pub fn replay(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let parents = self.resolved_parents();
        let mut trees: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (commit, parents) in self.commits.iter().zip(parents) {
            let mut tree = parents
                .first()
                .and_then(|p| trees.get(p))
                .cloned()
                .unwrap_or_default();
            for op in &commit.ops {
                match op {
                    FileOp::Write { path, content } => {
                        tree.insert(path.clone(), content.clone());
                    }
                    FileOp::Delete { path } => {
                        tree.remove(path);
                    }
                }
            }
            trees.insert(commit.id.clone(), tree);
        }
        trees
    }
}
