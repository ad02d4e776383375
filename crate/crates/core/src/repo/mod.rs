//! Loading commit graphs and snapshots from a git working copy or a history
//! script.

mod git;
pub mod script;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::history::{build_graph, Commit, CommitGraph, CommitId, GraphError};
use crate::model::{build_snapshot, Snapshot};
use git::GitBackend;
pub use script::{FileOp, HistoryScript, ScriptCommit, ScriptParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    VcsDirectory,
    HistoryScript,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepositorySource {
    pub kind: SourceKind,
    pub location: PathBuf,
}

impl RepositorySource {
    pub fn vcs(location: impl Into<PathBuf>) -> Self {
        Self {
            kind: SourceKind::VcsDirectory,
            location: location.into(),
        }
    }

    pub fn script(location: impl Into<PathBuf>) -> Self {
        Self {
            kind: SourceKind::HistoryScript,
            location: location.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("{0} does not exist")]
    NotFound(PathBuf),
    #[error("{0} is not a git repository")]
    NotARepository(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("history script: {0}")]
    ScriptParse(#[from] ScriptParseError),
    #[error("invalid history: {0}")]
    Graph(#[from] GraphError),
    #[error("{command} failed: {detail}")]
    Git { command: String, detail: String },
    #[error("unknown commit {0}")]
    UnknownCommit(String),
    #[error("snapshot unavailable for commit {0}")]
    SnapshotUnavailable(CommitId),
}

#[derive(Debug)]
enum Backend {
    Script(BTreeMap<CommitId, Arc<BTreeMap<String, String>>>),
    Git(GitBackend),
}

/// A loaded history: the commit graph plus lazily parsed, cached snapshots.
/// Snapshot reads are safe from many threads.
#[derive(Debug)]
pub struct Repository {
    graph: CommitGraph,
    backend: Backend,
    extension: String,
    cache: Mutex<BTreeMap<CommitId, Arc<Snapshot>>>,
}

pub fn open_repository(source: &RepositorySource, extension: &str) -> Result<Repository, RepoError> {
    if !source.location.exists() {
        return Err(RepoError::NotFound(source.location.clone()));
    }
    match source.kind {
        SourceKind::HistoryScript => {
            let text = std::fs::read_to_string(&source.location).map_err(|e| RepoError::Io {
                path: source.location.clone(),
                source: e,
            })?;
            Repository::from_script(&HistoryScript::parse(&text)?, extension)
        }
        SourceKind::VcsDirectory => {
            if !source.location.is_dir() {
                return Err(RepoError::NotARepository(source.location.clone()));
            }
            let backend = GitBackend::open(&source.location)?;
            let graph = build_graph(backend.commits()?)?;
            Ok(Repository {
                graph,
                backend: Backend::Git(backend),
                extension: extension.to_string(),
                cache: Mutex::new(BTreeMap::new()),
            })
        }
    }
}

impl Repository {
    pub fn from_script(script: &HistoryScript, extension: &str) -> Result<Self, RepoError> {
        let parents = script.resolved_parents();
        let mut commits = Vec::with_capacity(script.commits.len());
        for (block, parents) in script.commits.iter().zip(parents) {
            let parents = parents
                .into_iter()
                .map(CommitId::new)
                .collect::<Result<Vec<_>, _>>()?;
            commits.push(Commit::new(CommitId::new(block.id.clone())?, parents));
        }
        let graph = build_graph(commits)?;
        let trees = script
            .replay()
            .into_iter()
            .map(|(id, tree)| Ok((CommitId::new(id)?, Arc::new(tree))))
            .collect::<Result<BTreeMap<_, _>, GraphError>>()?;
        Ok(Self {
            graph,
            backend: Backend::Script(trees),
            extension: extension.to_string(),
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn graph(&self) -> &CommitGraph {
        &self.graph
    }

    pub fn extension(&self) -> &str {
        &self.extension
    }

    /// Raw source files (filtered to the extension) at a commit.
    pub fn files(&self, id: &CommitId) -> Result<BTreeMap<String, String>, RepoError> {
        if !self.graph.contains(id) {
            return Err(RepoError::SnapshotUnavailable(id.clone()));
        }
        match &self.backend {
            Backend::Script(trees) => {
                let tree = trees
                    .get(id)
                    .ok_or_else(|| RepoError::SnapshotUnavailable(id.clone()))?;
                Ok(tree
                    .iter()
                    .filter(|(path, _)| path.ends_with(&self.extension))
                    .map(|(p, t)| (p.clone(), t.clone()))
                    .collect())
            }
            Backend::Git(git) => git.files(id, &self.extension),
        }
    }

    /// Parsed snapshot at a commit, cached after the first read.
    pub fn snapshot(&self, id: &CommitId) -> Result<Arc<Snapshot>, RepoError> {
        if let Some(hit) = self.cache.lock().expect("snapshot cache").get(id) {
            return Ok(Arc::clone(hit));
        }
        let files = self.files(id)?;
        let snapshot = Arc::new(build_snapshot(
            files.iter().map(|(p, t)| (p.as_str(), t.as_str())),
            &self.extension,
        ));
        let mut cache = self.cache.lock().expect("snapshot cache");
        Ok(Arc::clone(cache.entry(id.clone()).or_insert(snapshot)))
    }

    /// Snapshot for an optional commit; `None` is the empty tree.
    pub fn snapshot_or_empty(&self, id: Option<&CommitId>) -> Result<Arc<Snapshot>, RepoError> {
        match id {
            Some(id) => self.snapshot(id),
            None => Ok(Arc::new(Snapshot::empty())),
        }
    }

    /// Snapshot before `id` applies: its first parent's, or empty for a root.
    pub fn parent_snapshot(&self, id: &CommitId) -> Result<Arc<Snapshot>, RepoError> {
        match self.graph.parents(id).first() {
            Some(parent) => self.snapshot(parent),
            None if self.graph.contains(id) => Ok(Arc::new(Snapshot::empty())),
            None => Err(RepoError::SnapshotUnavailable(id.clone())),
        }
    }

    /// Resolves a user-supplied commit name (a script id, or any git
    /// revision) to a commit in the graph.
    pub fn resolve(&self, name: &str) -> Result<CommitId, RepoError> {
        let unknown = || RepoError::UnknownCommit(name.to_string());
        let direct = CommitId::new(name).map_err(|_| unknown())?;
        if self.graph.contains(&direct) {
            return Ok(direct);
        }
        match &self.backend {
            Backend::Git(git) => {
                let hash = git.resolve(name).ok_or_else(unknown)?;
                let id = CommitId::new(hash).map_err(|_| unknown())?;
                if self.graph.contains(&id) {
                    Ok(id)
                } else {
                    Err(unknown())
                }
            }
            Backend::Script(_) => Err(unknown()),
        }
    }
}

/// Snapshot for a commit in the repository.
pub fn read_snapshot(repo: &Repository, id: &CommitId) -> Result<Arc<Snapshot>, RepoError> {
    repo.snapshot(id)
}

impl RepositorySource {
    pub fn path(&self) -> &Path {
        &self.location
    }
}
