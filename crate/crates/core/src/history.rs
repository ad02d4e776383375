//! Commit graph and straight commit sequences.
//!
//! A straight sequence is a maximal parent/child run that contains no merge
//! commit (more than one parent) and no branch source (more than one child).
//! Root commits may head a sequence; their "before" state is the empty tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque commit identifier: a hex hash for real repositories or a symbolic
/// name for scripted fixtures.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommitId(String);

impl CommitId {
    pub fn new(value: impl Into<String>) -> Result<Self, GraphError> {
        let value = value.into();
        if value.is_empty() {
            return Err(GraphError::EmptyId);
        }
        Ok(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CommitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub id: CommitId,
    pub parents: Vec<CommitId>,
    pub message: String,
}

impl Commit {
    pub fn new(id: CommitId, parents: Vec<CommitId>) -> Self {
        Self {
            id,
            parents,
            message: String::new(),
        }
    }

    pub fn is_merge(&self) -> bool {
        self.parents.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("commit id must not be empty")]
    EmptyId,
    #[error("duplicate commit {0}")]
    DuplicateCommit(CommitId),
    #[error("commit {commit} lists parent {parent} twice")]
    DuplicateParent { commit: CommitId, parent: CommitId },
    #[error("unresolved parent {0}")]
    UnresolvedParent(CommitId),
    #[error("commit graph contains a cycle")]
    CycleDetected,
}

/// The commit history as an acyclic graph. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommitGraph {
    commits: BTreeMap<CommitId, Commit>,
    children: BTreeMap<CommitId, Vec<CommitId>>,
    roots: BTreeSet<CommitId>,
}

impl CommitGraph {
    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    pub fn get(&self, id: &CommitId) -> Option<&Commit> {
        self.commits.get(id)
    }

    pub fn contains(&self, id: &CommitId) -> bool {
        self.commits.contains_key(id)
    }

    pub fn commits(&self) -> impl Iterator<Item = &Commit> {
        self.commits.values()
    }

    pub fn roots(&self) -> &BTreeSet<CommitId> {
        &self.roots
    }

    pub fn children(&self, id: &CommitId) -> &[CommitId] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parents(&self, id: &CommitId) -> &[CommitId] {
        self.commits
            .get(id)
            .map(|c| c.parents.as_slice())
            .unwrap_or(&[])
    }

    pub fn is_branch_source(&self, id: &CommitId) -> bool {
        self.children(id).len() > 1
    }

    /// Neither a merge commit nor a branch source.
    pub fn is_straight(&self, id: &CommitId) -> bool {
        self.parents(id).len() <= 1 && !self.is_branch_source(id)
    }
}

/// Builds a graph from a list of commits, rejecting dangling parents and
/// cycles.
pub fn build_graph(commits: Vec<Commit>) -> Result<CommitGraph, GraphError> {
    let mut by_id = BTreeMap::new();
    for commit in commits {
        let mut seen = BTreeSet::new();
        for parent in &commit.parents {
            if !seen.insert(parent) {
                return Err(GraphError::DuplicateParent {
                    commit: commit.id.clone(),
                    parent: parent.clone(),
                });
            }
        }
        if by_id.contains_key(&commit.id) {
            return Err(GraphError::DuplicateCommit(commit.id));
        }
        by_id.insert(commit.id.clone(), commit);
    }

    let mut children: BTreeMap<CommitId, Vec<CommitId>> = BTreeMap::new();
    let mut roots = BTreeSet::new();
    for commit in by_id.values() {
        if commit.parents.is_empty() {
            roots.insert(commit.id.clone());
        }
        for parent in &commit.parents {
            if !by_id.contains_key(parent) {
                return Err(GraphError::UnresolvedParent(parent.clone()));
            }
            children
                .entry(parent.clone())
                .or_default()
                .push(commit.id.clone());
        }
    }

    // Kahn's algorithm: every commit must be reachable in topological order.
    let mut pending: BTreeMap<&CommitId, usize> = by_id
        .values()
        .map(|c| (&c.id, c.parents.len()))
        .collect();
    let mut queue: VecDeque<&CommitId> = roots.iter().collect();
    let mut visited = 0usize;
    while let Some(id) = queue.pop_front() {
        visited += 1;
        for child in children.get(id).into_iter().flatten() {
            let count = pending.get_mut(child).expect("child is a known commit");
            *count -= 1;
            if *count == 0 {
                queue.push_back(child);
            }
        }
    }
    if visited != by_id.len() {
        return Err(GraphError::CycleDetected);
    }

    Ok(CommitGraph {
        commits: by_id,
        children,
        roots,
    })
}

/// A maximal merge-free, branch-free run of commits, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightSequence {
    pub commits: Vec<CommitId>,
}

impl StraightSequence {
    /// Sequences are disjoint, so the head commit identifies one.
    pub fn id(&self) -> &CommitId {
        &self.commits[0]
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }
}

/// Extracts every maximal straight sequence, ordered by head commit id.
pub fn extract_straight_sequences(graph: &CommitGraph) -> Vec<StraightSequence> {
    let mut sequences = Vec::new();
    for commit in graph.commits() {
        let id = &commit.id;
        if !graph.is_straight(id) {
            continue;
        }
        // A head has no parent, or a parent that cannot precede it in a run.
        let extends_parent = match commit.parents.as_slice() {
            [parent] => graph.is_straight(parent),
            _ => false,
        };
        if extends_parent {
            continue;
        }
        let mut run = vec![id.clone()];
        let mut current = id;
        while let [child] = graph.children(current) {
            if !graph.is_straight(child) {
                break;
            }
            run.push(child.clone());
            current = child;
        }
        sequences.push(StraightSequence { commits: run });
    }
    sequences.sort_by(|a, b| a.id().cmp(b.id()));
    sequences
}
