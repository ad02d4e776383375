//! Squash units and coarse-grained commits.
//!
//! Squashing never rewrites history: a coarse commit is just the pair of
//! snapshots that bracket its unit.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::history::{extract_straight_sequences, CommitGraph, CommitId, StraightSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("granularity level must be at least 1")]
    ZeroLevel,
    #[error("offset {offset} out of range for level {level}")]
    OffsetOutOfRange { level: usize, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SquashError {
    #[error("snapshot unavailable for commit {0}")]
    SnapshotUnavailable(CommitId),
}

/// `S_o^l`: skip `offset` commits, then cut windows of `level` commits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawStrategy")]
pub struct Strategy {
    level: usize,
    offset: usize,
}

#[derive(Deserialize)]
struct RawStrategy {
    level: usize,
    offset: usize,
}

impl TryFrom<RawStrategy> for Strategy {
    type Error = StrategyError;

    fn try_from(raw: RawStrategy) -> Result<Self, Self::Error> {
        Strategy::new(raw.level, raw.offset)
    }
}

impl Strategy {
    pub fn new(level: usize, offset: usize) -> Result<Self, StrategyError> {
        if level == 0 {
            return Err(StrategyError::ZeroLevel);
        }
        if offset >= level {
            return Err(StrategyError::OffsetOutOfRange { level, offset });
        }
        Ok(Self { level, offset })
    }

    pub fn level(self) -> usize {
        self.level
    }

    pub fn offset(self) -> usize {
        self.offset
    }

    /// All strategies of one level, offsets ascending.
    pub fn all_offsets(level: usize) -> Result<Vec<Self>, StrategyError> {
        if level == 0 {
            return Err(StrategyError::ZeroLevel);
        }
        Ok((0..level).map(|offset| Self { level, offset }).collect())
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}^{}", self.offset, self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SquashUnit {
    pub sequence_id: CommitId,
    /// Position of the first commit within its sequence.
    pub start: usize,
    pub strategy: Strategy,
    /// Oldest first; exactly `strategy.level()` commits.
    pub commits: Vec<CommitId>,
}

impl SquashUnit {
    pub fn level(&self) -> usize {
        self.commits.len()
    }

    pub fn first(&self) -> &CommitId {
        &self.commits[0]
    }

    pub fn last(&self) -> &CommitId {
        self.commits.last().expect("units are never empty")
    }
}

/// The two states a detector compares. `before == None` is the empty tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SnapshotPair {
    pub before: Option<CommitId>,
    pub after: CommitId,
}

impl SnapshotPair {
    /// The pair for a single commit: its first parent against itself.
    pub fn of_commit(graph: &CommitGraph, id: &CommitId) -> Result<Self, SquashError> {
        if !graph.contains(id) {
            return Err(SquashError::SnapshotUnavailable(id.clone()));
        }
        Ok(Self {
            before: graph.parents(id).first().cloned(),
            after: id.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseCommit {
    pub unit: SquashUnit,
    pub snapshots: SnapshotPair,
}

pub fn extract_units(sequence: &StraightSequence, strategy: Strategy) -> Vec<SquashUnit> {
    let level = strategy.level();
    let commits = &sequence.commits;
    let mut units = Vec::new();
    let mut start = strategy.offset();
    while start + level <= commits.len() {
        units.push(SquashUnit {
            sequence_id: sequence.id().clone(),
            start,
            strategy,
            commits: commits[start..start + level].to_vec(),
        });
        start += level;
    }
    units
}

/// `U_l(H)`: units of every offset strategy over every straight sequence,
/// ordered by sequence id, then position.
pub fn units_at_level(graph: &CommitGraph, level: usize) -> Result<Vec<SquashUnit>, StrategyError> {
    let strategies = Strategy::all_offsets(level)?;
    let mut units = BTreeSet::new();
    for sequence in extract_straight_sequences(graph) {
        for &strategy in &strategies {
            units.extend(extract_units(&sequence, strategy));
        }
    }
    Ok(units.into_iter().collect())
}

/// `sq(u)`: the parent of the unit's first commit against its last commit.
pub fn squash(graph: &CommitGraph, unit: &SquashUnit) -> Result<CoarseCommit, SquashError> {
    if let Some(missing) = unit.commits.iter().find(|c| !graph.contains(c)) {
        return Err(SquashError::SnapshotUnavailable(missing.clone()));
    }
    let before = SnapshotPair::of_commit(graph, unit.first())?.before;
    Ok(CoarseCommit {
        unit: unit.clone(),
        snapshots: SnapshotPair {
            before,
            after: unit.last().clone(),
        },
    })
}
