//! CGR sets, effectiveness, Frequency and Ratio, and the end-to-end run.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{detect, RefactoringInstance, RefactoringType, Threshold};
use crate::history::{extract_straight_sequences, CommitGraph, CommitId};
use crate::par::{self, Jobs};
use crate::repo::{RepoError, Repository};
use crate::report::round_sig;
use crate::squash::{squash, units_at_level, SnapshotPair, SquashError, SquashUnit, StrategyError};

/// Detection output for every snapshot pair that was compared.
pub type DetectionTable = BTreeMap<SnapshotPair, Vec<RefactoringInstance>>;

pub const DEFAULT_LEVELS: [usize; 3] = [2, 3, 4];

/// Recorded in every report so readers know the label is mechanical.
pub const CLASSIFICATION_METHOD: &str = "file-overlap heuristic";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no detection result for commit {0}")]
    MissingDetection(CommitId),
    #[error("no squash units at level {0}")]
    NoUnits(usize),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Squash(#[from] SquashError),
    #[error("{context}: {source}")]
    Repo {
        context: String,
        #[source]
        source: RepoError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Classification {
    Generation,
    Combination,
    Unclassified,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Generation => "Generation",
            Classification::Combination => "Combination",
            Classification::Unclassified => "Unclassified",
        }
    }
}

fn fine_pair(graph: &CommitGraph, commit: &CommitId) -> Result<SnapshotPair, AnalysisError> {
    SnapshotPair::of_commit(graph, commit).map_err(|_| AnalysisError::MissingDetection(commit.clone()))
}

/// Every fine-grained instance detected on the unit's commits.
pub fn fine_detections<'t>(
    graph: &CommitGraph,
    unit: &SquashUnit,
    table: &'t DetectionTable,
) -> Result<Vec<&'t RefactoringInstance>, AnalysisError> {
    let mut out = Vec::new();
    for commit in &unit.commits {
        let found = table
            .get(&fine_pair(graph, commit)?)
            .ok_or_else(|| AnalysisError::MissingDetection(commit.clone()))?;
        out.extend(found);
    }
    Ok(out)
}

/// `types(u)`.
pub fn ref_types(
    graph: &CommitGraph,
    unit: &SquashUnit,
    table: &DetectionTable,
) -> Result<BTreeSet<RefactoringType>, AnalysisError> {
    Ok(fine_detections(graph, unit, table)?
        .into_iter()
        .map(|r| r.refactoring_type.clone())
        .collect())
}

/// `ref(sq(u))`.
pub fn coarse_detections<'t>(
    graph: &CommitGraph,
    unit: &SquashUnit,
    table: &'t DetectionTable,
) -> Result<&'t [RefactoringInstance], AnalysisError> {
    let pair = squash(graph, unit)?.snapshots;
    table
        .get(&pair)
        .map(Vec::as_slice)
        .ok_or_else(|| AnalysisError::MissingDetection(unit.last().clone()))
}

/// `CGR(u)`: coarse instances whose type no member commit produced.
pub fn compute_cgr(
    graph: &CommitGraph,
    unit: &SquashUnit,
    table: &DetectionTable,
) -> Result<Vec<RefactoringInstance>, AnalysisError> {
    let types = ref_types(graph, unit, table)?;
    Ok(coarse_detections(graph, unit, table)?
        .iter()
        .filter(|r| !types.contains(&r.refactoring_type))
        .cloned()
        .collect())
}

pub fn is_effective(graph: &CommitGraph, unit: &SquashUnit, table: &DetectionTable) -> Result<bool, AnalysisError> {
    Ok(!compute_cgr(graph, unit, table)?.is_empty())
}

/// `Frequency(H, l)`.
pub fn frequency(graph: &CommitGraph, level: usize, table: &DetectionTable) -> Result<f64, AnalysisError> {
    let units = units_at_level(graph, level)?;
    if units.is_empty() {
        return Err(AnalysisError::NoUnits(level));
    }
    let mut effective = 0usize;
    for unit in &units {
        if is_effective(graph, unit, table)? {
            effective += 1;
        }
    }
    Ok(effective as f64 / units.len() as f64)
}

/// `Ratio(t)` summed over `levels`; `None` when no unit is effective.
pub fn ratio(
    graph: &CommitGraph,
    refactoring_type: &RefactoringType,
    levels: &BTreeSet<usize>,
    table: &DetectionTable,
) -> Result<Option<f64>, AnalysisError> {
    let mut cgrs = 0usize;
    let mut effective = 0usize;
    for &level in levels {
        for unit in units_at_level(graph, level)? {
            let cgr = compute_cgr(graph, &unit, table)?;
            if !cgr.is_empty() {
                effective += 1;
            }
            cgrs += cgr.iter().filter(|r| &r.refactoring_type == refactoring_type).count();
        }
    }
    Ok((effective > 0).then(|| cgrs as f64 / effective as f64))
}

/// Combination when some fine-grained instance of the unit touches a file
/// the CGR touches, Generation otherwise.
pub fn classify_cgr(cgr: &RefactoringInstance, fine: &[&RefactoringInstance]) -> Classification {
    let files: BTreeSet<&str> = cgr.files().collect();
    if files.is_empty() {
        return Classification::Unclassified;
    }
    if fine.iter().any(|r| r.files().any(|f| files.contains(f))) {
        Classification::Combination
    } else {
        Classification::Generation
    }
}

/// Snapshot pairs needed to evaluate every unit of the given levels: each
/// unit's coarse pair and each member commit's own pair.
pub fn required_pairs(graph: &CommitGraph, levels: &BTreeSet<usize>) -> Result<BTreeSet<SnapshotPair>, AnalysisError> {
    let mut pairs = BTreeSet::new();
    for &level in levels {
        for unit in units_at_level(graph, level)? {
            for commit in &unit.commits {
                pairs.insert(fine_pair(graph, commit)?);
            }
            pairs.insert(squash(graph, &unit)?.snapshots);
        }
    }
    Ok(pairs)
}

pub fn detect_pair(repo: &Repository, pair: &SnapshotPair, threshold: Threshold) -> Result<Vec<RefactoringInstance>, AnalysisError> {
    let context = |source| AnalysisError::Repo {
        context: format!(
            "detecting {}..{}",
            pair.before.as_ref().map_or("(empty)", CommitId::as_str),
            pair.after
        ),
        source,
    };
    let before = repo.snapshot_or_empty(pair.before.as_ref()).map_err(context)?;
    let after = repo.snapshot(&pair.after).map_err(context)?;
    Ok(detect(&before, &after, threshold))
}

/// Runs the detector once per distinct pair, spread over `jobs` workers.
pub fn detect_all(
    repo: &Repository,
    pairs: &BTreeSet<SnapshotPair>,
    threshold: Threshold,
    jobs: Jobs,
) -> Result<DetectionTable, AnalysisError> {
    let pairs: Vec<&SnapshotPair> = pairs.iter().collect();
    let results = par::map(&pairs, jobs, |pair| detect_pair(repo, pair, threshold));
    let mut table = DetectionTable::new();
    for (pair, found) in pairs.into_iter().zip(results) {
        table.insert(pair.clone(), found?);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub levels: BTreeSet<usize>,
    pub threshold: Threshold,
    pub extension: String,
    pub jobs: Jobs,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS.into_iter().collect(),
            threshold: Threshold::DEFAULT,
            extension: crate::model::DEFAULT_EXTENSION.to_string(),
            jobs: None,
        }
    }
}

impl AnalysisConfig {
    /// Levels that feed Ratio: the analyzed levels of 2 or more.
    pub fn ratio_levels(&self) -> BTreeSet<usize> {
        self.levels.iter().copied().filter(|&l| l >= 2).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub threshold: f64,
    pub levels: Vec<usize>,
    pub ratio_levels: Vec<usize>,
    pub extension: String,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub sequence_id: CommitId,
    pub units: usize,
    pub effective: usize,
}

impl SequenceSample {
    pub fn frequency(&self) -> f64 {
        self.effective as f64 / self.units as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub units: usize,
    pub effective: usize,
    /// Sequences contributing at least one unit at this level.
    pub sequences: Vec<SequenceSample>,
}

impl LevelResult {
    /// `None` when the level has no units.
    pub fn frequency(&self) -> Option<f64> {
        (self.units > 0).then(|| self.effective as f64 / self.units as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioResult {
    #[serde(rename = "type")]
    pub refactoring_type: RefactoringType,
    pub cgr_count: usize,
    pub effective_count: usize,
}

impl RatioResult {
    /// `None` is Undefined: no effective unit at any ratio level.
    pub fn ratio(&self) -> Option<f64> {
        (self.effective_count > 0).then(|| self.cgr_count as f64 / self.effective_count as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgrRecord {
    pub level: usize,
    pub unit: SquashUnit,
    pub instance: RefactoringInstance,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub level: usize,
    pub unit: SquashUnit,
    pub fine_detections: usize,
    pub coarse_detections: usize,
    pub cgrs: usize,
}

impl UnitSummary {
    pub fn is_effective(&self) -> bool {
        self.cgrs > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ConfigEcho,
    pub levels: Vec<LevelResult>,
    pub ratios: Vec<RatioResult>,
    pub cgrs: Vec<CgrRecord>,
    pub units: Vec<UnitSummary>,
}

impl AnalysisReport {
    pub fn level(&self, level: usize) -> Option<&LevelResult> {
        self.levels.iter().find(|l| l.level == level)
    }

    pub fn ratio_for(&self, refactoring_type: &RefactoringType) -> Option<&RatioResult> {
        self.ratios.iter().find(|r| &r.refactoring_type == refactoring_type)
    }
}

pub fn run_analysis(repo: &Repository, config: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    run_analysis_with_progress(repo, config, &mut |_| {})
}

/// As [`run_analysis`], reporting stage messages to `progress`.
pub fn run_analysis_with_progress(
    repo: &Repository,
    config: &AnalysisConfig,
    progress: &mut dyn FnMut(&str),
) -> Result<AnalysisReport, AnalysisError> {
    let graph = repo.graph();
    let sequences = extract_straight_sequences(graph);
    progress(&format!(
        "{} commits, {} straight sequences",
        graph.len(),
        sequences.len()
    ));

    let mut units_by_level = BTreeMap::new();
    for &level in &config.levels {
        units_by_level.insert(level, units_at_level(graph, level)?);
    }
    let pairs = required_pairs(graph, &config.levels)?;
    progress(&format!("detecting refactorings in {} snapshot pairs", pairs.len()));
    let table = detect_all(repo, &pairs, config.threshold, config.jobs)?;

    let ratio_levels = config.ratio_levels();
    let mut levels = Vec::new();
    let mut cgrs = Vec::new();
    let mut summaries = Vec::new();
    let mut ratio_counts: BTreeMap<RefactoringType, usize> =
        RefactoringType::CATALOG.iter().map(|t| (t.clone(), 0)).collect();
    let mut ratio_effective = 0usize;

    for (&level, units) in &units_by_level {
        let mut samples: BTreeMap<&CommitId, SequenceSample> = BTreeMap::new();
        let mut effective = 0usize;
        for unit in units {
            let fine = fine_detections(graph, unit, &table)?;
            let coarse = coarse_detections(graph, unit, &table)?;
            let cgr = compute_cgr(graph, unit, &table)?;
            let sample = samples.entry(&unit.sequence_id).or_insert_with(|| SequenceSample {
                sequence_id: unit.sequence_id.clone(),
                units: 0,
                effective: 0,
            });
            sample.units += 1;
            if !cgr.is_empty() {
                sample.effective += 1;
                effective += 1;
            }
            summaries.push(UnitSummary {
                level,
                unit: unit.clone(),
                fine_detections: fine.len(),
                coarse_detections: coarse.len(),
                cgrs: cgr.len(),
            });
            if ratio_levels.contains(&level) {
                for r in &cgr {
                    *ratio_counts.entry(r.refactoring_type.clone()).or_default() += 1;
                }
            }
            for instance in cgr {
                cgrs.push(CgrRecord {
                    level,
                    unit: unit.clone(),
                    classification: classify_cgr(&instance, &fine),
                    instance,
                });
            }
        }
        if ratio_levels.contains(&level) {
            ratio_effective += effective;
        }
        progress(&format!("level {level}: {effective} of {} units effective", units.len()));
        levels.push(LevelResult {
            level,
            units: units.len(),
            effective,
            sequences: samples.into_values().collect(),
        });
    }

    let ratios = if ratio_levels.is_empty() {
        Vec::new()
    } else {
        ratio_counts
            .into_iter()
            .map(|(refactoring_type, cgr_count)| RatioResult {
                refactoring_type,
                cgr_count,
                effective_count: ratio_effective,
            })
            .collect()
    };

    Ok(AnalysisReport {
        config: ConfigEcho {
            threshold: round_sig(config.threshold.value()),
            levels: config.levels.iter().copied().collect(),
            ratio_levels: ratio_levels.into_iter().collect(),
            extension: config.extension.clone(),
            classification: CLASSIFICATION_METHOD.to_string(),
        },
        levels,
        ratios,
        cgrs,
        units: summaries,
    })
}
