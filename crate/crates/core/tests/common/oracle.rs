//! Brute-force evaluation of the CGR definitions, written directly against
//! a history script: its own parent maps, its own file replay and its own
//! enumeration of squash units. Only the detector itself is shared with the
//! pipeline.

use std::collections::{BTreeMap, BTreeSet};

use cgrminer::detect::{detect, RefactoringInstance, RefactoringType, Threshold};
use cgrminer::model::{build_snapshot, Snapshot};
use cgrminer::repo::{FileOp, HistoryScript};

pub struct Oracle {
    pub parents: BTreeMap<String, Vec<String>>,
    pub children: BTreeMap<String, Vec<String>>,
    trees: BTreeMap<String, BTreeMap<String, String>>,
    snapshots: BTreeMap<String, Snapshot>,
    threshold: Threshold,
}

/// Frequency and Ratio as exact count pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: usize,
    pub den: usize,
}

impl Fraction {
    pub fn value(self) -> Option<f64> {
        (self.den > 0).then(|| self.num as f64 / self.den as f64)
    }
}

impl Oracle {
    pub fn new(script: &HistoryScript, threshold: Threshold) -> Self {
        let mut parents = BTreeMap::new();
        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut trees: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut previous: Option<String> = None;
        for block in &script.commits {
            let ps: Vec<String> = if block.parents.is_empty() {
                previous.iter().cloned().collect()
            } else {
                block.parents.clone()
            };
            for p in &ps {
                children.entry(p.clone()).or_default().push(block.id.clone());
            }
            let mut tree = ps.first().map(|p| trees[p].clone()).unwrap_or_default();
            for op in &block.ops {
                match op {
                    FileOp::Write { path, content } => {
                        tree.insert(path.clone(), content.clone());
                    }
                    FileOp::Delete { path } => {
                        tree.remove(path);
                    }
                }
            }
            trees.insert(block.id.clone(), tree);
            parents.insert(block.id.clone(), ps);
            previous = Some(block.id.clone());
        }
        Self {
            parents,
            children,
            trees,
            snapshots: BTreeMap::new(),
            threshold,
        }
    }

    fn straight(&self, c: &str) -> bool {
        self.parents[c].len() <= 1 && self.children.get(c).map_or(0, Vec::len) <= 1
    }

    /// Every run of `level` straight commits linked parent to child.
    pub fn units(&self, level: usize) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        for start in self.parents.keys() {
            let mut path = vec![start.clone()];
            while path.len() < level {
                let last = path.last().unwrap();
                if !self.straight(last) {
                    break;
                }
                match self.children.get(last).map(Vec::as_slice) {
                    Some([only]) => path.push(only.clone()),
                    _ => break,
                }
            }
            if path.len() == level && path.iter().all(|c| self.straight(c)) {
                out.insert(path);
            }
        }
        out
    }

    /// Lengths of maximal straight runs.
    pub fn sequence_lengths(&self) -> Vec<usize> {
        let mut lengths = Vec::new();
        for c in self.parents.keys() {
            if !self.straight(c) {
                continue;
            }
            let head = match self.parents[c].as_slice() {
                [p] => !self.straight(p),
                _ => true,
            };
            if !head {
                continue;
            }
            let mut len = 1;
            let mut cur = c.clone();
            while let Some([only]) = self.children.get(&cur).map(Vec::as_slice) {
                if !self.straight(only) {
                    break;
                }
                len += 1;
                cur = only.clone();
            }
            lengths.push(len);
        }
        lengths
    }

    fn snapshot(&mut self, commit: Option<&str>) -> Snapshot {
        let Some(c) = commit else {
            return Snapshot::empty();
        };
        if !self.snapshots.contains_key(c) {
            let tree = &self.trees[c];
            let snap = build_snapshot(tree.iter().map(|(p, t)| (p.as_str(), t.as_str())), ".java");
            self.snapshots.insert(c.to_string(), snap);
        }
        self.snapshots[c].clone()
    }

    fn detect_between(&mut self, before: Option<&str>, after: &str) -> Vec<RefactoringInstance> {
        let b = self.snapshot(before);
        let a = self.snapshot(Some(after));
        detect(&b, &a, self.threshold)
    }

    /// `ref(c)`.
    pub fn fine(&mut self, commit: &str) -> Vec<RefactoringInstance> {
        let parent = self.parents[commit].first().cloned();
        self.detect_between(parent.as_deref(), commit)
    }

    /// `ref(sq(u))`.
    pub fn coarse(&mut self, unit: &[String]) -> Vec<RefactoringInstance> {
        let parent = self.parents[&unit[0]].first().cloned();
        self.detect_between(parent.as_deref(), unit.last().unwrap())
    }

    /// `CGR(u)`: coarse instances whose type no commit of `u` shows.
    pub fn cgr(&mut self, unit: &[String]) -> Vec<RefactoringInstance> {
        let mut types = BTreeSet::new();
        for c in unit {
            for r in self.fine(c) {
                types.insert(r.refactoring_type);
            }
        }
        let mut out: Vec<RefactoringInstance> = self
            .coarse(unit)
            .into_iter()
            .filter(|r| !types.contains(&r.refactoring_type))
            .collect();
        out.sort();
        out
    }

    pub fn frequency(&mut self, level: usize) -> Fraction {
        let units = self.units(level);
        let effective = units.iter().filter(|u| !self.cgr(u).is_empty()).count();
        Fraction {
            num: effective,
            den: units.len(),
        }
    }

    pub fn ratio(&mut self, t: &RefactoringType, levels: &[usize]) -> Fraction {
        let (mut num, mut den) = (0, 0);
        for &l in levels {
            for u in self.units(l) {
                let cgr = self.cgr(&u);
                if !cgr.is_empty() {
                    den += 1;
                }
                num += cgr.iter().filter(|r| &r.refactoring_type == t).count();
            }
        }
        Fraction { num, den }
    }
}

/// `Σ_seq Σ_{o<l} floor((len − o) / l)`.
pub fn window_count(lengths: &[usize], level: usize) -> usize {
    lengths
        .iter()
        .map(|&len| (0..level).map(|o| len.saturating_sub(o) / level).sum::<usize>())
        .sum()
}

/// Runs the full pipeline on `script` and lists every disagreement with the
/// brute-force definitions. Empty means equivalent.
pub fn compare_with_pipeline(script: &HistoryScript, levels: &[usize], jobs: Option<usize>) -> Vec<String> {
    use cgrminer::analysis::{run_analysis, AnalysisConfig};

    let threshold = Threshold::DEFAULT;
    let repo = super::repository(script);
    let config = AnalysisConfig {
        levels: levels.iter().copied().collect(),
        threshold,
        extension: ".java".into(),
        jobs,
    };
    let report = match run_analysis(&repo, &config) {
        Ok(r) => r,
        Err(e) => return vec![format!("pipeline failed: {e}")],
    };
    let mut oracle = Oracle::new(script, threshold);
    let mut problems = Vec::new();
    let names = |commits: &[cgrminer::history::CommitId]| -> Vec<String> {
        commits.iter().map(|c| c.to_string()).collect()
    };

    for &level in levels {
        let expected_units = oracle.units(level);
        let pipeline_units: BTreeSet<Vec<String>> = report
            .units
            .iter()
            .filter(|u| u.level == level)
            .map(|u| names(&u.unit.commits))
            .collect();
        if expected_units != pipeline_units {
            problems.push(format!("U_{level}: oracle {expected_units:?}, pipeline {pipeline_units:?}"));
            continue;
        }
        for unit in &expected_units {
            let expected = oracle.cgr(unit);
            let mut got: Vec<RefactoringInstance> = report
                .cgrs
                .iter()
                .filter(|r| r.level == level && &names(&r.unit.commits) == unit)
                .map(|r| r.instance.clone())
                .collect();
            got.sort();
            if expected != got {
                problems.push(format!("CGR{unit:?}: oracle {expected:?}, pipeline {got:?}"));
            }
            let summary = report
                .units
                .iter()
                .find(|u| u.level == level && &names(&u.unit.commits) == unit)
                .expect("unit listed");
            if summary.is_effective() != !expected.is_empty() {
                problems.push(format!("isEffective{unit:?} differs"));
            }
        }
        let f = oracle.frequency(level);
        let result = report.level(level).expect("level reported");
        if (result.effective, result.units) != (f.num, f.den) || result.frequency() != f.value() {
            problems.push(format!(
                "Frequency(H,{level}): oracle {}/{}, pipeline {}/{}",
                f.num, f.den, result.effective, result.units
            ));
        }
    }

    let ratio_levels: Vec<usize> = levels.iter().copied().filter(|&l| l >= 2).collect();
    if !ratio_levels.is_empty() {
        let mut types: BTreeSet<RefactoringType> = RefactoringType::CATALOG.iter().cloned().collect();
        types.extend(report.ratios.iter().map(|r| r.refactoring_type.clone()));
        for t in types {
            let expected = oracle.ratio(&t, &ratio_levels);
            match report.ratio_for(&t) {
                Some(r) if (r.cgr_count, r.effective_count) == (expected.num, expected.den)
                    && r.ratio() == expected.value() => {}
                other => problems.push(format!(
                    "Ratio({t}): oracle {}/{}, pipeline {other:?}",
                    expected.num, expected.den
                )),
            }
        }
    }
    problems
}

/// Maximal straight-run lengths of a raw parent list, by direct search.
pub fn brute_sequence_lengths(commits: &[(String, Vec<String>)]) -> Vec<usize> {
    let parents: BTreeMap<&str, &[String]> = commits.iter().map(|(c, p)| (c.as_str(), p.as_slice())).collect();
    let child_count = |c: &str| commits.iter().filter(|(_, ps)| ps.iter().any(|p| p == c)).count();
    let straight = |c: &str| parents[c].len() <= 1 && child_count(c) <= 1;
    let only_child = |c: &str| {
        commits
            .iter()
            .find(|(_, ps)| ps.iter().any(|p| p == c))
            .map(|(id, _)| id.as_str())
    };
    let mut lengths = Vec::new();
    for (c, ps) in commits {
        let head = straight(c) && !matches!(ps.as_slice(), [p] if straight(p));
        if !head {
            continue;
        }
        let mut len = 1;
        let mut cur = c.as_str();
        while child_count(cur) == 1 {
            let next = only_child(cur).unwrap();
            if !straight(next) {
                break;
            }
            len += 1;
            cur = next;
        }
        lengths.push(len);
    }
    lengths
}
