#![allow(dead_code)]

pub mod javagen;
pub mod monotone;
pub mod oracle;

use std::path::PathBuf;

use std::collections::BTreeSet;

use cgrminer::history::{Commit, CommitId};
use cgrminer::repo::{HistoryScript, Repository};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_script(name: &str) -> HistoryScript {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    HistoryScript::parse(&text).expect("fixture parses")
}

pub fn repository(script: &HistoryScript) -> Repository {
    Repository::from_script(script, ".java").expect("script loads")
}

pub const FIG1: &str = "move_via_copy.script";
pub const FIG4: &str = "merge_package.script";

/// A random commit DAG of up to 30 commits with roots, branches and merges.
pub fn random_graph<R: Rng>(rng: &mut R) -> Vec<Commit> {
    let n = rng.gen_range(0..30);
    let id = |i: usize| CommitId::new(format!("n{i:02}")).unwrap();
    (0..n)
        .map(|i| {
            let mut parents = BTreeSet::new();
            if i > 0 {
                let count = match rng.gen_range(0..10) {
                    0 => 0,
                    1 | 2 => 2,
                    _ => 1,
                };
                for _ in 0..count {
                    parents.insert(rng.gen_range(0..i));
                }
            }
            Commit::new(id(i), parents.into_iter().map(id).collect())
        })
        .collect()
}
