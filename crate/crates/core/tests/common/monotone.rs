//! Linear histories in which every planted refactoring is spread over 2 to
//! 4 commits: a copy first, untouched commits in between, the delete last.
//! No single commit is a refactoring, so a unit is effective exactly when
//! it spans a whole episode.

use std::collections::BTreeMap;

use cgrminer::repo::HistoryScript;

use super::javagen::{field, linear_script, method, Class};

#[derive(Debug, Clone, Copy)]
pub enum Episode {
    MoveClass,
    RenameClass,
    MoveMethod,
    MoveAttribute,
}

const KINDS: [Episode; 4] = [
    Episode::MoveClass,
    Episode::RenameClass,
    Episode::MoveMethod,
    Episode::MoveAttribute,
];

fn worker(i: usize) -> Class {
    Class::new("app.base", &format!("Worker{i}"))
        .with_field(field("private", "int", &format!("load{i}")))
        .with_field(field("private", "String", &format!("tag{i}")))
        .with_method(method(
            "public",
            "int",
            &format!("run{i}"),
            &["int"],
            &format!("load{i} += p0; return schedule(load{i}, {i});"),
        ))
        .with_method(method(
            "public",
            "String",
            &format!("describe{i}"),
            &[],
            &format!("return tag{i} + \":\" + load{i};"),
        ))
}

struct Builder {
    /// Indexed by worker; `None` once deleted. Copies are appended.
    classes: Vec<Option<Class>>,
    notes: usize,
    states: Vec<BTreeMap<String, String>>,
}

impl Builder {
    fn snapshot(&mut self) {
        let live: Vec<Class> = self.classes.iter().flatten().cloned().collect();
        let mut files = super::javagen::render(&live);
        files.insert("NOTES.txt".into(), format!("revision {}", self.notes));
        self.states.push(files);
    }

    fn filler(&mut self) {
        self.notes += 1;
        self.snapshot();
    }
}

/// One history with an episode per entry of `spans`, `gap` untouched
/// commits around and between them.
pub fn script(spans: &[usize], gap: usize) -> HistoryScript {
    assert!(spans.iter().all(|s| (2..=4).contains(s)));
    let mut b = Builder {
        classes: (0..spans.len() * 2).map(|i| Some(worker(i))).collect(),
        notes: 0,
        states: Vec::new(),
    };
    b.snapshot();
    for _ in 0..gap {
        b.filler();
    }
    for (e, &span) in spans.iter().enumerate() {
        let (source, target) = (2 * e, 2 * e + 1);
        let kind = KINDS[e % KINDS.len()];
        let original = b.classes[source].clone().expect("each worker is used once");
        // Copy.
        match kind {
            Episode::MoveClass => {
                let mut copy = original;
                copy.package = format!("app.moved{e}");
                b.classes.push(Some(copy));
            }
            Episode::RenameClass => {
                let mut copy = original;
                copy.name = format!("{}Renamed", copy.name);
                b.classes.push(Some(copy));
            }
            Episode::MoveMethod => {
                let m = original.methods[0].clone();
                b.classes[target].as_mut().unwrap().methods.push(m);
            }
            Episode::MoveAttribute => {
                let f = original.fields[0].clone();
                b.classes[target].as_mut().unwrap().fields.push(f);
            }
        }
        b.snapshot();
        for _ in 0..span - 2 {
            b.filler();
        }
        // Delete the original.
        match kind {
            Episode::MoveClass | Episode::RenameClass => b.classes[source] = None,
            Episode::MoveMethod => {
                b.classes[source].as_mut().unwrap().methods.remove(0);
            }
            Episode::MoveAttribute => {
                b.classes[source].as_mut().unwrap().fields.remove(0);
            }
        }
        b.snapshot();
        for _ in 0..gap {
            b.filler();
        }
    }
    let ids: Vec<String> = (0..b.states.len()).map(|i| format!("m{i:02}")).collect();
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    linear_script(&ids, &b.states)
}

/// The corpus used by the monotonicity check.
pub fn corpus() -> Vec<(String, HistoryScript)> {
    let shapes: [&[usize]; 6] = [&[2], &[3], &[4], &[2, 3, 4], &[4, 2], &[3, 3, 2, 4]];
    shapes
        .iter()
        .map(|spans| (format!("spans {spans:?}"), script(spans, 3)))
        .collect()
}
