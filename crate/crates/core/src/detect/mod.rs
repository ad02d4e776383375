//! Refactoring detection between two snapshots.
//!
//! Entities are matched first (see [`matching`]); each match pair is then
//! classified against a fixed catalog of class, package, method and
//! attribute refactorings. Instances whose locations do not resolve in
//! their snapshot are dropped.

mod external;
mod location;
pub mod matching;
mod similarity;
mod types;

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{simple_type_name, ClassDecl, Snapshot};
use matching::{ClassEntity, EntityMatches, MatchPhase};

pub use external::{ingest_external_detections, SchemaError};
pub use location::validate_location;
pub use matching::{match_entities, MatchPair};
pub use similarity::similarity;
pub use types::{
    CodeLocation, EntityKind, InvalidThreshold, RefactoringInstance, RefactoringType, Threshold,
};

/// Detects refactorings from `before` to `after`. The result is sorted and
/// free of duplicates.
pub fn detect(before: &Snapshot, after: &Snapshot, threshold: Threshold) -> Vec<RefactoringInstance> {
    let matches = matching::match_all(before, after, threshold);
    let mut found = BTreeSet::new();

    let package_moves = package_rules(before, after, &matches);
    let suppressed: BTreeSet<&str> = package_moves
        .suppressed_classes
        .iter()
        .map(String::as_str)
        .collect();
    found.extend(package_moves.instances);

    classify_classes(before, after, &matches, &suppressed, &mut found);
    classify_methods(before, after, &matches, &mut found);
    classify_attributes(&matches, &mut found);

    found
        .into_iter()
        .filter(|r| {
            r.before_locations.iter().all(|l| validate_location(l, before))
                && r.after_locations.iter().all(|l| validate_location(l, after))
        })
        .collect()
}

fn class_location(entity: &ClassEntity) -> CodeLocation {
    CodeLocation::new(entity.path, EntityKind::Class, entity.decl.qualified_name.clone())
}

fn instance(
    refactoring_type: RefactoringType,
    description: String,
    before: Vec<CodeLocation>,
    after: Vec<CodeLocation>,
) -> RefactoringInstance {
    RefactoringInstance {
        refactoring_type,
        description,
        before_locations: before,
        after_locations: after,
    }
}

/// Whether the class moved out of its file: the old file no longer declares
/// it and the new file did not declare it before. Duplicated declarations
/// (a copy that precedes a delete) are therefore not moves on their own.
fn changed_file(before: &Snapshot, after: &Snapshot, old: &str, new: &str, qualified_name: &str) -> bool {
    old != new
        && !after.declaration_sites(qualified_name).contains(old)
        && !before.declaration_sites(qualified_name).contains(new)
}

fn classify_classes(
    before: &Snapshot,
    after: &Snapshot,
    matches: &EntityMatches,
    suppressed: &BTreeSet<&str>,
    found: &mut BTreeSet<RefactoringInstance>,
) {
    for pair in &matches.classes {
        let (b, a) = (pair.before.decl, pair.after.decl);
        let locations = || (vec![class_location(&pair.before)], vec![class_location(&pair.after)]);
        if pair.phase == MatchPhase::Exact {
            if changed_file(before, after, pair.before.path, pair.after.path, &b.qualified_name) {
                let (bl, al) = locations();
                found.insert(instance(
                    RefactoringType::MoveClass,
                    format!(
                        "Move Class {} from file {} to file {}",
                        b.qualified_name, pair.before.path, pair.after.path
                    ),
                    bl,
                    al,
                ));
            }
            if b.access_modifier != a.access_modifier {
                let (bl, al) = locations();
                found.insert(instance(
                    RefactoringType::ChangeClassAccessModifier,
                    format!(
                        "Change Access Modifier {} to {} in class {}",
                        b.access_modifier, a.access_modifier, a.qualified_name
                    ),
                    bl,
                    al,
                ));
            }
            continue;
        }

        let moved = b.package() != a.package();
        let renamed = b.name != a.name;
        let (kind, verb) = match (moved, renamed) {
            (true, false) if suppressed.contains(b.qualified_name.as_str()) => continue,
            (true, false) => (RefactoringType::MoveClass, "Move Class"),
            (false, true) => (RefactoringType::RenameClass, "Rename Class"),
            (true, true) => (RefactoringType::MoveAndRenameClass, "Move And Rename Class"),
            (false, false) => continue,
        };
        let (bl, al) = locations();
        found.insert(instance(
            kind,
            format!("{verb} {} moved to {}", b.qualified_name, a.qualified_name),
            bl,
            al,
        ));
    }
}

/// Whether `start`'s superclass chain in `snapshot` reaches a class with
/// simple name `target`. Links are followed by simple name only.
fn extends_transitively(snapshot: &Snapshot, start: &ClassDecl, target: &str) -> bool {
    let mut visited = BTreeSet::new();
    let mut current = start;
    while let Some(superclass) = current.superclass_name.as_deref() {
        let name = simple_type_name(superclass);
        if name == target {
            return true;
        }
        if !visited.insert(name) {
            return false;
        }
        match snapshot.class_by_simple_name(name) {
            Some((_, next)) => current = next,
            None => return false,
        }
    }
    false
}

/// Positions of `longer` left unmatched by a longest common subsequence with
/// `shorter`.
fn unmatched_positions(longer: &[String], shorter: &[String]) -> Vec<usize> {
    let (n, m) = (longer.len(), shorter.len());
    let mut lcs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if longer[i] == shorter[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let (mut i, mut j) = (0, 0);
    let mut unmatched = Vec::new();
    while i < n {
        if j < m && longer[i] == shorter[j] {
            i += 1;
            j += 1;
        } else if j < m && lcs[i][j + 1] > lcs[i + 1][j] {
            j += 1;
        } else {
            unmatched.push(i);
            i += 1;
        }
    }
    unmatched
}

fn classify_methods(
    before: &Snapshot,
    after: &Snapshot,
    matches: &EntityMatches,
    found: &mut BTreeSet<RefactoringInstance>,
) {
    for pair in &matches.methods {
        let (bm, am) = (pair.before.decl, pair.after.decl);
        let (bc, ac) = (pair.before.owner.decl, pair.after.owner.decl);
        let bl = || {
            vec![CodeLocation::new(
                pair.before.owner.path,
                EntityKind::Method,
                pair.before.qualified_name(),
            )]
        };
        let al = || {
            vec![CodeLocation::new(
                pair.after.owner.path,
                EntityKind::Method,
                pair.after.qualified_name(),
            )]
        };

        if !matches.corresponds(&bc.qualified_name, &ac.qualified_name) {
            let (kind, verb) = if extends_transitively(after, ac, &bc.name) {
                (RefactoringType::PushDownMethod, "Push Down Method")
            } else if extends_transitively(before, bc, &ac.name) {
                (RefactoringType::PullUpMethod, "Pull Up Method")
            } else {
                (RefactoringType::MoveMethod, "Move Method")
            };
            found.insert(instance(
                kind,
                format!(
                    "{verb} {} from class {} to {} from class {}",
                    bm.signature(),
                    bc.qualified_name,
                    am.signature(),
                    ac.qualified_name
                ),
                bl(),
                al(),
            ));
            continue;
        }

        if bm.name != am.name {
            found.insert(instance(
                RefactoringType::RenameMethod,
                format!(
                    "Rename Method {} renamed to {} in class {}",
                    bm.signature(),
                    am.signature(),
                    ac.qualified_name
                ),
                bl(),
                al(),
            ));
        } else if bm.parameter_types != am.parameter_types {
            let (b_params, a_params) = (&bm.parameter_types, &am.parameter_types);
            let (kind, verb, positions, params) = if a_params.len() > b_params.len() {
                let pos = unmatched_positions(a_params, b_params);
                (RefactoringType::AddParameter, "Add Parameter", pos, a_params)
            } else {
                let pos = unmatched_positions(b_params, a_params);
                (RefactoringType::RemoveParameter, "Remove Parameter", pos, b_params)
            };
            let delta = a_params.len().abs_diff(b_params.len());
            for &position in positions.iter().take(delta) {
                found.insert(instance(
                    kind.clone(),
                    format!(
                        "{verb} {} at position {position} in method {} of class {}",
                        params[position],
                        am.signature(),
                        ac.qualified_name
                    ),
                    bl(),
                    al(),
                ));
            }
        }
        if bm.access_modifier != am.access_modifier {
            found.insert(instance(
                RefactoringType::ChangeMethodAccessModifier,
                format!(
                    "Change Access Modifier {} to {} in method {} of class {}",
                    bm.access_modifier,
                    am.access_modifier,
                    am.signature(),
                    ac.qualified_name
                ),
                bl(),
                al(),
            ));
        }
    }
}

fn classify_attributes(matches: &EntityMatches, found: &mut BTreeSet<RefactoringInstance>) {
    for pair in &matches.attributes {
        let (ba, aa) = (pair.before.decl, pair.after.decl);
        let (bc, ac) = (pair.before.owner.decl, pair.after.owner.decl);
        let bl = || {
            vec![CodeLocation::new(
                pair.before.owner.path,
                EntityKind::Attribute,
                pair.before.qualified_name(),
            )]
        };
        let al = || {
            vec![CodeLocation::new(
                pair.after.owner.path,
                EntityKind::Attribute,
                pair.after.qualified_name(),
            )]
        };
        if !matches.corresponds(&bc.qualified_name, &ac.qualified_name) {
            found.insert(instance(
                RefactoringType::MoveAttribute,
                format!(
                    "Move Attribute {} {} from class {} to {} {} from class {}",
                    ba.type_name, ba.name, bc.qualified_name, aa.type_name, aa.name, ac.qualified_name
                ),
                bl(),
                al(),
            ));
            continue;
        }
        if ba.name != aa.name {
            found.insert(instance(
                RefactoringType::RenameAttribute,
                format!(
                    "Rename Attribute {} to {} in class {}",
                    ba.name, aa.name, ac.qualified_name
                ),
                bl(),
                al(),
            ));
        }
        if ba.access_modifier != aa.access_modifier {
            found.insert(instance(
                RefactoringType::ChangeAttributeAccessModifier,
                format!(
                    "Change Access Modifier {} to {} in attribute {} of class {}",
                    ba.access_modifier, aa.access_modifier, aa.name, ac.qualified_name
                ),
                bl(),
                al(),
            ));
        }
    }
}

struct PackageOutcome {
    instances: Vec<RefactoringInstance>,
    /// Before-qualified names of classes absorbed by a Move Package.
    suppressed_classes: Vec<String>,
}

/// Package-level rules derived from where each before-package's classes
/// ended up.
fn package_rules(before: &Snapshot, after: &Snapshot, matches: &EntityMatches) -> PackageOutcome {
    let before_packages = before.packages();
    let after_packages = after.packages();
    let is_new = |p: &str| !before_packages.contains(p);
    let is_gone = |p: &str| !after_packages.contains(p);

    // Package -> (class qualified name, file) on each side.
    let mut members: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for (path, class) in before.classes() {
        members
            .entry(class.package())
            .or_default()
            .push((class.qualified_name.as_str(), path));
    }

    // For each before package whose every class was matched: where they went.
    let mut targets: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut incoming: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut fully_mapped = BTreeSet::new();
    for (&package, classes) in &members {
        let mut all = true;
        for &(name, _) in classes {
            match matches.class_image.get(name) {
                Some(image) => {
                    let target = crate::model::package_of(image);
                    targets.entry(package).or_default().insert(target);
                    incoming.entry(target).or_default().insert(package);
                }
                None => all = false,
            }
        }
        if all {
            fully_mapped.insert(package);
        }
    }

    let package_locations = |snapshot: &Snapshot, package: &str, names: &mut dyn Iterator<Item = &str>| {
        let mut locs: Vec<CodeLocation> = names
            .filter_map(|n| snapshot.class(n))
            .filter(|(_, c)| c.package() == package)
            .map(|(path, _)| CodeLocation::new(path, EntityKind::Package, package))
            .collect();
        locs.sort();
        locs.dedup();
        locs
    };
    let images_of = |package: &str| -> Vec<&str> {
        members[package]
            .iter()
            .filter_map(|(name, _)| matches.class_image.get(name).copied())
            .collect()
    };
    let before_locs = |package: &str| {
        package_locations(before, package, &mut members[package].iter().map(|(n, _)| *n))
    };

    let mut out = PackageOutcome {
        instances: Vec::new(),
        suppressed_classes: Vec::new(),
    };
    let empty = BTreeSet::new();

    for &package in &fully_mapped {
        if !is_gone(package) {
            continue;
        }
        let dests = targets.get(package).unwrap_or(&empty);
        if dests.len() == 1 {
            let dest = *dests.iter().next().expect("one target");
            let sources = incoming.get(dest).unwrap_or(&empty);
            if is_new(dest) && sources.len() == 1 {
                let after_locs = package_locations(after, dest, &mut images_of(package).into_iter());
                out.instances.push(instance(
                    RefactoringType::MovePackage,
                    format!("Move Package {package} to {dest}"),
                    before_locs(package),
                    after_locs,
                ));
                out.suppressed_classes
                    .extend(members[package].iter().map(|(n, _)| n.to_string()));
            }
        } else if dests.len() >= 2 && dests.iter().any(|d| is_new(d)) {
            let mut after_locs = Vec::new();
            for dest in dests {
                after_locs.extend(package_locations(after, dest, &mut images_of(package).into_iter()));
            }
            after_locs.sort();
            out.instances.push(instance(
                RefactoringType::SplitPackage,
                format!(
                    "Split Package {package} to [{}]",
                    dests.iter().copied().collect::<Vec<_>>().join(", ")
                ),
                before_locs(package),
                after_locs,
            ));
        }
    }

    for (&dest, sources) in &incoming {
        if !is_new(dest) || sources.len() < 2 {
            continue;
        }
        let merges = sources.iter().all(|&p| {
            fully_mapped.contains(p)
                && is_gone(p)
                && targets.get(p).is_some_and(|t| t.len() == 1)
        });
        if !merges {
            continue;
        }
        let mut before_all = Vec::new();
        let mut images = Vec::new();
        for &source in sources {
            before_all.extend(before_locs(source));
            images.extend(images_of(source));
        }
        before_all.sort();
        out.instances.push(instance(
            RefactoringType::MergePackage,
            format!(
                "Merge Package [{}] to {dest}",
                sources.iter().copied().collect::<Vec<_>>().join(", ")
            ),
            before_all,
            package_locations(after, dest, &mut images.into_iter()),
        ));
    }
    out
}
