//! Two-phase entity matching between a before and an after snapshot.
//!
//! Phase 1 pairs entities by identity: classes by qualified name, members by
//! signature (methods) or name (attributes) inside corresponding classes. A
//! method left over in a corresponding class pair is also paired when its
//! name is unique on both sides, which is how parameter changes surface.
//! Phase 2 pairs the leftovers of each kind greedily by descending Dice
//! similarity, ties broken by (before name, after name).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::similarity::similarity;
use super::types::{EntityKind, Threshold};
use crate::model::{AttributeDecl, ClassDecl, MethodDecl, Snapshot, TokenBag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchPhase {
    Exact,
    Name,
    Similarity,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub qualified_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub before_entity: EntityRef,
    pub after_entity: EntityRef,
    pub similarity: f64,
    pub phase: MatchPhase,
}

/// One greedy assignment solved during phase 2, kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    pub kind: EntityKind,
    pub before: Vec<String>,
    pub after: Vec<String>,
    /// `similarities[i][j]` between `before[i]` and `after[j]`.
    pub similarities: Vec<Vec<f64>>,
    pub threshold: f64,
    pub chosen: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ClassEntity<'s> {
    pub path: &'s str,
    pub decl: &'s ClassDecl,
}

#[derive(Debug)]
pub(crate) struct MemberEntity<'s, T> {
    pub owner: ClassEntity<'s>,
    pub decl: &'s T,
}

impl<T> Clone for MemberEntity<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for MemberEntity<'_, T> {}

impl<'s> MemberEntity<'s, MethodDecl> {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.owner.decl.qualified_name, self.decl.signature())
    }
}

impl<'s> MemberEntity<'s, AttributeDecl> {
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.owner.decl.qualified_name, self.decl.name)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Pair<E> {
    pub before: E,
    pub after: E,
    pub similarity: f64,
    pub phase: MatchPhase,
}

pub(crate) struct EntityMatches<'s> {
    pub classes: Vec<Pair<ClassEntity<'s>>>,
    pub methods: Vec<Pair<MemberEntity<'s, MethodDecl>>>,
    pub attributes: Vec<Pair<MemberEntity<'s, AttributeDecl>>>,
    /// Before class qualified name -> matched after class qualified name.
    pub class_image: BTreeMap<&'s str, &'s str>,
    pub problems: Vec<AssignmentProblem>,
}

impl EntityMatches<'_> {
    pub fn corresponds(&self, before_class: &str, after_class: &str) -> bool {
        self.class_image.get(before_class) == Some(&after_class)
    }

    pub fn to_pairs(&self) -> Vec<MatchPair> {
        let mut pairs = Vec::new();
        let entity = |kind, qualified_name| EntityRef {
            kind,
            qualified_name,
        };
        for p in &self.classes {
            pairs.push(MatchPair {
                before_entity: entity(EntityKind::Class, p.before.decl.qualified_name.clone()),
                after_entity: entity(EntityKind::Class, p.after.decl.qualified_name.clone()),
                similarity: p.similarity,
                phase: p.phase,
            });
        }
        for p in &self.methods {
            pairs.push(MatchPair {
                before_entity: entity(EntityKind::Method, p.before.qualified_name()),
                after_entity: entity(EntityKind::Method, p.after.qualified_name()),
                similarity: p.similarity,
                phase: p.phase,
            });
        }
        for p in &self.attributes {
            pairs.push(MatchPair {
                before_entity: entity(EntityKind::Attribute, p.before.qualified_name()),
                after_entity: entity(EntityKind::Attribute, p.after.qualified_name()),
                similarity: p.similarity,
                phase: p.phase,
            });
        }
        pairs.sort_by(|a, b| {
            (&a.before_entity, &a.after_entity).cmp(&(&b.before_entity, &b.after_entity))
        });
        pairs
    }
}

/// Matches classes, methods and attributes between two snapshots. Every
/// entity appears in at most one pair.
pub fn match_entities(before: &Snapshot, after: &Snapshot, threshold: Threshold) -> Vec<MatchPair> {
    match_all(before, after, threshold).to_pairs()
}

/// Like [`match_entities`], also returning the phase-2 assignment problems.
pub fn match_entities_traced(
    before: &Snapshot,
    after: &Snapshot,
    threshold: Threshold,
) -> (Vec<MatchPair>, Vec<AssignmentProblem>) {
    let matches = match_all(before, after, threshold);
    let pairs = matches.to_pairs();
    (pairs, matches.problems)
}

/// Greedy assignment over all candidate pairs at or above `threshold`,
/// highest similarity first, ties by (before name, after name).
pub fn greedy_assign(
    before_names: &[String],
    after_names: &[String],
    similarities: &[Vec<f64>],
    threshold: f64,
) -> Vec<(usize, usize)> {
    let mut candidates = Vec::new();
    for (i, row) in similarities.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s >= threshold {
                candidates.push((i, j, s));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| before_names[a.0].cmp(&before_names[b.0]))
            .then_with(|| after_names[a.1].cmp(&after_names[b.1]))
    });
    let mut used_before = vec![false; before_names.len()];
    let mut used_after = vec![false; after_names.len()];
    let mut chosen = Vec::new();
    for (i, j, _) in candidates {
        if !used_before[i] && !used_after[j] {
            used_before[i] = true;
            used_after[j] = true;
            chosen.push((i, j));
        }
    }
    chosen
}

fn member_signatures(class: &ClassDecl) -> TokenBag {
    class
        .methods
        .iter()
        .map(MethodDecl::signature)
        .chain(class.attributes.iter().map(|a| a.name.clone()))
        .collect()
}

fn attribute_bag(attribute: &AttributeDecl) -> TokenBag {
    let mut bag = attribute.initializer_tokens.clone();
    bag.insert(attribute.type_name.clone());
    bag
}

fn solve<E: Copy>(
    kind: EntityKind,
    before: Vec<(String, E)>,
    after: Vec<(String, E)>,
    threshold: Threshold,
    score: impl Fn(&E, &E) -> f64,
    problems: &mut Vec<AssignmentProblem>,
) -> Vec<Pair<E>> {
    if before.is_empty() || after.is_empty() {
        return Vec::new();
    }
    let similarities: Vec<Vec<f64>> = before
        .iter()
        .map(|(_, b)| after.iter().map(|(_, a)| score(b, a)).collect())
        .collect();
    let before_names: Vec<String> = before.iter().map(|(n, _)| n.clone()).collect();
    let after_names: Vec<String> = after.iter().map(|(n, _)| n.clone()).collect();
    let chosen = greedy_assign(&before_names, &after_names, &similarities, threshold.value());
    let pairs = chosen
        .iter()
        .map(|&(i, j)| Pair {
            before: before[i].1,
            after: after[j].1,
            similarity: similarities[i][j],
            phase: MatchPhase::Similarity,
        })
        .collect();
    problems.push(AssignmentProblem {
        kind,
        before: before_names,
        after: after_names,
        similarities,
        threshold: threshold.value(),
        chosen,
    });
    pairs
}

pub(crate) fn match_all<'s>(
    before: &'s Snapshot,
    after: &'s Snapshot,
    threshold: Threshold,
) -> EntityMatches<'s> {
    let mut problems = Vec::new();

    // Classes.
    let mut classes = Vec::new();
    let mut removed = Vec::new();
    for (path, decl) in before.classes() {
        let entity = ClassEntity { path, decl };
        match after.class(&decl.qualified_name) {
            Some((after_path, after_decl)) => classes.push(Pair {
                before: entity,
                after: ClassEntity {
                    path: after_path,
                    decl: after_decl,
                },
                similarity: 1.0,
                phase: MatchPhase::Exact,
            }),
            None => removed.push((decl.qualified_name.clone(), entity)),
        }
    }
    let added: Vec<(String, ClassEntity)> = after
        .classes()
        .filter(|(_, c)| before.class(&c.qualified_name).is_none())
        .map(|(path, decl)| (decl.qualified_name.clone(), ClassEntity { path, decl }))
        .collect();
    classes.extend(solve(
        EntityKind::Class,
        removed,
        added,
        threshold,
        |b, a| similarity(&member_signatures(b.decl), &member_signatures(a.decl)),
        &mut problems,
    ));
    let class_image: BTreeMap<&str, &str> = classes
        .iter()
        .map(|p| {
            (
                p.before.decl.qualified_name.as_str(),
                p.after.decl.qualified_name.as_str(),
            )
        })
        .collect();

    // Members of corresponding classes, phase 1.
    let mut methods = Vec::new();
    let mut attributes = Vec::new();
    let mut used_before_methods = BTreeSet::new();
    let mut used_after_methods = BTreeSet::new();
    let mut used_before_attrs = BTreeSet::new();
    let mut used_after_attrs = BTreeSet::new();
    for pair in &classes {
        let (b, a) = (pair.before, pair.after);
        let key = |c: &ClassEntity, m: &str| (c.decl.qualified_name.clone(), m.to_string());

        for bm in &b.decl.methods {
            if let Some(am) = a.decl.method(&bm.signature()) {
                used_before_methods.insert(key(&b, &bm.signature()));
                used_after_methods.insert(key(&a, &am.signature()));
                methods.push(Pair {
                    before: MemberEntity { owner: b, decl: bm },
                    after: MemberEntity { owner: a, decl: am },
                    similarity: 1.0,
                    phase: MatchPhase::Exact,
                });
            }
        }
        // Leftovers whose name is unique on both sides.
        let leftover = |class: &ClassEntity<'s>, used: &BTreeSet<(String, String)>| {
            let mut by_name: BTreeMap<&'s str, Vec<&'s MethodDecl>> = BTreeMap::new();
            for m in &class.decl.methods {
                if !used.contains(&key(class, &m.signature())) {
                    by_name.entry(m.name.as_str()).or_default().push(m);
                }
            }
            by_name
        };
        let before_left = leftover(&b, &used_before_methods);
        let after_left = leftover(&a, &used_after_methods);
        for (name, bms) in &before_left {
            if let (&[bm], Some(&[am])) = (bms.as_slice(), after_left.get(name).map(Vec::as_slice)) {
                used_before_methods.insert(key(&b, &bm.signature()));
                used_after_methods.insert(key(&a, &am.signature()));
                methods.push(Pair {
                    before: MemberEntity { owner: b, decl: bm },
                    after: MemberEntity { owner: a, decl: am },
                    similarity: 1.0,
                    phase: MatchPhase::Name,
                });
            }
        }

        for ba in &b.decl.attributes {
            if let Some(aa) = a.decl.attribute(&ba.name) {
                used_before_attrs.insert(key(&b, &ba.name));
                used_after_attrs.insert(key(&a, &aa.name));
                attributes.push(Pair {
                    before: MemberEntity { owner: b, decl: ba },
                    after: MemberEntity { owner: a, decl: aa },
                    similarity: 1.0,
                    phase: MatchPhase::Exact,
                });
            }
        }
    }

    // Phase 2 over all leftover members.
    let left_methods = |snap: &'s Snapshot, used: &BTreeSet<(String, String)>| {
        let mut out = Vec::new();
        for (path, decl) in snap.classes() {
            let owner = ClassEntity { path, decl };
            for m in &decl.methods {
                if !used.contains(&(decl.qualified_name.clone(), m.signature())) {
                    let entity = MemberEntity { owner, decl: m };
                    out.push((entity.qualified_name(), entity));
                }
            }
        }
        out
    };
    methods.extend(solve(
        EntityKind::Method,
        left_methods(before, &used_before_methods),
        left_methods(after, &used_after_methods),
        threshold,
        |b, a| similarity(&b.decl.body_tokens, &a.decl.body_tokens),
        &mut problems,
    ));

    let left_attrs = |snap: &'s Snapshot, used: &BTreeSet<(String, String)>| {
        let mut out = Vec::new();
        for (path, decl) in snap.classes() {
            let owner = ClassEntity { path, decl };
            for attr in &decl.attributes {
                if !used.contains(&(decl.qualified_name.clone(), attr.name.clone())) {
                    let entity = MemberEntity { owner, decl: attr };
                    out.push((entity.qualified_name(), entity));
                }
            }
        }
        out
    };
    attributes.extend(solve(
        EntityKind::Attribute,
        left_attrs(before, &used_before_attrs),
        left_attrs(after, &used_after_attrs),
        threshold,
        |b, a| similarity(&attribute_bag(b.decl), &attribute_bag(a.decl)),
        &mut problems,
    ));

    EntityMatches {
        classes,
        methods,
        attributes,
        class_image,
        problems,
    }
}
