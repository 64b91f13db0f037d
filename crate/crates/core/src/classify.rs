//! Partition of all attribute combinations into semantic classes.
//!
//! Each combination is instantiated with its own abbreviation atoms,
//! simplified and canonically renamed. Combinations with structurally equal
//! results form a group. Groups with the same number of atoms are then
//! compared under every atom bijection with the bounded equivalence oracle
//! and merged when one bijection makes them equivalent.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edtl::{enumerate_combinations, AttributeCombination, AttributeName, Tristate};
use crate::ltl::{
    canonical_rename, check_equiv, simplify, substitute, Binding, EquivVerdict, LassoTrace,
    LtlFormula, OracleBounds,
};

/// Class count reported for the pattern's semantic classification.
pub const EXPECTED_CLASS_COUNT: usize = 32;

/// Attribute order scanned when picking a class representative.
pub const REPRESENTATIVE_SCAN: [AttributeName; 6] = [
    AttributeName::Trigger,
    AttributeName::Reaction,
    AttributeName::Release,
    AttributeName::Invariant,
    AttributeName::Final,
    AttributeName::Delay,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMember {
    pub combination: AttributeCombination,
    /// Abbreviation atom of the member (`trig`, `rea`, …) to the atom of the
    /// class's canonical formula (`a1`, `a2`, …).
    pub atoms: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticClass {
    #[serde(rename = "id")]
    pub class_id: usize,
    pub representative: AttributeCombination,
    pub canonical_formula: LtlFormula,
    pub members: Vec<ClassMember>,
}

impl SemanticClass {
    pub fn member(&self, c: &AttributeCombination) -> Option<&ClassMember> {
        self.members.iter().find(|m| m.combination == *c)
    }

    pub fn combinations(&self) -> impl Iterator<Item = AttributeCombination> + '_ {
        self.members.iter().map(|m| m.combination)
    }

    /// Number of distinct atoms in the canonical formula.
    pub fn atom_count(&self) -> usize {
        self.canonical_formula.atoms().len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Discrepancy {
    /// Two structural groups were merged under an atom bijection.
    Merge {
        class_id: usize,
        group: AttributeCombination,
        into: AttributeCombination,
        bijection: BTreeMap<String, String>,
        prefix_bound: usize,
        loop_bound: usize,
        sampled_count: usize,
    },
    /// Two classes with equal atom counts that no bijection makes equivalent.
    /// The witness separates the canonical formulas under the identity
    /// bijection.
    Distinct {
        classes: [usize; 2],
        bijections_refuted: usize,
        witness: LassoTrace,
    },
    OracleLimit {
        groups: [AttributeCombination; 2],
        note: String,
    },
    CountMismatch {
        expected: usize,
        found: usize,
    },
    /// A class whose formula is a constant. Any combination with a false
    /// trigger ends up in the `true` class.
    Constant {
        class_id: usize,
        formula: LtlFormula,
        members: usize,
        trigger_false: usize,
    },
    /// Classes whose members all have trigger = true fire at every step and
    /// stay apart from their variable-trigger counterparts. Also counts the
    /// classes with a variable-trigger representative and a non-constant
    /// formula.
    Trigger {
        trigger_true_classes: Vec<usize>,
        variable_trigger_nonconstant: usize,
    },
    /// The oracle finds the class formula unchanged when `atom` is fixed to
    /// `value`. Merges never cross atom counts, so such a class stays apart
    /// from the class of `reduced`.
    VacuousAtom {
        class_id: usize,
        atom: String,
        value: bool,
        reduced: LtlFormula,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub oracle_bounds: OracleBounds,
    pub classes: Vec<SemanticClass>,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("combination {0} is not covered by the classification report")]
    NotCovered(AttributeCombination),
    #[error("combination {0} appears in more than one class")]
    Duplicate(AttributeCombination),
    #[error("class ids must be dense from 1, found {0}")]
    ClassId(usize),
    #[error("class {0} has no members or its representative is not a member")]
    Representative(usize),
    #[error("malformed classification report: {0}")]
    Json(#[from] serde_json::Error),
}

impl ClassificationReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, id: usize) -> Option<&SemanticClass> {
        id.checked_sub(1).and_then(|i| self.classes.get(i))
    }

    pub fn matches_expected_count(&self) -> bool {
        self.class_count() == EXPECTED_CLASS_COUNT
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses and validates a report.
    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        let report: ClassificationReport = serde_json::from_str(text)?;
        report.validate()?;
        Ok(report)
    }

    /// Checks that the classes partition all combinations with dense ids.
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let mut seen = BTreeMap::new();
        for (i, class) in self.classes.iter().enumerate() {
            if class.class_id != i + 1 {
                return Err(ClassifyError::ClassId(class.class_id));
            }
            if class.member(&class.representative).is_none() {
                return Err(ClassifyError::Representative(class.class_id));
            }
            for c in class.combinations() {
                if seen.insert(c, class.class_id).is_some() {
                    return Err(ClassifyError::Duplicate(c));
                }
            }
        }
        for c in enumerate_combinations() {
            if !seen.contains_key(&c) {
                return Err(ClassifyError::NotCovered(c));
            }
        }
        Ok(())
    }
}

pub fn canonical_class<'r>(
    c: &AttributeCombination,
    report: &'r ClassificationReport,
) -> Result<&'r SemanticClass, ClassifyError> {
    report
        .classes
        .iter()
        .find(|class| class.member(c).is_some())
        .ok_or(ClassifyError::NotCovered(*c))
}

fn scan_key(c: &AttributeCombination) -> [Tristate; 6] {
    REPRESENTATIVE_SCAN.map(|a| c.get(a))
}

/// Lexicographic minimum over (trigger, reaction, release, invariant, final,
/// delay) with `Var < True < False`.
///
/// # Panics
/// If `members` is empty.
pub fn representative_of(members: &[AttributeCombination]) -> AttributeCombination {
    *members
        .iter()
        .min_by_key(|c| scan_key(c))
        .expect("representative_of needs at least one member")
}

struct Group {
    formula: LtlFormula,
    atoms: usize,
    /// Member and its abbreviation → group canonical atom map.
    members: Vec<(AttributeCombination, BTreeMap<String, String>)>,
}

enum PairOutcome {
    Equivalent {
        bijection: BTreeMap<String, String>,
        verdict: EquivVerdict,
    },
    Distinct {
        refuted: usize,
    },
    Limit(String),
}

fn canonical_atoms(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("a{i}")).collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("pivot");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Tries every bijection from `g`'s atoms onto `f`'s, identity first.
fn compare_groups(f: &Group, g: &Group, bounds: &OracleBounds) -> PairOutcome {
    let names = canonical_atoms(f.atoms);
    let mut perm: Vec<usize> = (0..f.atoms).collect();
    let mut refuted = 0;
    loop {
        let bijection: BTreeMap<String, String> = names
            .iter()
            .zip(&perm)
            .map(|(from, &to)| (from.clone(), names[to].clone()))
            .collect();
        match check_equiv(&f.formula, &g.formula.rename(&bijection), bounds) {
            Ok(verdict @ EquivVerdict::EquivalentUpToBound { .. }) => {
                return PairOutcome::Equivalent { bijection, verdict }
            }
            Ok(EquivVerdict::Counterexample(_)) => refuted += 1,
            Err(e) => return PairOutcome::Limit(e.to_string()),
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    PairOutcome::Distinct { refuted }
}

struct Pending {
    root: usize,
    other: usize,
    outcome: PairOutcome,
}

pub fn classify_all(bounds: &OracleBounds) -> ClassificationReport {
    let combinations = enumerate_combinations();
    let reduced: Vec<(LtlFormula, BTreeMap<String, String>)> = combinations
        .par_iter()
        .map(|c| canonical_rename(&c.semantics()).expect("abbreviation atoms are plain names"))
        .collect();

    let mut groups: Vec<Group> = Vec::new();
    let mut index: BTreeMap<&LtlFormula, usize> = BTreeMap::new();
    for (c, (formula, map)) in combinations.iter().zip(&reduced) {
        let gi = *index.entry(formula).or_insert_with(|| {
            groups.push(Group {
                formula: formula.clone(),
                atoms: formula.atoms().len(),
                members: Vec::new(),
            });
            groups.len() - 1
        });
        groups[gi].members.push((*c, map.clone()));
    }

    // root[j] is the group that j was merged into; roots point to themselves.
    // A group only merges into an earlier root, so chains never form.
    let mut root: Vec<usize> = (0..groups.len()).collect();
    let mut bijection_to_root: Vec<BTreeMap<String, String>> = groups
        .iter()
        .map(|g| {
            canonical_atoms(g.atoms)
                .into_iter()
                .map(|a| (a.clone(), a))
                .collect()
        })
        .collect();
    let mut outcomes: Vec<Pending> = Vec::new();
    for i in 0..groups.len() {
        if root[i] != i {
            continue;
        }
        let candidates: Vec<usize> = (i + 1..groups.len())
            .filter(|&j| root[j] == j && groups[j].atoms == groups[i].atoms)
            .collect();
        let results: Vec<PairOutcome> = candidates
            .par_iter()
            .map(|&j| compare_groups(&groups[i], &groups[j], bounds))
            .collect();
        for (j, outcome) in candidates.into_iter().zip(results) {
            if let PairOutcome::Equivalent { bijection, .. } = &outcome {
                root[j] = i;
                bijection_to_root[j] = bijection.clone();
            }
            outcomes.push(Pending {
                root: i,
                other: j,
                outcome,
            });
        }
    }

    let mut classes: Vec<SemanticClass> = Vec::new();
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let roots: Vec<usize> = (0..groups.len()).filter(|&i| root[i] == i).collect();
    let mut assembled: Vec<(usize, SemanticClass)> = roots
        .iter()
        .map(|&r| (r, assemble_class(r, &groups, &root, &bijection_to_root)))
        .collect();
    assembled.sort_by_key(|a| a.1.representative);
    for (id, (r, mut class)) in assembled.into_iter().enumerate() {
        class.class_id = id + 1;
        class_of_root.insert(r, id + 1);
        classes.push(class);
    }

    let lead = |g: usize| groups[g].members[0].0;
    let mut discrepancies = Vec::new();
    let mut separated: Vec<([usize; 2], usize)> = Vec::new();
    for p in outcomes {
        match p.outcome {
            PairOutcome::Equivalent { bijection, verdict } => {
                let EquivVerdict::EquivalentUpToBound {
                    prefix_bound,
                    loop_bound,
                    sampled_count,
                } = verdict
                else {
                    unreachable!("merge outcomes carry an equivalence verdict")
                };
                discrepancies.push(Discrepancy::Merge {
                    class_id: class_of_root[&p.root],
                    group: lead(p.other),
                    into: lead(p.root),
                    bijection,
                    prefix_bound,
                    loop_bound,
                    sampled_count,
                });
            }
            // A refuted group may merge into a later root; the evidence
            // that matters is the pair of final classes.
            PairOutcome::Distinct { .. } if root[p.other] != p.other => {}
            PairOutcome::Distinct { refuted, .. } => {
                let mut pair = [class_of_root[&p.root], class_of_root[&p.other]];
                pair.sort_unstable();
                separated.push((pair, refuted));
            }
            PairOutcome::Limit(note) => discrepancies.push(Discrepancy::OracleLimit {
                groups: [lead(p.root), lead(p.other)],
                note,
            }),
        }
    }
    // Group formulas and class formulas name their atoms differently, so
    // the witness is searched again between the class formulas.
    let witnesses: Vec<Discrepancy> = separated
        .par_iter()
        .map(|&([i, j], refuted)| {
            let (f, g) = (&classes[i - 1].canonical_formula, &classes[j - 1].canonical_formula);
            match check_equiv(f, g, bounds) {
                Ok(EquivVerdict::Counterexample(witness)) => Discrepancy::Distinct {
                    classes: [i, j],
                    bijections_refuted: refuted,
                    witness,
                },
                Ok(_) => Discrepancy::OracleLimit {
                    groups: [classes[i - 1].representative, classes[j - 1].representative],
                    note: "every bijection was refuted between the groups but not between the class formulas".into(),
                },
                Err(e) => Discrepancy::OracleLimit {
                    groups: [classes[i - 1].representative, classes[j - 1].representative],
                    note: e.to_string(),
                },
            }
        })
        .collect();
    discrepancies.extend(witnesses);
    for class in &classes {
        if class.canonical_formula.is_constant() {
            discrepancies.push(Discrepancy::Constant {
                class_id: class.class_id,
                formula: class.canonical_formula.clone(),
                members: class.members.len(),
                trigger_false: class
                    .combinations()
                    .filter(|c| c.get(AttributeName::Trigger) == Tristate::False)
                    .count(),
            });
        }
    }
    discrepancies.push(Discrepancy::Trigger {
        trigger_true_classes: classes
            .iter()
            .filter(|c| {
                c.combinations()
                    .all(|m| m.get(AttributeName::Trigger) == Tristate::True)
            })
            .map(|c| c.class_id)
            .collect(),
        variable_trigger_nonconstant: classes
            .iter()
            .filter(|c| {
                c.representative.get(AttributeName::Trigger) == Tristate::Var
                    && !c.canonical_formula.is_constant()
            })
            .count(),
    });
    let vacuous: Vec<Vec<Discrepancy>> = classes
        .par_iter()
        .map(|c| vacuous_atoms(c, bounds))
        .collect();
    discrepancies.extend(vacuous.into_iter().flatten());
    if classes.len() != EXPECTED_CLASS_COUNT {
        discrepancies.push(Discrepancy::CountMismatch {
            expected: EXPECTED_CLASS_COUNT,
            found: classes.len(),
        });
    }

    ClassificationReport {
        oracle_bounds: *bounds,
        classes,
        discrepancies,
    }
}

fn vacuous_atoms(class: &SemanticClass, bounds: &OracleBounds) -> Vec<Discrepancy> {
    let f = &class.canonical_formula;
    let mut out = Vec::new();
    for atom in f.atom_names() {
        for value in [true, false] {
            let binding = BTreeMap::from([(atom.clone(), Binding::Const(value))]);
            let reduced = simplify(&substitute(f, &binding));
            if matches!(check_equiv(f, &reduced, bounds), Ok(v) if v.is_equivalent()) {
                out.push(Discrepancy::VacuousAtom {
                    class_id: class.class_id,
                    atom,
                    value,
                    reduced,
                });
                break;
            }
        }
    }
    out
}

fn assemble_class(
    r: usize,
    groups: &[Group],
    root: &[usize],
    bijection_to_root: &[BTreeMap<String, String>],
) -> SemanticClass {
    // Member abbreviation atoms → atoms of the root group's formula.
    let mut members: Vec<(AttributeCombination, BTreeMap<String, String>)> = Vec::new();
    let mut group_of = BTreeMap::new();
    for (gi, g) in groups.iter().enumerate().filter(|(gi, _)| root[*gi] == r) {
        for (c, map) in &g.members {
            let to_root = map
                .iter()
                .map(|(abbr, a)| (abbr.clone(), bijection_to_root[gi][a].clone()))
                .collect();
            members.push((*c, to_root));
            group_of.insert(*c, gi);
        }
    }
    members.sort_by_key(|a| a.0);
    let combos: Vec<AttributeCombination> = members.iter().map(|m| m.0).collect();
    let representative = representative_of(&combos);
    let rep_group = group_of[&representative];
    let rep_direct = &groups[rep_group]
        .members
        .iter()
        .find(|m| m.0 == representative)
        .expect("representative is in its group")
        .1;
    let rep_to_root = &members
        .iter()
        .find(|m| m.0 == representative)
        .expect("representative is a member")
        .1;
    // Root atoms → the representative's own canonical atoms.
    let root_to_class: BTreeMap<String, String> = rep_to_root
        .iter()
        .map(|(abbr, a)| (a.clone(), rep_direct[abbr].clone()))
        .collect();
    let members = members
        .into_iter()
        .map(|(combination, to_root)| ClassMember {
            combination,
            atoms: to_root
                .into_iter()
                .map(|(abbr, a)| {
                    let class_atom = root_to_class[&a].clone();
                    (abbr, class_atom)
                })
                .collect(),
        })
        .collect();
    SemanticClass {
        class_id: 0,
        representative,
        canonical_formula: groups[rep_group].formula.clone(),
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> AttributeCombination {
        s.parse().unwrap()
    }

    #[test]
    fn representative_scan_order() {
        let a = key("vtttvf");
        let b = key("vvttt f".replace(' ', "").as_str());
        assert_eq!(representative_of(&[b, a]), a);
        assert_eq!(representative_of(&[a]), a);
        assert_eq!(
            representative_of(&[key("ffffff"), AttributeCombination::all_var()]),
            AttributeCombination::all_var()
        );
    }

    #[test]
    fn permutations_are_complete() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }
}
