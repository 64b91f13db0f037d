//! Shared generators and a reference LTL evaluator for integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;

use edtl_cnl::ltl::{Atom, LassoTrace, LtlFormula};
use edtl_cnl::propexpr::{CmpOp, PropExpr, Valuation};

pub const BOOL_ATOMS: [&str; 4] = ["a", "b", "c", "d"];

/// Reference semantics on `prefix · loop^ω`, written directly from the
/// textbook definitions. Every position reachable from `i` appears within
/// `len` steps, so each quantifier over the future ranges over `0..len`.
pub fn reference_eval(f: &LtlFormula, t: &LassoTrace) -> bool {
    holds(f, t, 0)
}

fn position(t: &LassoTrace, j: usize) -> usize {
    let (p, l) = (t.prefix.len(), t.cycle.len());
    if j < p {
        j
    } else {
        p + (j - p) % l
    }
}

fn holds(f: &LtlFormula, t: &LassoTrace, i: usize) -> bool {
    let n = t.len();
    let at = |k: usize| position(t, i + k);
    match f {
        LtlFormula::True => true,
        LtlFormula::False => false,
        LtlFormula::Atom(a) => a.eval(&t.step(i).valuation()).expect("atom bound"),
        LtlFormula::Not(g) => !holds(g, t, i),
        LtlFormula::And(g, h) => holds(g, t, i) && holds(h, t, i),
        LtlFormula::Or(g, h) => holds(g, t, i) || holds(h, t, i),
        LtlFormula::Implies(g, h) => !holds(g, t, i) || holds(h, t, i),
        LtlFormula::X(g) => holds(g, t, at(1)),
        LtlFormula::G(g) => (0..n).all(|k| holds(g, t, at(k))),
        LtlFormula::F(g) => (0..n).any(|k| holds(g, t, at(k))),
        LtlFormula::U(g, h) => until(g, h, t, i),
        LtlFormula::W(g, h) => (0..n).all(|k| holds(g, t, at(k))) || until(g, h, t, i),
    }
}

fn until(g: &LtlFormula, h: &LtlFormula, t: &LassoTrace, i: usize) -> bool {
    for k in 0..t.len() {
        let j = position(t, i + k);
        if holds(h, t, j) {
            return true;
        }
        if !holds(g, t, j) {
            return false;
        }
    }
    false
}

pub fn atom(name: &str) -> LtlFormula {
    LtlFormula::Atom(Atom::Var(name.to_string()))
}

/// Formulas over `atoms` with at most `depth` nested operators.
pub fn formula(atoms: &'static [&'static str], depth: u32) -> BoxedStrategy<LtlFormula> {
    let leaf = prop_oneof![
        6 => proptest::sample::select(atoms).prop_map(atom),
        1 => Just(LtlFormula::True),
        1 => Just(LtlFormula::False),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        let b = |f: LtlFormula| Box::new(f);
        prop_oneof![
            inner.clone().prop_map(move |f| LtlFormula::Not(b(f))),
            inner.clone().prop_map(move |f| LtlFormula::G(b(f))),
            inner.clone().prop_map(move |f| LtlFormula::F(b(f))),
            inner.clone().prop_map(move |f| LtlFormula::X(b(f))),
            (inner.clone(), inner.clone()).prop_map(move |(f, g)| LtlFormula::And(b(f), b(g))),
            (inner.clone(), inner.clone()).prop_map(move |(f, g)| LtlFormula::Or(b(f), b(g))),
            (inner.clone(), inner.clone()).prop_map(move |(f, g)| LtlFormula::Implies(b(f), b(g))),
            (inner.clone(), inner.clone()).prop_map(move |(f, g)| LtlFormula::U(b(f), b(g))),
            (inner.clone(), inner).prop_map(move |(f, g)| LtlFormula::W(b(f), b(g))),
        ]
    })
    .boxed()
}

fn valuation_strategy(atoms: &'static [&'static str]) -> impl Strategy<Value = Valuation> {
    proptest::collection::vec(any::<bool>(), atoms.len()).prop_map(move |bits| {
        let mut v = Valuation::new();
        for (name, bit) in atoms.iter().zip(bits) {
            v.set_bool(*name, bit);
        }
        v
    })
}

pub fn lasso(atoms: &'static [&'static str]) -> impl Strategy<Value = LassoTrace> {
    (
        proptest::collection::vec(valuation_strategy(atoms), 0..4),
        proptest::collection::vec(valuation_strategy(atoms), 1..4),
    )
        .prop_map(|(p, l)| LassoTrace::new(p, l))
}

/// A lasso drawn from `rng`, prefix and loop up to `max` steps each.
pub fn random_lasso(rng: &mut impl Rng, atoms: &[&str], max: usize) -> LassoTrace {
    let p = rng.gen_range(0..=max);
    let l = rng.gen_range(1..=max);
    let mut steps = |n: usize| -> Vec<Valuation> {
        (0..n)
            .map(|_| {
                let mut v = Valuation::new();
                for a in atoms {
                    v.set_bool(*a, rng.gen());
                }
                v
            })
            .collect()
    };
    let prefix = steps(p);
    let cycle = steps(l);
    LassoTrace::new(prefix, cycle)
}

const PROP_VARS: [&str; 4] = ["x", "y", "door", "hand_1"];
const INT_VARS: [&str; 2] = ["t", "speed"];

pub fn prop_expr() -> impl Strategy<Value = PropExpr> {
    let op = proptest::sample::select(vec![
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Ge,
        CmpOp::Gt,
    ]);
    let leaf = prop_oneof![
        1 => any::<bool>().prop_map(PropExpr::Const),
        4 => proptest::sample::select(&PROP_VARS[..]).prop_map(PropExpr::var),
        2 => (proptest::sample::select(&INT_VARS[..]), op, -50i64..50)
            .prop_map(|(n, op, k)| PropExpr::Compare(n.to_string(), op, k)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PropExpr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropExpr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PropExpr::or(a, b)),
        ]
    })
}

/// Expressions that do not fold to a constant, usable as slot contents.
pub fn slot_expr() -> impl Strategy<Value = PropExpr> {
    prop_expr().prop_filter("non-constant", |e| {
        !matches!(e.fold_constants(), PropExpr::Const(_))
    })
}

pub fn prop_valuation() -> impl Strategy<Value = Valuation> {
    (
        proptest::collection::vec(any::<bool>(), PROP_VARS.len()),
        proptest::collection::vec(-60i64..60, INT_VARS.len()),
    )
        .prop_map(|(bits, ints)| {
            let mut v = Valuation::new();
            for (n, b) in PROP_VARS.iter().zip(bits) {
                v.set_bool(*n, b);
            }
            for (n, i) in INT_VARS.iter().zip(ints) {
                v.set_int(*n, i);
            }
            v
        })
}

/// Quoted slot contents of a phrase.
pub fn quoted(phrase: &str) -> Vec<String> {
    phrase
        .split('\'')
        .skip(1)
        .step_by(2)
        .map(str::to_string)
        .collect()
}
