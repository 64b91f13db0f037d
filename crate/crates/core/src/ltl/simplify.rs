//! Rewrite-based simplifier.
//!
//! Rules are applied bottom-up and the whole pass is repeated until nothing
//! changes. Every rule shrinks the tree, so the loop terminates, and the
//! result contains `true`/`false` only as the entire formula.

use super::formula::LtlFormula;
use LtlFormula as L;

pub fn simplify(f: &LtlFormula) -> LtlFormula {
    let mut current = f.clone();
    loop {
        let next = pass(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn pass(f: &LtlFormula) -> LtlFormula {
    let node = match f {
        L::Atom(_) | L::True | L::False => return f.clone(),
        L::Not(g) => L::not(pass(g)),
        L::G(g) => L::globally(pass(g)),
        L::F(g) => L::eventually(pass(g)),
        L::X(g) => L::next(pass(g)),
        L::And(a, b) => L::and(pass(a), pass(b)),
        L::Or(a, b) => L::or(pass(a), pass(b)),
        L::Implies(a, b) => L::implies(pass(a), pass(b)),
        L::U(a, b) => L::until(pass(a), pass(b)),
        L::W(a, b) => L::weak_until(pass(a), pass(b)),
    };
    let mut node = node;
    while let Some(rewritten) = rewrite(&node) {
        node = rewritten;
    }
    node
}

/// One rewrite step at the root, or `None` when no rule applies.
fn rewrite(f: &LtlFormula) -> Option<LtlFormula> {
    Some(match f {
        L::Not(g) => match &**g {
            L::True => L::False,
            L::False => L::True,
            L::Not(h) => (**h).clone(),
            _ => return None,
        },
        L::And(a, b) => match (&**a, &**b) {
            (L::False, _) | (_, L::False) => L::False,
            (L::True, g) | (g, L::True) => g.clone(),
            _ => return reduce_chain(f, Chain::And),
        },
        L::Or(a, b) => match (&**a, &**b) {
            (L::True, _) | (_, L::True) => L::True,
            (L::False, g) | (g, L::False) => g.clone(),
            _ => return reduce_chain(f, Chain::Or).or_else(|| subsume_disjuncts(f)),
        },
        L::Implies(a, b) => match (&**a, &**b) {
            (L::True, g) => g.clone(),
            (L::False, _) | (_, L::True) => L::True,
            (g, L::False) => L::not(g.clone()),
            _ => return None,
        },
        L::G(g) => match &**g {
            L::True => L::True,
            L::False => L::False,
            L::G(_) => (**g).clone(),
            _ => return None,
        },
        L::F(g) => match &**g {
            L::True => L::True,
            L::False => L::False,
            L::F(_) => (**g).clone(),
            _ => return None,
        },
        L::X(g) => match &**g {
            L::True => L::True,
            L::False => L::False,
            _ => return None,
        },
        L::U(a, b) => match (&**a, &**b) {
            (_, L::True) => L::True,
            (_, L::False) => L::False,
            (L::False, g) => g.clone(),
            (L::True, g) => L::eventually(g.clone()),
            (f, g) if implies_pointwise(f, g) => g.clone(),
            _ => return None,
        },
        L::W(a, b) => match (&**a, &**b) {
            (_, L::True) | (L::True, _) => L::True,
            (L::False, g) => g.clone(),
            (g, L::False) => L::globally(g.clone()),
            (g, h) if excluded_middle(g, h) => L::True,
            (g, h) if implies_pointwise(g, h) => h.clone(),
            _ => return None,
        },
        L::Atom(_) | L::True | L::False => return None,
    })
}

fn collect_disjuncts<'a>(f: &'a LtlFormula, out: &mut Vec<&'a LtlFormula>) {
    match f {
        L::Or(a, b) => {
            collect_disjuncts(a, out);
            collect_disjuncts(b, out);
        }
        _ => out.push(f),
    }
}

fn collect_conjuncts<'a>(f: &'a LtlFormula, out: &mut Vec<&'a LtlFormula>) {
    match f {
        L::And(a, b) => {
            collect_conjuncts(a, out);
            collect_conjuncts(b, out);
        }
        _ => out.push(f),
    }
}

#[derive(Clone, Copy)]
enum Chain {
    And,
    Or,
}

fn complementary(a: &LtlFormula, b: &LtlFormula) -> bool {
    matches!(a, L::Not(x) if **x == *b) || matches!(b, L::Not(x) if **x == *a)
}

/// `f W (… | !f | …)` is valid: either `f` holds forever or it fails at a
/// position where `!f` discharges the until.
fn excluded_middle(f: &LtlFormula, g: &LtlFormula) -> bool {
    let mut disjuncts = Vec::new();
    collect_disjuncts(g, &mut disjuncts);
    disjuncts.iter().any(|d| complementary(f, d))
}

/// Syntactic check that `f` implies `g` at every position: some conjunct
/// of `f` is a disjunct of `g`. Then `f U g` and `f W g` both reduce to `g`.
fn implies_pointwise(f: &LtlFormula, g: &LtlFormula) -> bool {
    let mut conjuncts = Vec::new();
    collect_conjuncts(f, &mut conjuncts);
    let mut disjuncts = Vec::new();
    collect_disjuncts(g, &mut disjuncts);
    conjuncts.iter().any(|c| disjuncts.contains(c))
}

/// Idempotence, absorption and complements over a flattened `&` or `|`
/// chain. Returns `None` when the chain is already reduced.
fn reduce_chain(f: &LtlFormula, chain: Chain) -> Option<LtlFormula> {
    let collect = |g, out: &mut Vec<_>| match chain {
        Chain::And => collect_conjuncts(g, out),
        Chain::Or => collect_disjuncts(g, out),
    };
    let collect_dual = |g, out: &mut Vec<_>| match chain {
        Chain::And => collect_disjuncts(g, out),
        Chain::Or => collect_conjuncts(g, out),
    };
    let mut items = Vec::new();
    collect(f, &mut items);
    for (i, x) in items.iter().enumerate() {
        if items[i + 1..].iter().any(|y| complementary(x, y)) {
            return Some(match chain {
                Chain::And => L::False,
                Chain::Or => L::True,
            });
        }
    }
    let duals: Vec<Vec<&LtlFormula>> = items
        .iter()
        .map(|x| {
            let mut d = Vec::new();
            collect_dual(x, &mut d);
            d
        })
        .collect();
    // Drop duplicates (keeping the first) and items absorbed by a more
    // general one: `a | (a & b)` is `a`, `a & (a | b)` is `a`.
    let kept: Vec<&LtlFormula> = items
        .iter()
        .enumerate()
        .filter(|&(i, x)| {
            !items.iter().enumerate().any(|(j, y)| {
                j != i
                    && if y == x {
                        j < i
                    } else {
                        duals[j].iter().all(|d| duals[i].contains(d))
                    }
            })
        })
        .map(|(_, x)| *x)
        .collect();
    if kept.len() == items.len() {
        return None;
    }
    kept.into_iter().cloned().reduce(|a, b| match chain {
        Chain::And => L::and(a, b),
        Chain::Or => L::or(a, b),
    })
}

/// `a | (f W c)` becomes `f W c` when `a` is a disjunct of `c`: `a` at the
/// current position already discharges the until. The same holds for `U`.
/// The whole `|`-chain is flattened so the disjuncts may sit anywhere in it.
fn subsume_disjuncts(f: &LtlFormula) -> Option<LtlFormula> {
    let mut disjuncts = Vec::new();
    collect_disjuncts(f, &mut disjuncts);
    let mut implied = Vec::new();
    for d in &disjuncts {
        if let L::W(_, c) | L::U(_, c) = d {
            collect_disjuncts(c, &mut implied);
        }
    }
    if implied.is_empty() {
        return None;
    }
    let kept: Vec<&LtlFormula> = disjuncts
        .iter()
        .copied()
        .filter(|d| !implied.contains(d))
        .collect();
    if kept.len() == disjuncts.len() {
        return None;
    }
    kept.into_iter().cloned().reduce(L::or)
}
