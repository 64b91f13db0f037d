use std::collections::BTreeMap;
use std::fmt;

use crate::propexpr::{CmpOp, PropError, PropExpr, Valuation};

/// An atomic proposition: a Boolean variable or an integer comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(String),
    Compare(String, CmpOp, i64),
}

impl Atom {
    pub fn name(&self) -> &str {
        match self {
            Atom::Var(n) | Atom::Compare(n, ..) => n,
        }
    }

    pub fn eval(&self, v: &Valuation) -> Result<bool, PropError> {
        match self {
            Atom::Var(n) => v.get_bool(n),
            Atom::Compare(n, op, k) => Ok(op.apply(v.get_int(n)?, *k)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(n) => f.write_str(n),
            Atom::Compare(n, op, k) => write!(f, "{n} {} {k}", op.symbol()),
        }
    }
}

/// Linear temporal logic formula.
///
/// `W` is weak until (`f W g` ≡ `G f ∨ f U g`). `Implies` is kept as its own
/// node so rendered formulas read like the usual requirement notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    Atom(Atom),
    True,
    False,
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    G(Box<LtlFormula>),
    F(Box<LtlFormula>),
    X(Box<LtlFormula>),
    U(Box<LtlFormula>, Box<LtlFormula>),
    W(Box<LtlFormula>, Box<LtlFormula>),
}

/// Replacement for a named atom during [`substitute`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Const(bool),
    Expr(PropExpr),
}

impl LtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        LtlFormula::Atom(Atom::Var(name.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LtlFormula) -> Self {
        LtlFormula::Not(Box::new(f))
    }

    pub fn and(f: LtlFormula, g: LtlFormula) -> Self {
        LtlFormula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: LtlFormula, g: LtlFormula) -> Self {
        LtlFormula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: LtlFormula, g: LtlFormula) -> Self {
        LtlFormula::Implies(Box::new(f), Box::new(g))
    }

    pub fn globally(f: LtlFormula) -> Self {
        LtlFormula::G(Box::new(f))
    }

    pub fn eventually(f: LtlFormula) -> Self {
        LtlFormula::F(Box::new(f))
    }

    pub fn next(f: LtlFormula) -> Self {
        LtlFormula::X(Box::new(f))
    }

    pub fn until(f: LtlFormula, g: LtlFormula) -> Self {
        LtlFormula::U(Box::new(f), Box::new(g))
    }

    pub fn weak_until(f: LtlFormula, g: LtlFormula) -> Self {
        LtlFormula::W(Box::new(f), Box::new(g))
    }

    /// Embeds a propositional expression, mapping its connectives onto the
    /// temporal connectives.
    pub fn from_prop(e: &PropExpr) -> Self {
        match e {
            PropExpr::Const(true) => LtlFormula::True,
            PropExpr::Const(false) => LtlFormula::False,
            PropExpr::Var(n) => LtlFormula::Atom(Atom::Var(n.clone())),
            PropExpr::Compare(n, op, k) => LtlFormula::Atom(Atom::Compare(n.clone(), *op, *k)),
            PropExpr::Not(e) => LtlFormula::not(Self::from_prop(e)),
            PropExpr::And(a, b) => LtlFormula::and(Self::from_prop(a), Self::from_prop(b)),
            PropExpr::Or(a, b) => LtlFormula::or(Self::from_prop(a), Self::from_prop(b)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LtlFormula::Atom(_) | LtlFormula::True | LtlFormula::False => 1,
            LtlFormula::Not(f) | LtlFormula::G(f) | LtlFormula::F(f) | LtlFormula::X(f) => {
                1 + f.size()
            }
            LtlFormula::And(f, g)
            | LtlFormula::Or(f, g)
            | LtlFormula::Implies(f, g)
            | LtlFormula::U(f, g)
            | LtlFormula::W(f, g) => 1 + f.size() + g.size(),
        }
    }

    /// Distinct atoms in order of first occurrence (pre-order, left to right).
    pub fn atoms(&self) -> Vec<&Atom> {
        fn walk<'a>(f: &'a LtlFormula, out: &mut Vec<&'a Atom>) {
            match f {
                LtlFormula::Atom(a) => {
                    if !out.contains(&a) {
                        out.push(a);
                    }
                }
                LtlFormula::True | LtlFormula::False => {}
                LtlFormula::Not(f) | LtlFormula::G(f) | LtlFormula::F(f) | LtlFormula::X(f) => {
                    walk(f, out)
                }
                LtlFormula::And(f, g)
                | LtlFormula::Or(f, g)
                | LtlFormula::Implies(f, g)
                | LtlFormula::U(f, g)
                | LtlFormula::W(f, g) => {
                    walk(f, out);
                    walk(g, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Names of the `Var` atoms, sorted.
    pub fn atom_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Var(n) => Some(n.clone()),
                Atom::Compare(..) => None,
            })
            .collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, LtlFormula::True | LtlFormula::False)
    }

    /// Rebuilds the formula bottom-up, applying `leaf` to every atom.
    pub fn map_atoms(&self, leaf: &mut impl FnMut(&Atom) -> LtlFormula) -> LtlFormula {
        use LtlFormula as L;
        match self {
            L::Atom(a) => leaf(a),
            L::True => L::True,
            L::False => L::False,
            L::Not(f) => L::not(f.map_atoms(leaf)),
            L::G(f) => L::globally(f.map_atoms(leaf)),
            L::F(f) => L::eventually(f.map_atoms(leaf)),
            L::X(f) => L::next(f.map_atoms(leaf)),
            L::And(f, g) => L::and(f.map_atoms(leaf), g.map_atoms(leaf)),
            L::Or(f, g) => L::or(f.map_atoms(leaf), g.map_atoms(leaf)),
            L::Implies(f, g) => L::implies(f.map_atoms(leaf), g.map_atoms(leaf)),
            L::U(f, g) => L::until(f.map_atoms(leaf), g.map_atoms(leaf)),
            L::W(f, g) => L::weak_until(f.map_atoms(leaf), g.map_atoms(leaf)),
        }
    }

    /// Renames `Var` atoms according to `mapping`; unmapped atoms are kept.
    pub fn rename(&self, mapping: &BTreeMap<String, String>) -> LtlFormula {
        self.map_atoms(&mut |a| match a {
            Atom::Var(n) => LtlFormula::atom(mapping.get(n).unwrap_or(n).clone()),
            other => LtlFormula::Atom(other.clone()),
        })
    }
}

/// Replaces every `Var` atom whose name is bound. No simplification is done.
pub fn substitute(f: &LtlFormula, binding: &BTreeMap<String, Binding>) -> LtlFormula {
    f.map_atoms(&mut |a| match a {
        Atom::Var(n) => match binding.get(n) {
            Some(Binding::Const(true)) => LtlFormula::True,
            Some(Binding::Const(false)) => LtlFormula::False,
            Some(Binding::Expr(e)) => LtlFormula::from_prop(e),
            None => LtlFormula::Atom(a.clone()),
        },
        Atom::Compare(..) => LtlFormula::Atom(a.clone()),
    })
}
