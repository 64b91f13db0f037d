//! Linear temporal logic: syntax trees, text syntax, simplification, exact
//! evaluation on lasso traces and a bounded equivalence oracle.

mod equiv;
mod eval;
mod formula;
mod simplify;
mod syntax;

use std::collections::BTreeMap;

use thiserror::Error;

pub use equiv::{check_equiv, EquivVerdict, OracleBounds};
pub use eval::{eval_lasso, Lane, LassoTrace, Program, StepValue, TraceStep};
pub use formula::{substitute, Atom, Binding, LtlFormula};
pub use simplify::simplify;
pub use syntax::{parse_ltl, render_ltl};

use crate::propexpr::PropError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Prop(PropError),
    #[error("lasso loop must not be empty")]
    EmptyLoop,
    #[error("oracle bounds need a positive loop bound")]
    InvalidBounds,
    #[error("oracle would enumerate {traces} traces, above the cap of {cap}")]
    ResourceLimit { traces: u64, cap: u64 },
    #[error("comparison atom `{0}` cannot be renamed canonically")]
    CompareAtom(String),
}

/// Renames atoms to `a1`, `a2`, … in order of first occurrence (pre-order,
/// left to right). Returns the renamed formula and the old → new mapping.
pub fn canonical_rename(
    f: &LtlFormula,
) -> Result<(LtlFormula, BTreeMap<String, String>), LtlError> {
    let mut mapping = BTreeMap::new();
    for (i, atom) in f.atoms().into_iter().enumerate() {
        match atom {
            Atom::Var(name) => {
                mapping.insert(name.clone(), format!("a{}", i + 1));
            }
            Atom::Compare(..) => return Err(LtlError::CompareAtom(atom.to_string())),
        }
    }
    Ok((f.rename(&mapping), mapping))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rename_by_occurrence() {
        let (f, m) = canonical_rename(&parse_ltl("G (trig -> rea)").unwrap()).unwrap();
        assert_eq!(f, parse_ltl("G (a1 -> a2)").unwrap());
        assert_eq!(m["trig"], "a1");
        assert_eq!(m["rea"], "a2");
        let (g, _) = canonical_rename(&parse_ltl("G (trig -> inv)").unwrap()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn canonical_rename_constant() {
        let (f, m) = canonical_rename(&LtlFormula::True).unwrap();
        assert_eq!(f, LtlFormula::True);
        assert!(m.is_empty());
    }

    #[test]
    fn canonical_rename_rejects_comparisons() {
        assert!(matches!(
            canonical_rename(&parse_ltl("G (t >= 3)").unwrap()),
            Err(LtlError::CompareAtom(_))
        ));
    }

    #[test]
    fn renamed_table_formulas_are_equivalent() {
        let (f, _) = canonical_rename(&parse_ltl("G (trig -> rea)").unwrap()).unwrap();
        let (g, _) = canonical_rename(&parse_ltl("G (trig -> inv)").unwrap()).unwrap();
        assert!(check_equiv(&f, &g, &OracleBounds::default())
            .unwrap()
            .is_equivalent());
    }
}
