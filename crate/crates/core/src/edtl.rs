//! The EDTL requirement pattern.
//!
//! A requirement assigns six attributes. Each attribute is either a Boolean
//! constant or a propositional expression over system variables; the
//! requirement's meaning is the base formula with those values substituted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{simplify, substitute, Binding, LtlFormula};
use crate::propexpr::{parse_prop, PropError, PropExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeName {
    Trigger,
    Invariant,
    Final,
    Delay,
    Reaction,
    Release,
}

impl AttributeName {
    /// Attribute order used for enumeration, keys and tables.
    pub const ALL: [AttributeName; 6] = [
        AttributeName::Trigger,
        AttributeName::Invariant,
        AttributeName::Final,
        AttributeName::Delay,
        AttributeName::Reaction,
        AttributeName::Release,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttributeName::Trigger => "trigger",
            AttributeName::Invariant => "invariant",
            AttributeName::Final => "final",
            AttributeName::Delay => "delay",
            AttributeName::Reaction => "reaction",
            AttributeName::Release => "release",
        }
    }

    /// The atom name used in the semantics formula.
    pub fn abbreviation(self) -> &'static str {
        match self {
            AttributeName::Trigger => "trig",
            AttributeName::Invariant => "inv",
            AttributeName::Final => "fin",
            AttributeName::Delay => "del",
            AttributeName::Reaction => "rea",
            AttributeName::Release => "rel",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn from_abbreviation(abbr: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.abbreviation() == abbr)
    }
}

impl fmt::Display for AttributeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Abstract value of an attribute: identically true, identically false, or
/// depending on the system state.
///
/// The derived order `Var < True < False` is the enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tristate {
    Var,
    True,
    False,
}

impl Tristate {
    pub const ALL: [Tristate; 3] = [Tristate::Var, Tristate::True, Tristate::False];

    pub fn letter(self) -> char {
        match self {
            Tristate::Var => 'v',
            Tristate::True => 't',
            Tristate::False => 'f',
        }
    }

    pub fn is_const(self) -> bool {
        self != Tristate::Var
    }
}

/// A total map from the six attributes to tristates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeCombination([Tristate; 6]);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdtlError {
    #[error("invalid combination key `{0}`: expected six letters from v, t, f")]
    BadKey(String),
    #[error("missing attribute `{0}`")]
    MissingAttribute(&'static str),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attribute}`: {source}")]
    Expression {
        attribute: &'static str,
        source: PropError,
    },
}

impl AttributeCombination {
    pub fn new(values: [Tristate; 6]) -> Self {
        AttributeCombination(values)
    }

    pub fn all_var() -> Self {
        AttributeCombination([Tristate::Var; 6])
    }

    pub fn get(&self, a: AttributeName) -> Tristate {
        self.0[a.index()]
    }

    pub fn with(mut self, a: AttributeName, t: Tristate) -> Self {
        self.0[a.index()] = t;
        self
    }

    pub fn values(&self) -> [Tristate; 6] {
        self.0
    }

    /// Six letters from `v`, `t`, `f` in attribute order, e.g. `vtttvf`.
    pub fn key(&self) -> String {
        self.0.iter().map(|t| t.letter()).collect()
    }

    pub fn variable_attributes(&self) -> Vec<AttributeName> {
        AttributeName::ALL
            .into_iter()
            .filter(|a| self.get(*a) == Tristate::Var)
            .collect()
    }

    pub fn constant_attributes(&self) -> Vec<AttributeName> {
        AttributeName::ALL
            .into_iter()
            .filter(|a| self.get(*a).is_const())
            .collect()
    }

    /// Variable attributes that still occur in the simplified semantics.
    /// The others are variable but cannot affect the requirement.
    pub fn relevant_attributes(&self) -> Vec<AttributeName> {
        let names = self.semantics().atom_names();
        self.variable_attributes()
            .into_iter()
            .filter(|a| names.iter().any(|n| n == a.abbreviation()))
            .collect()
    }

    /// The requirement whose variable attributes are the formula's own
    /// abbreviation atoms (`trig`, `inv`, …).
    pub fn symbolic_requirement(&self) -> Requirement {
        let mut values = self.0.map(|_| AttributeValue::Const(true));
        for a in AttributeName::ALL {
            values[a.index()] = match self.get(a) {
                Tristate::Var => AttributeValue::Expr(PropExpr::var(a.abbreviation())),
                Tristate::True => AttributeValue::Const(true),
                Tristate::False => AttributeValue::Const(false),
            };
        }
        Requirement(values)
    }

    /// Instantiates and simplifies [`Self::symbolic_requirement`].
    pub fn semantics(&self) -> LtlFormula {
        instantiate(&self.symbolic_requirement(), true)
    }
}

impl FromStr for AttributeCombination {
    type Err = EdtlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if letters.len() != 6 {
            return Err(EdtlError::BadKey(s.to_string()));
        }
        let mut values = [Tristate::Var; 6];
        for (slot, c) in values.iter_mut().zip(letters) {
            *slot = match c.to_ascii_lowercase() {
                'v' => Tristate::Var,
                't' => Tristate::True,
                'f' => Tristate::False,
                _ => return Err(EdtlError::BadKey(s.to_string())),
            };
        }
        Ok(AttributeCombination(values))
    }
}

impl fmt::Display for AttributeCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl Serialize for AttributeCombination {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

impl<'de> Deserialize<'de> for AttributeCombination {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttributeValue {
    Const(bool),
    Expr(PropExpr),
}

impl AttributeValue {
    /// Folds constants; an expression that folds to a constant becomes one.
    pub fn normalized(e: PropExpr) -> Self {
        match e.fold_constants() {
            PropExpr::Const(b) => AttributeValue::Const(b),
            _ => AttributeValue::Expr(e),
        }
    }

    pub fn tristate(&self) -> Tristate {
        match self {
            AttributeValue::Const(true) => Tristate::True,
            AttributeValue::Const(false) => Tristate::False,
            AttributeValue::Expr(_) => Tristate::Var,
        }
    }

    fn binding(&self) -> Binding {
        match self {
            AttributeValue::Const(b) => Binding::Const(*b),
            AttributeValue::Expr(e) => Binding::Expr(e.clone()),
        }
    }
}

/// A concrete requirement: all six attributes bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Requirement([AttributeValue; 6]);

impl Requirement {
    /// Builds a requirement, folding expressions that are constant.
    pub fn new(values: [AttributeValue; 6]) -> Self {
        Requirement(values.map(|v| match v {
            AttributeValue::Expr(e) => AttributeValue::normalized(e),
            c => c,
        }))
    }

    pub fn from_fn(mut f: impl FnMut(AttributeName) -> AttributeValue) -> Self {
        Self::new(AttributeName::ALL.map(&mut f))
    }

    pub fn get(&self, a: AttributeName) -> &AttributeValue {
        &self.0[a.index()]
    }

    pub fn with(mut self, a: AttributeName, v: AttributeValue) -> Self {
        self.0[a.index()] = v;
        Self::new(self.0)
    }

    pub fn from_json(text: &str) -> Result<Self, RequirementJsonError> {
        let raw: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
        Ok(Self::from_json_map(&raw)?)
    }

    fn from_json_map(raw: &BTreeMap<String, serde_json::Value>) -> Result<Self, EdtlError> {
        if let Some(unknown) = raw.keys().find(|k| AttributeName::from_name(k).is_none()) {
            return Err(EdtlError::UnknownAttribute(unknown.clone()));
        }
        let mut values = Vec::with_capacity(6);
        for a in AttributeName::ALL {
            let v = raw
                .get(a.name())
                .ok_or(EdtlError::MissingAttribute(a.name()))?;
            values.push(match v {
                serde_json::Value::Bool(b) => AttributeValue::Const(*b),
                serde_json::Value::String(s) => {
                    let e = parse_prop(s).map_err(|source| EdtlError::Expression {
                        attribute: a.name(),
                        source,
                    })?;
                    AttributeValue::Expr(e)
                }
                other => {
                    return Err(EdtlError::Expression {
                        attribute: a.name(),
                        source: PropError::Syntax {
                            pos: 0,
                            message: format!("expected boolean or expression string, got {other}"),
                        },
                    })
                }
            });
        }
        let values: [AttributeValue; 6] = values.try_into().expect("six attributes");
        Ok(Self::new(values))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("requirement serializes")
    }
}

#[derive(Debug, Error)]
pub enum RequirementJsonError {
    #[error("malformed requirement JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Edtl(#[from] EdtlError),
}

impl Serialize for Requirement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(6))?;
        for a in AttributeName::ALL {
            match self.get(a) {
                AttributeValue::Const(b) => map.serialize_entry(a.name(), b)?,
                AttributeValue::Expr(e) => map.serialize_entry(a.name(), &e.to_string())?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Requirement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
        Self::from_json_map(&raw).map_err(de::Error::custom)
    }
}

/// `G(trig -> ((inv & !fin) W (rel | (fin & ((inv & !del) W (rel | (inv & rea)))))))`
pub fn base_semantics() -> LtlFormula {
    use LtlFormula as L;
    let atom = |a: AttributeName| L::atom(a.abbreviation());
    let (trig, inv, fin, del, rea, rel) = (
        atom(AttributeName::Trigger),
        atom(AttributeName::Invariant),
        atom(AttributeName::Final),
        atom(AttributeName::Delay),
        atom(AttributeName::Reaction),
        atom(AttributeName::Release),
    );
    let waiting_for_reaction = L::weak_until(
        L::and(inv.clone(), L::not(del)),
        L::or(rel.clone(), L::and(inv.clone(), rea)),
    );
    let waiting_for_final = L::weak_until(
        L::and(inv, L::not(fin.clone())),
        L::or(rel, L::and(fin, waiting_for_reaction)),
    );
    L::globally(L::implies(trig, waiting_for_final))
}

/// Substitutes the requirement's attribute values into the base formula,
/// optionally simplifying the result.
pub fn instantiate(r: &Requirement, do_simplify: bool) -> LtlFormula {
    let binding: BTreeMap<String, Binding> = AttributeName::ALL
        .into_iter()
        .map(|a| (a.abbreviation().to_string(), r.get(a).binding()))
        .collect();
    let f = substitute(&base_semantics(), &binding);
    if do_simplify {
        simplify(&f)
    } else {
        f
    }
}

pub fn combination_of(r: &Requirement) -> AttributeCombination {
    AttributeCombination(AttributeName::ALL.map(|a| r.get(a).tristate()))
}

/// All 3^6 combinations, lexicographic in attribute order with
/// `Var < True < False`.
pub fn enumerate_combinations() -> Vec<AttributeCombination> {
    let mut out = Vec::with_capacity(729);
    for index in 0..729usize {
        let mut values = [Tristate::Var; 6];
        let mut rest = index;
        for slot in values.iter_mut().rev() {
            *slot = Tristate::ALL[rest % 3];
            rest /= 3;
        }
        out.push(AttributeCombination(values));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    pub(crate) const TABLE_I: &str = r#"{"trigger": "H and D", "release": false, "final": true, "delay": true, "invariant": true, "reaction": "D"}"#;

    #[test]
    fn base_formula_shape() {
        let f = base_semantics();
        assert_eq!(
            f,
            parse_ltl(
                "G (trig -> ((inv & !fin) W (rel | (fin & ((inv & !del) W (rel | (inv & rea)))))))"
            )
            .unwrap()
        );
        assert_eq!(parse_ltl(&f.to_string()).unwrap(), f);
        assert_eq!(f.atom_names(), ["del", "fin", "inv", "rea", "rel", "trig"]);
    }

    #[test]
    fn table_one_requirement() {
        let r = Requirement::from_json(TABLE_I).unwrap();
        assert_eq!(instantiate(&r, true).to_string(), "G ((H & D) -> D)");
        assert_eq!(combination_of(&r).key(), "vtttvf");
    }

    #[test]
    fn all_variable_requirement_is_the_base_formula() {
        let r = AttributeCombination::all_var().symbolic_requirement();
        assert_eq!(instantiate(&r, true), base_semantics());
        assert_eq!(instantiate(&r, false), base_semantics());
    }

    #[test]
    fn partial_assignments_simplify() {
        let sem = |key: &str| {
            key.parse::<AttributeCombination>()
                .unwrap()
                .semantics()
                .to_string()
        };
        assert_eq!(sem("vtttvf"), "G (trig -> rea)");
        assert_eq!(
            sem("vvtvvv"),
            "G (trig -> ((inv & !del) W (rel | (inv & rea))))"
        );
        assert_eq!(sem("vvvttf"), "G (trig -> ((inv & !fin) W (fin & inv)))");
    }

    #[test]
    fn relevant_attributes_drop_vanished_atoms() {
        let c: AttributeCombination = "vftvvv".parse().unwrap();
        assert_eq!(c.variable_attributes().len(), 4);
        assert_eq!(
            c.relevant_attributes(),
            [AttributeName::Trigger, AttributeName::Release]
        );
    }

    #[test]
    fn release_true_collapses_to_true() {
        let c: AttributeCombination = "vvvvvt".parse().unwrap();
        assert_eq!(c.semantics(), LtlFormula::True);
    }

    #[test]
    fn combination_of_maps_constants() {
        let all_true = Requirement::from_fn(|_| AttributeValue::Const(true));
        assert_eq!(combination_of(&all_true).key(), "tttttt");
        let all_expr = Requirement::from_fn(|a| AttributeValue::Expr(PropExpr::var(a.name())));
        assert_eq!(combination_of(&all_expr), AttributeCombination::all_var());
    }

    #[test]
    fn constant_expressions_are_normalized() {
        let r = Requirement::from_fn(|_| AttributeValue::Expr(parse_prop("x or true").unwrap()));
        assert_eq!(combination_of(&r).key(), "tttttt");
    }

    #[test]
    fn enumeration_order_and_count() {
        let all = enumerate_combinations();
        assert_eq!(all.len(), 729);
        assert_eq!(all[0], AttributeCombination::all_var());
        assert_eq!(all[1].key(), "vvvvvt");
        assert_eq!(all[728].key(), "ffffff");
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        sorted.dedup();
        assert_eq!(sorted.len(), 729);
        let target: AttributeCombination = "vtttvf".parse().unwrap();
        assert_eq!(all.iter().filter(|c| **c == target).count(), 1);
    }

    #[test]
    fn json_errors_name_the_key() {
        let err = Requirement::from_json(r#"{"trigger": "a", "invariant": true}"#).unwrap_err();
        assert!(err.to_string().contains("final"), "{err}");
        let err = Requirement::from_json(r#"{"trigger": "a and", "invariant": true, "final": true, "delay": true, "reaction": "b", "release": false}"#).unwrap_err();
        assert!(err.to_string().contains("trigger"), "{err}");
        assert!(Requirement::from_json("not json").is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = Requirement::from_json(TABLE_I).unwrap();
        assert_eq!(Requirement::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn bad_keys() {
        assert!("vvvvv".parse::<AttributeCombination>().is_err());
        assert!("vvvvvx".parse::<AttributeCombination>().is_err());
        assert_eq!(
            "v t t t v f".parse::<AttributeCombination>().unwrap().key(),
            "vtttvf"
        );
    }
}
