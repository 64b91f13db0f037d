//! Propositional expressions over system variables.
//!
//! These are the values that fill requirement attributes (`H and D`), CNL
//! slots, and the atoms of temporal formulas. The concrete syntax uses the
//! keyword connectives `and`, `or`, `not`; the symbols `&`, `|`, `!`, `∧`,
//! `∨`, `¬` are accepted on input as well.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Comparison operator of an `ident cmp integer` atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn apply(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// A propositional expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropExpr {
    Const(bool),
    Var(String),
    Compare(String, CmpOp, i64),
    Not(Box<PropExpr>),
    And(Box<PropExpr>, Box<PropExpr>),
    Or(Box<PropExpr>, Box<PropExpr>),
}

impl PropExpr {
    pub fn var(name: impl Into<String>) -> Self {
        PropExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: PropExpr) -> Self {
        PropExpr::Not(Box::new(e))
    }

    pub fn and(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropExpr, b: PropExpr) -> Self {
        PropExpr::Or(Box::new(a), Box::new(b))
    }

    /// Folds Boolean constants with the unit and absorbing laws. The result
    /// is either a `Const` or contains no `Const` node at all.
    pub fn fold_constants(&self) -> PropExpr {
        match self {
            PropExpr::Const(_) | PropExpr::Var(_) | PropExpr::Compare(..) => self.clone(),
            PropExpr::Not(e) => match e.fold_constants() {
                PropExpr::Const(b) => PropExpr::Const(!b),
                e => PropExpr::not(e),
            },
            PropExpr::And(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (PropExpr::Const(false), _) | (_, PropExpr::Const(false)) => PropExpr::Const(false),
                (PropExpr::Const(true), e) | (e, PropExpr::Const(true)) => e,
                (a, b) => PropExpr::and(a, b),
            },
            PropExpr::Or(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (PropExpr::Const(true), _) | (_, PropExpr::Const(true)) => PropExpr::Const(true),
                (PropExpr::Const(false), e) | (e, PropExpr::Const(false)) => e,
                (a, b) => PropExpr::or(a, b),
            },
        }
    }

    /// Identifiers referenced by `Var` and `Compare` nodes, sorted.
    pub fn identifiers(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a PropExpr, out: &mut Vec<&'a str>) {
            match e {
                PropExpr::Const(_) => {}
                PropExpr::Var(n) | PropExpr::Compare(n, ..) => out.push(n),
                PropExpr::Not(e) => walk(e, out),
                PropExpr::And(a, b) | PropExpr::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            PropExpr::Or(..) => 1,
            PropExpr::And(..) => 2,
            PropExpr::Not(_) => 3,
            _ => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unbound identifier `{0}`")]
    Unbound(String),
}

/// Truth values for Boolean identifiers and integer values for the variables
/// used in comparisons. Lookups of absent identifiers are errors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    bools: BTreeMap<String, bool>,
    ints: BTreeMap<String, i64>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_bool(mut self, name: impl Into<String>, value: bool) -> Self {
        self.set_bool(name, value);
        self
    }

    pub fn with_int(mut self, name: impl Into<String>, value: i64) -> Self {
        self.set_int(name, value);
        self
    }

    pub fn set_bool(&mut self, name: impl Into<String>, value: bool) {
        self.bools.insert(name.into(), value);
    }

    pub fn set_int(&mut self, name: impl Into<String>, value: i64) {
        self.ints.insert(name.into(), value);
    }

    pub fn get_bool(&self, name: &str) -> Result<bool, PropError> {
        self.bools
            .get(name)
            .copied()
            .ok_or_else(|| PropError::Unbound(name.to_string()))
    }

    pub fn get_int(&self, name: &str) -> Result<i64, PropError> {
        self.ints
            .get(name)
            .copied()
            .ok_or_else(|| PropError::Unbound(name.to_string()))
    }

    pub fn bools(&self) -> &BTreeMap<String, bool> {
        &self.bools
    }

    pub fn ints(&self) -> &BTreeMap<String, i64> {
        &self.ints
    }
}

pub fn eval_prop(e: &PropExpr, v: &Valuation) -> Result<bool, PropError> {
    Ok(match e {
        PropExpr::Const(b) => *b,
        PropExpr::Var(n) => v.get_bool(n)?,
        PropExpr::Compare(n, op, k) => op.apply(v.get_int(n)?, *k),
        PropExpr::Not(e) => !eval_prop(e, v)?,
        PropExpr::And(a, b) => eval_prop(a, v)? && eval_prop(b, v)?,
        PropExpr::Or(a, b) => eval_prop(a, v)? || eval_prop(b, v)?,
    })
}

const KEYWORDS: [&str; 5] = ["and", "or", "not", "true", "false"];

/// Whether `name` can be used as an identifier: `[A-Za-z_][A-Za-z0-9_]*`
/// and not one of the reserved words.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    And,
    Or,
    Not,
    True,
    False,
    LParen,
    RParen,
    Cmp(CmpOp),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PropError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = pos;
            while let Some(&(i, c)) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + c.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let word = &text[pos..end];
            let tok = match word {
                "and" => Tok::And,
                "or" => Tok::Or,
                "not" => Tok::Not,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((pos, tok));
            continue;
        }
        if c.is_ascii_digit() || c == '-' {
            let mut end = pos + c.len_utf8();
            it.next();
            while let Some(&(i, c)) = it.peek() {
                if c.is_ascii_digit() {
                    end = i + 1;
                    it.next();
                } else {
                    break;
                }
            }
            let lit = &text[pos..end];
            let value = lit.parse::<i64>().map_err(|_| PropError::Syntax {
                pos,
                message: format!("invalid integer literal `{lit}`"),
            })?;
            out.push((pos, Tok::Int(value)));
            continue;
        }
        it.next();
        let next = it.peek().map(|&(_, c)| c);
        let tok = match (c, next) {
            ('<', Some('=')) | ('≤', _) => {
                if c == '<' {
                    it.next();
                }
                Tok::Cmp(CmpOp::Le)
            }
            ('>', Some('=')) | ('≥', _) => {
                if c == '>' {
                    it.next();
                }
                Tok::Cmp(CmpOp::Ge)
            }
            ('!', Some('=')) | ('≠', _) => {
                if c == '!' {
                    it.next();
                }
                Tok::Cmp(CmpOp::Ne)
            }
            ('=', Some('=')) => {
                it.next();
                Tok::Cmp(CmpOp::Eq)
            }
            ('=', _) => Tok::Cmp(CmpOp::Eq),
            ('<', _) => Tok::Cmp(CmpOp::Lt),
            ('>', _) => Tok::Cmp(CmpOp::Gt),
            ('&' | '∧', _) => Tok::And,
            ('|' | '∨', _) => Tok::Or,
            ('!' | '¬', _) => Tok::Not,
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            _ => {
                return Err(PropError::Syntax {
                    pos,
                    message: format!("unknown token `{c}`"),
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> PropError {
        PropError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<PropExpr, PropError> {
        let mut lhs = self.term()?;
        while self.peek() == Some(&Tok::Or) {
            self.idx += 1;
            lhs = PropExpr::or(lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<PropExpr, PropError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::And) {
            self.idx += 1;
            lhs = PropExpr::and(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<PropExpr, PropError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        self.idx += 1;
        match tok {
            Tok::Not => Ok(PropExpr::not(self.factor()?)),
            Tok::True => Ok(PropExpr::Const(true)),
            Tok::False => Ok(PropExpr::Const(false)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.idx += 1;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(Tok::Cmp(op)) = self.peek().cloned() {
                    self.idx += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(k)) => {
                            self.idx += 1;
                            Ok(PropExpr::Compare(name, op, k))
                        }
                        _ => Err(self.error("expected integer literal after comparison")),
                    }
                } else {
                    Ok(PropExpr::Var(name))
                }
            }
            _ => {
                self.idx -= 1;
                Err(self.error("expected expression"))
            }
        }
    }
}

/// Parses expression text. Precedence is `not` > `and` > `or`; binary
/// connectives associate to the left.
pub fn parse_prop(text: &str) -> Result<PropExpr, PropError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(PropError::Syntax {
            pos: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Renders with keyword connectives and the fewest parentheses that keep
/// the tree shape under left-associative parsing.
pub fn render_prop(e: &PropExpr) -> String {
    e.to_string()
}

impl fmt::Display for PropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &PropExpr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            PropExpr::Const(b) => write!(f, "{b}"),
            PropExpr::Var(n) => f.write_str(n),
            PropExpr::Compare(n, op, k) => write!(f, "{n} {} {k}", op.symbol()),
            PropExpr::Not(e) => {
                f.write_str("not ")?;
                child(f, e, 3)
            }
            PropExpr::And(a, b) => {
                child(f, a, 2)?;
                f.write_str(" and ")?;
                child(f, b, 3)
            }
            PropExpr::Or(a, b) => {
                child(f, a, 1)?;
                f.write_str(" or ")?;
                child(f, b, 2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> PropExpr {
        PropExpr::var(n)
    }

    #[test]
    fn parses_conjunction_of_variables() {
        assert_eq!(
            parse_prop("H and D").unwrap(),
            PropExpr::and(v("H"), v("D"))
        );
        assert_eq!(parse_prop("H & D").unwrap(), PropExpr::and(v("H"), v("D")));
        assert_eq!(parse_prop("H ∧ D").unwrap(), PropExpr::and(v("H"), v("D")));
    }

    #[test]
    fn parses_constants_and_negation() {
        assert_eq!(parse_prop("true").unwrap(), PropExpr::Const(true));
        assert_eq!(parse_prop("not inp_1").unwrap(), PropExpr::not(v("inp_1")));
        assert_eq!(parse_prop("¬inp_1").unwrap(), PropExpr::not(v("inp_1")));
    }

    #[test]
    fn precedence_not_and_or() {
        let e = parse_prop("not a or b and c").unwrap();
        assert_eq!(
            e,
            PropExpr::or(PropExpr::not(v("a")), PropExpr::and(v("b"), v("c")))
        );
    }

    #[test]
    fn comparisons() {
        assert_eq!(
            parse_prop("t >= 30").unwrap(),
            PropExpr::Compare("t".into(), CmpOp::Ge, 30)
        );
        assert_eq!(
            parse_prop("t ≤ -4").unwrap(),
            PropExpr::Compare("t".into(), CmpOp::Le, -4)
        );
        let e = PropExpr::Compare("t".into(), CmpOp::Ge, 30);
        assert!(eval_prop(&e, &Valuation::new().with_int("t", 35)).unwrap());
        assert!(!eval_prop(&e, &Valuation::new().with_int("t", 29)).unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_prop("a and (b or").unwrap_err() {
            PropError::Syntax { pos, .. } => assert_eq!(pos, 11),
            e => panic!("unexpected {e:?}"),
        }
        match parse_prop("a # b").unwrap_err() {
            PropError::Syntax { pos, message } => {
                assert_eq!(pos, 2);
                assert!(message.contains("unknown token"));
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_prop("").is_err());
        assert!(parse_prop("a b").is_err());
        assert!(parse_prop("t >= x").is_err());
        assert!(parse_prop("t > 99999999999999999999").is_err());
    }

    #[test]
    fn evaluation_truth_table() {
        let e = PropExpr::and(v("H"), v("D"));
        let val = |h, d| Valuation::new().with_bool("H", h).with_bool("D", d);
        assert!(eval_prop(&e, &val(true, true)).unwrap());
        assert!(!eval_prop(&e, &val(true, false)).unwrap());
        assert_eq!(
            eval_prop(&e, &Valuation::new().with_bool("H", true)),
            Err(PropError::Unbound("D".into()))
        );
    }

    #[test]
    fn rendering() {
        assert_eq!(render_prop(&PropExpr::and(v("H"), v("D"))), "H and D");
        assert_eq!(
            render_prop(&PropExpr::not(PropExpr::or(v("a"), v("b")))),
            "not (a or b)"
        );
        assert_eq!(render_prop(&PropExpr::Const(false)), "false");
        assert_eq!(
            render_prop(&PropExpr::and(v("a"), PropExpr::and(v("b"), v("c")))),
            "a and (b and c)"
        );
        assert_eq!(
            render_prop(&PropExpr::and(PropExpr::and(v("a"), v("b")), v("c"))),
            "a and b and c"
        );
    }

    #[test]
    fn constant_folding() {
        let e = parse_prop("true and (x or false)").unwrap();
        assert_eq!(e.fold_constants(), v("x"));
        assert_eq!(
            parse_prop("not (y and false)").unwrap().fold_constants(),
            PropExpr::Const(true)
        );
    }

    #[test]
    fn identifier_rules() {
        assert!(is_identifier("inp_1"));
        assert!(is_identifier("_x"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier("and"));
        assert!(!is_identifier(""));
    }
}
