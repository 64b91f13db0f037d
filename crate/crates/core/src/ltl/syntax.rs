//! Concrete syntax of temporal formulas.
//!
//! Input accepts ASCII and Unicode operators. Precedence from tightest:
//! prefix operators (`!`, `G`, `F`, `X`), `&`, `|`, `U`/`W`, `->`.
//! `U`, `W` and `->` associate to the right, `&` and `|` to the left.
//!
//! Output is ASCII. A binary operand that is itself binary is always
//! parenthesized, which is how requirement formulas are usually written
//! (`G (trig -> ((inv & !del) W (rel | (inv & rea))))`).

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::formula::{Atom, LtlFormula};
use super::LtlError;
use crate::propexpr::CmpOp;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    G,
    F,
    X,
    U,
    W,
    LParen,
    RParen,
    Cmp(CmpOp),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LtlError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| LtlError::Syntax { pos, message };
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        let next = bytes.get(i + 1).map(|&(_, c)| c);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].1.is_ascii_alphanumeric() || bytes[j].1 == '_') {
                j += 1;
            }
            let end = bytes.get(j).map_or(text.len(), |&(p, _)| p);
            let tok = match &text[pos..end] {
                "true" => Tok::True,
                "false" => Tok::False,
                "not" => Tok::Not,
                "and" => Tok::And,
                "or" => Tok::Or,
                "G" => Tok::G,
                "F" => Tok::F,
                "X" => Tok::X,
                "U" => Tok::U,
                "W" => Tok::W,
                w => Tok::Ident(w.to_string()),
            };
            out.push((pos, tok));
            i = j;
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = bytes.get(j).map_or(text.len(), |&(p, _)| p);
            let lit = &text[pos..end];
            let v = lit
                .parse::<i64>()
                .map_err(|_| err(pos, format!("invalid integer literal `{lit}`")))?;
            out.push((pos, Tok::Int(v)));
            i = j;
            continue;
        }
        let (tok, width) = match (c, next) {
            ('-', Some('>')) => (Tok::Implies, 2),
            ('=', Some('>')) => (Tok::Implies, 2),
            ('→', _) => (Tok::Implies, 1),
            ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
            ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
            ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
            ('=', Some('=')) => (Tok::Cmp(CmpOp::Eq), 2),
            ('≤', _) => (Tok::Cmp(CmpOp::Le), 1),
            ('≥', _) => (Tok::Cmp(CmpOp::Ge), 1),
            ('≠', _) => (Tok::Cmp(CmpOp::Ne), 1),
            ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
            ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
            ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
            ('&' | '∧', _) => (Tok::And, 1),
            ('|' | '∨', _) => (Tok::Or, 1),
            ('!' | '¬', _) => (Tok::Not, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ => return Err(err(pos, format!("unknown token `{c}`"))),
        };
        out.push((pos, tok));
        i += width;
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

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> LtlError {
        LtlError::Syntax {
            pos: self.toks.get(self.idx).map_or(self.end, |(p, _)| *p),
            message: message.into(),
        }
    }

    fn implication(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.until()?;
        if self.eat(&Tok::Implies) {
            Ok(LtlFormula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn until(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::U) {
            Ok(LtlFormula::until(lhs, self.until()?))
        } else if self.eat(&Tok::W) {
            Ok(LtlFormula::weak_until(lhs, self.until()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = LtlFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = LtlFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula, LtlError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        self.idx += 1;
        match tok {
            Tok::Not => Ok(LtlFormula::not(self.unary()?)),
            Tok::G => Ok(LtlFormula::globally(self.unary()?)),
            Tok::F => Ok(LtlFormula::eventually(self.unary()?)),
            Tok::X => Ok(LtlFormula::next(self.unary()?)),
            Tok::True => Ok(LtlFormula::True),
            Tok::False => Ok(LtlFormula::False),
            Tok::LParen => {
                let f = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Tok::Ident(name) => {
                if let Some(Tok::Cmp(op)) = self.peek().cloned() {
                    self.idx += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(k)) => {
                            self.idx += 1;
                            Ok(LtlFormula::Atom(Atom::Compare(name, op, k)))
                        }
                        _ => Err(self.error("expected integer literal after comparison")),
                    }
                } else {
                    Ok(LtlFormula::Atom(Atom::Var(name)))
                }
            }
            _ => {
                self.idx -= 1;
                Err(self.error("expected formula"))
            }
        }
    }
}

pub fn parse_ltl(text: &str) -> Result<LtlFormula, LtlError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(LtlError::Syntax {
            pos: 0,
            message: "empty formula".into(),
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let f = p.implication()?;
    if p.idx != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

pub fn render_ltl(f: &LtlFormula) -> String {
    f.to_string()
}

fn is_binary(f: &LtlFormula) -> bool {
    matches!(
        f,
        LtlFormula::And(..)
            | LtlFormula::Or(..)
            | LtlFormula::Implies(..)
            | LtlFormula::U(..)
            | LtlFormula::W(..)
    )
}

fn operand(f: &mut fmt::Formatter<'_>, g: &LtlFormula) -> fmt::Result {
    if is_binary(g) {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &LtlFormula, op: &str, b: &LtlFormula| {
            operand(f, a)?;
            write!(f, " {op} ")?;
            operand(f, b)
        };
        match self {
            LtlFormula::Atom(a) => write!(f, "{a}"),
            LtlFormula::True => f.write_str("true"),
            LtlFormula::False => f.write_str("false"),
            LtlFormula::Not(g) => {
                f.write_str("!")?;
                operand(f, g)
            }
            LtlFormula::G(g) => {
                f.write_str("G ")?;
                operand(f, g)
            }
            LtlFormula::F(g) => {
                f.write_str("F ")?;
                operand(f, g)
            }
            LtlFormula::X(g) => {
                f.write_str("X ")?;
                operand(f, g)
            }
            LtlFormula::And(a, b) => binary(f, a, "&", b),
            LtlFormula::Or(a, b) => binary(f, a, "|", b),
            LtlFormula::Implies(a, b) => binary(f, a, "->", b),
            LtlFormula::U(a, b) => binary(f, a, "U", b),
            LtlFormula::W(a, b) => binary(f, a, "W", b),
        }
    }
}

impl FromStr for LtlFormula {
    type Err = LtlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ltl(s)
    }
}

impl Serialize for LtlFormula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LtlFormula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_ltl(&text).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LtlFormula as L;

    fn a(n: &str) -> L {
        L::atom(n)
    }

    #[test]
    fn parses_table_formulas() {
        assert_eq!(
            parse_ltl("G (trig -> rea)").unwrap(),
            L::globally(L::implies(a("trig"), a("rea")))
        );
        assert_eq!(
            parse_ltl("a W false").unwrap(),
            L::weak_until(a("a"), L::False)
        );
        assert_eq!(
            parse_ltl("G (trig → rea)").unwrap(),
            parse_ltl("G (trig -> rea)").unwrap()
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_ltl("a & b | c").unwrap(),
            L::or(L::and(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse_ltl("a | b W c").unwrap(),
            L::weak_until(L::or(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse_ltl("a U b W c").unwrap(),
            L::until(a("a"), L::weak_until(a("b"), a("c")))
        );
        assert_eq!(
            parse_ltl("a -> b -> c").unwrap(),
            L::implies(a("a"), L::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse_ltl("!G a & b").unwrap(),
            L::and(L::not(L::globally(a("a"))), a("b"))
        );
        assert_eq!(
            parse_ltl("¬a ∧ b ∨ c").unwrap(),
            L::or(L::and(L::not(a("a")), a("b")), a("c"))
        );
    }

    #[test]
    fn comparison_atoms() {
        assert_eq!(
            parse_ltl("G (t >= 30 -> x)").unwrap(),
            L::globally(L::implies(
                L::Atom(Atom::Compare("t".into(), CmpOp::Ge, 30)),
                a("x")
            ))
        );
    }

    #[test]
    fn renders_in_requirement_style() {
        let f = L::globally(L::implies(a("trig"), a("rea")));
        assert_eq!(render_ltl(&f), "G (trig -> rea)");
        let f = L::weak_until(
            L::and(a("inv"), L::not(a("fin"))),
            L::and(a("fin"), a("inv")),
        );
        assert_eq!(render_ltl(&f), "(inv & !fin) W (fin & inv)");
        assert_eq!(render_ltl(&L::True), "true");
        assert_eq!(render_ltl(&L::not(L::or(a("a"), a("b")))), "!(a | b)");
        assert_eq!(render_ltl(&L::globally(a("a"))), "G a");
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_ltl(""),
            Err(LtlError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_ltl("G (a -> "),
            Err(LtlError::Syntax { pos: 8, .. })
        ));
        assert!(matches!(
            parse_ltl("a $ b"),
            Err(LtlError::Syntax { pos: 2, .. })
        ));
        assert!(parse_ltl("a b").is_err());
    }
}
