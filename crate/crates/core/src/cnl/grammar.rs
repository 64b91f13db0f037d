//! Tokens and grammar of the requirement language.
//!
//! The grammar is a table of productions shared by the recognizer and by
//! [`grammar_export`]. Slots are quoted propositional expressions; in
//! template text they are attribute markers such as `<trigger>`.

use std::collections::BTreeSet;
use std::fmt;

use super::CnlError;
use crate::edtl::AttributeName;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Word(String),
    Comma,
    Period,
    /// Quoted expression text, without the quotes.
    Slot(String),
    /// `<attribute>` marker in template text.
    Marker(AttributeName),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            Token::Comma => f.write_str(","),
            Token::Period => f.write_str("."),
            Token::Slot(s) => write!(f, "'{s}'"),
            Token::Marker(a) => write!(f, "<{a}>"),
        }
    }
}

/// A token and the byte offset where it starts. For slots the offset is
/// that of the expression text inside the quotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub pos: usize,
}

const OPEN_QUOTES: [char; 2] = ['\'', '\u{2018}'];
const CLOSE_QUOTES: [char; 2] = ['\'', '\u{2019}'];

/// Splits phrase text (`markers == false`) or template text
/// (`markers == true`) into tokens.
pub fn tokenize(text: &str, markers: bool) -> Result<Vec<Spanned>, CnlError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ',' || c == '.' {
            chars.next();
            let token = if c == ',' {
                Token::Comma
            } else {
                Token::Period
            };
            out.push(Spanned { token, pos });
        } else if OPEN_QUOTES.contains(&c) {
            chars.next();
            let start = pos + c.len_utf8();
            let mut end = None;
            for (i, d) in chars.by_ref() {
                if CLOSE_QUOTES.contains(&d) {
                    end = Some(i);
                    break;
                }
            }
            let end = end.ok_or_else(|| CnlError::Syntax {
                pos,
                message: "unterminated quoted slot".into(),
            })?;
            let inner = &text[start..end];
            let lead = inner.len() - inner.trim_start().len();
            out.push(Spanned {
                token: Token::Slot(inner.trim().to_string()),
                pos: start + lead,
            });
        } else if markers && c == '<' {
            chars.next();
            let mut name = String::new();
            let mut closed = false;
            for (_, d) in chars.by_ref() {
                if d == '>' {
                    closed = true;
                    break;
                }
                name.push(d);
            }
            let attribute = AttributeName::from_name(name.trim()).filter(|_| closed);
            let attribute = attribute.ok_or_else(|| CnlError::Syntax {
                pos,
                message: format!("unknown slot marker `<{name}`"),
            })?;
            out.push(Spanned {
                token: Token::Marker(attribute),
                pos,
            });
        } else if c.is_alphabetic() {
            let mut word = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !d.is_alphabetic() {
                    break;
                }
                word.push(d);
                chars.next();
            }
            out.push(Spanned {
                token: Token::Word(word),
                pos,
            });
        } else {
            return Err(CnlError::Syntax {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Joins tokens with canonical spacing.
pub fn canonical_text(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() && !matches!(t, Token::Comma | Token::Period) {
            out.push(' ');
        }
        out.push_str(&t.to_string());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Nt {
    Phrase,
    Req,
    BodyTrig,
    CondRea,
    FinRef,
    UntilPart,
    UntilEvt,
    ReaPart,
    BodyInv,
}

impl Nt {
    fn export_name(self) -> &'static str {
        match self {
            Nt::Phrase => "Phrase",
            Nt::Req => "Req",
            Nt::BodyTrig => "<body_trig>",
            Nt::CondRea => "<cond_rea>",
            Nt::FinRef => "<fin_ref>",
            Nt::UntilPart => "<until_part>",
            Nt::UntilEvt => "<until_evt>",
            Nt::ReaPart => "<rea_part>",
            Nt::BodyInv => "<body_inv>",
        }
    }
}

#[derive(Debug)]
enum Sym {
    Word(&'static str),
    Comma,
    Period,
    Slot(AttributeName),
    Nt(Nt),
    Opt(&'static [Sym]),
    Choice(&'static [&'static [Sym]]),
}

use AttributeName::{Delay, Final, Invariant, Reaction, Release, Trigger};
use Sym::{Comma, Opt, Period, Slot, Word};

const fn n(nt: Nt) -> Sym {
    Sym::Nt(nt)
}

const RULES: &[(Nt, &[&[Sym]])] = &[
    (Nt::Phrase, &[&[n(Nt::Req), Opt(&[Period])]]),
    (
        Nt::Req,
        &[
            &[Word("After"), Slot(Trigger), Comma, n(Nt::BodyTrig)],
            &[Slot(Invariant), Word("is"), Word("valid"), n(Nt::BodyInv)],
        ],
    ),
    (
        Nt::BodyTrig,
        &[
            &[Slot(Reaction), Word("occurs"), n(Nt::CondRea)],
            &[
                Slot(Invariant),
                Word("is"),
                Word("valid"),
                n(Nt::UntilPart),
                Opt(&[Comma, Word("and"), n(Nt::ReaPart)]),
            ],
        ],
    ),
    (
        Nt::CondRea,
        &[
            &[Word("now")],
            &[Word("from"), n(Nt::FinRef)],
            &[Word("within"), Slot(Delay), Word("from"), n(Nt::FinRef)],
        ],
    ),
    (Nt::FinRef, &[&[Word("now")], &[Slot(Final)]]),
    (
        Nt::UntilPart,
        &[&[Word("until"), n(Nt::UntilEvt)], &[Word("forever")]],
    ),
    (
        Nt::UntilEvt,
        &[
            &[Word("either"), Slot(Release), Word("or"), Slot(Reaction)],
            &[Slot(Final), Opt(&[Word("occurs")])],
            &[Slot(Reaction)],
            &[Slot(Release)],
        ],
    ),
    (
        Nt::ReaPart,
        &[&[
            Slot(Reaction),
            Sym::Choice(&[&[Word("must"), Word("occur")], &[Word("occurs")]]),
            n(Nt::CondRea),
        ]],
    ),
    (Nt::BodyInv, &[&[n(Nt::UntilPart)], &[Word("forever")]]),
];

fn alternatives(nt: Nt) -> &'static [&'static [Sym]] {
    RULES
        .iter()
        .find(|(lhs, _)| *lhs == nt)
        .map(|(_, alts)| *alts)
        .expect("every nonterminal has a rule")
}

/// Backtracking recognizer that returns every end position reachable from a
/// start position and remembers the farthest token where matching failed.
struct Recognizer<'a> {
    tokens: &'a [Spanned],
    typed: bool,
    farthest: usize,
    expected: BTreeSet<String>,
}

impl Recognizer<'_> {
    fn fail(&mut self, at: usize, what: String) {
        if at > self.farthest {
            self.farthest = at;
            self.expected.clear();
        }
        if at == self.farthest {
            self.expected.insert(what);
        }
    }

    fn terminal(&mut self, at: usize, ok: impl Fn(&Token) -> bool, what: String) -> Vec<usize> {
        match self.tokens.get(at) {
            Some(t) if ok(&t.token) => vec![at + 1],
            _ => {
                self.fail(at, what);
                Vec::new()
            }
        }
    }

    fn seq(&mut self, syms: &[Sym], start: usize) -> Vec<usize> {
        let mut positions = vec![start];
        for s in syms {
            let mut next = Vec::new();
            for p in positions {
                for e in self.sym(s, p) {
                    if !next.contains(&e) {
                        next.push(e);
                    }
                }
            }
            if next.is_empty() {
                return next;
            }
            positions = next;
        }
        positions
    }

    fn choice(&mut self, alts: &[&[Sym]], at: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for alt in alts {
            for e in self.seq(alt, at) {
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out
    }

    fn sym(&mut self, s: &Sym, at: usize) -> Vec<usize> {
        match s {
            Sym::Word(w) => self.terminal(
                at,
                |t| matches!(t, Token::Word(x) if x == w),
                format!("`{w}`"),
            ),
            Sym::Comma => self.terminal(at, |t| *t == Token::Comma, "`,`".into()),
            Sym::Period => self.terminal(at, |t| *t == Token::Period, "`.`".into()),
            Sym::Slot(a) => {
                let typed = self.typed;
                let what = if typed {
                    format!("<{a}>")
                } else {
                    format!("quoted {a}")
                };
                self.terminal(
                    at,
                    |t| match t {
                        Token::Marker(m) => typed && m == a,
                        Token::Slot(_) => !typed,
                        _ => false,
                    },
                    what,
                )
            }
            Sym::Nt(nt) => self.choice(alternatives(*nt), at),
            Sym::Opt(inner) => {
                let mut out = vec![at];
                for e in self.seq(inner, at) {
                    if !out.contains(&e) {
                        out.push(e);
                    }
                }
                out
            }
            Sym::Choice(alts) => self.choice(alts, at),
        }
    }
}

/// Checks token text against the grammar. With `typed`, slots must be the
/// markers of the attribute each grammar position names.
pub fn recognize(tokens: &[Spanned], text_len: usize, typed: bool) -> Result<(), CnlError> {
    let mut r = Recognizer {
        tokens,
        typed,
        farthest: 0,
        expected: BTreeSet::new(),
    };
    let ends = r.sym(&n(Nt::Phrase), 0);
    if ends.contains(&tokens.len()) {
        return Ok(());
    }
    // A complete phrase followed by more text fails after the phrase.
    if let Some(&longest) = ends.iter().max() {
        if longest >= r.farthest {
            r.farthest = longest;
            r.expected = BTreeSet::from(["end of phrase".to_string()]);
        }
    }
    let pos = tokens.get(r.farthest).map_or(text_len, |t| t.pos);
    let found = tokens
        .get(r.farthest)
        .map_or("end of text".to_string(), |t| format!("`{}`", t.token));
    let expected: Vec<String> = r.expected.into_iter().collect();
    Err(CnlError::Syntax {
        pos,
        message: format!("expected {}, found {found}", expected.join(" or ")),
    })
}

fn export_sym(s: &Sym) -> String {
    match s {
        Sym::Word(w) => (*w).to_string(),
        Sym::Comma => ",".into(),
        Sym::Period => ".".into(),
        Sym::Slot(a) => format!("<{a}>"),
        Sym::Nt(nt) => nt.export_name().into(),
        Sym::Opt(inner) => format!("[{}]", export_seq(inner)),
        Sym::Choice(alts) => format!(
            "({})",
            alts.iter()
                .map(|a| export_seq(a))
                .collect::<Vec<_>>()
                .join(" | ")
        ),
    }
}

fn export_seq(syms: &[Sym]) -> String {
    let mut out = String::new();
    for s in syms {
        let part = export_sym(s);
        if !out.is_empty() && !matches!(s, Sym::Comma | Sym::Period) {
            out.push(' ');
        }
        out.push_str(&part);
    }
    out
}

/// The complete grammar in the notation `Req := After <trigger>, <body_trig>`:
/// bare words are terminals, `<attribute>` is a quoted slot and other
/// `<name>`s are nonterminals.
pub fn grammar_export() -> String {
    let mut out = String::new();
    for (lhs, alts) in RULES {
        let head = format!("{} := ", lhs.export_name());
        let indent = " ".repeat(head.len() - 2);
        for (i, alt) in alts.iter().enumerate() {
            if i == 0 {
                out.push_str(&head);
            } else {
                out.push_str(&format!("\n{indent}| "));
            }
            out.push_str(&export_seq(alt));
        }
        out.push('\n');
    }
    let slots: Vec<String> = AttributeName::ALL
        .iter()
        .map(|a| format!("<{a}>"))
        .collect();
    out.push_str(&format!("{} := ' <propexpr> '\n", slots.join(" | ")));
    out.push_str(
        "<propexpr> := <conj> { or <conj> }\n\
         <conj> := <neg> { and <neg> }\n\
         <neg> := not <neg> | <atom>\n\
         <atom> := true | false | <ident> | <ident> <cmp> <int> | ( <propexpr> )\n\
         <cmp> := < | <= | == | != | >= | >\n",
    );
    out
}
