//! Controlled natural language for requirements.
//!
//! Phrases are produced from per-class templates and read back by matching
//! them against the same templates after a grammar check.

mod corpus;
mod grammar;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use corpus::{
    seed_corpus, split_versioned_path, versioned_path, CnlCorpus, CnlTemplate, Provenance,
    BASE_TEMPLATE, BROADER_SEMANTICS,
};
pub use grammar::{canonical_text, grammar_export, recognize, tokenize, Spanned, Token};

use crate::classify::{canonical_class, ClassificationReport, ClassifyError, SemanticClass};
use crate::edtl::{
    combination_of, AttributeCombination, AttributeName, AttributeValue, Requirement, Tristate,
};
use crate::propexpr::{parse_prop, PropError, PropExpr};

#[derive(Debug, Error)]
pub enum CnlError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("slot expression at position {pos}: {source}")]
    SlotExpression { pos: usize, source: PropError },
    #[error("no renderable template for class {class_id}: {diagnostic}")]
    NoTemplate { class_id: usize, diagnostic: String },
    #[error("the phrase is grammatical but matches no template in the corpus")]
    NoMatch,
    #[error("ambiguous phrase, it matches {} templates: {}", candidates.len(), candidates.iter().map(|c| format!("class {} `{}`", c.class_id, c.text)).collect::<Vec<_>>().join("; "))]
    Ambiguous { candidates: Vec<Candidate> },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("template for class {class_id} is unusable: {message}")]
    BadTemplate { class_id: usize, message: String },
    #[error("corpus file name `{0}` must look like name.vN.jsonl")]
    CorpusVersion(String),
    #[error("corpus line {line}: {source}")]
    CorpusLine {
        line: usize,
        source: serde_json::Error,
    },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub class_id: usize,
    pub text: String,
}

/// A validation finding; `pos` is a byte offset into the template text when
/// the finding concerns a location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub pos: Option<usize>,
}

impl Diagnostic {
    pub fn new(message: String) -> Self {
        Diagnostic { message, pos: None }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{} (position {p})", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Replaces each `<attribute>` marker with the quoted value `slot` gives.
pub fn fill(
    text: &str,
    mut slot: impl FnMut(AttributeName) -> Option<String>,
) -> Result<String, CnlError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        out.push_str(&rest[..start]);
        let end = rest[start..]
            .find('>')
            .map(|e| start + e)
            .ok_or_else(|| CnlError::Syntax {
                pos: text.len() - rest.len() + start,
                message: "unterminated slot marker".into(),
            })?;
        let name = &rest[start + 1..end];
        let attribute = AttributeName::from_name(name).ok_or_else(|| CnlError::Syntax {
            pos: text.len() - rest.len() + start,
            message: format!("unknown slot marker `<{name}>`"),
        })?;
        let value = slot(attribute).ok_or_else(|| CnlError::Syntax {
            pos: text.len() - rest.len() + start,
            message: format!("no value for slot <{attribute}>"),
        })?;
        out.push('\'');
        out.push_str(&value);
        out.push('\'');
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Attribute of `from` → attribute of `to` playing the same role in the
/// class formula. Only relevant attributes appear.
fn attribute_map(
    class: &SemanticClass,
    from: &AttributeCombination,
    to: &AttributeCombination,
) -> Result<BTreeMap<AttributeName, AttributeName>, CnlError> {
    let missing = |c: &AttributeCombination| CnlError::BadTemplate {
        class_id: class.class_id,
        message: format!("combination {c} is not a member of the class"),
    };
    let from_atoms = &class.member(from).ok_or_else(|| missing(from))?.atoms;
    let to_atoms = &class.member(to).ok_or_else(|| missing(to))?.atoms;
    let by_canonical: BTreeMap<&String, &String> =
        to_atoms.iter().map(|(abbr, a)| (a, abbr)).collect();
    let attribute = |abbr: &str| AttributeName::from_abbreviation(abbr).expect("abbreviation atom");
    Ok(from_atoms
        .iter()
        .map(|(abbr, a)| (attribute(abbr), attribute(by_canonical[a])))
        .collect())
}

fn anchor_of(t: &CnlTemplate, class: &SemanticClass) -> AttributeCombination {
    t.combination.unwrap_or(class.representative)
}

/// Renders a requirement with its class's renderable template, quoting each
/// slot's expression.
pub fn render_requirement(
    r: &Requirement,
    corpus: &CnlCorpus,
    report: &ClassificationReport,
) -> Result<String, CnlError> {
    let c = combination_of(r);
    let class = canonical_class(&c, report)?;
    let template = corpus.renderable_template(class.class_id).ok_or_else(|| {
        let diagnostic = corpus
            .templates_for(class.class_id)
            .find_map(|t| t.note.clone())
            .unwrap_or_else(|| "the corpus has no template for this class".to_string());
        CnlError::NoTemplate {
            class_id: class.class_id,
            diagnostic,
        }
    })?;
    let map = attribute_map(class, &anchor_of(template, class), &c)?;
    fill(&template.text, |a| match r.get(*map.get(&a)?) {
        AttributeValue::Expr(e) => Some(e.to_string()),
        AttributeValue::Const(_) => None,
    })
    .map_err(|e| CnlError::BadTemplate {
        class_id: class.class_id,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRequirement {
    pub requirement: Requirement,
    pub class_id: usize,
    pub template: String,
    pub warnings: Vec<String>,
}

fn strip_period<T>(tokens: &[T], is_period: impl Fn(&T) -> bool) -> &[T] {
    match tokens.split_last() {
        Some((last, rest)) if is_period(last) => rest,
        _ => tokens,
    }
}

type SlotBindings = BTreeMap<AttributeName, (PropExpr, usize)>;

/// Slot bindings when the phrase has the template's shape.
fn match_template(
    phrase: &[Spanned],
    template: &[Token],
) -> Result<Option<SlotBindings>, CnlError> {
    let phrase = strip_period(phrase, |s| s.token == Token::Period);
    let template = strip_period(template, |t| *t == Token::Period);
    if phrase.len() != template.len() {
        return Ok(None);
    }
    let mut slots = SlotBindings::new();
    for (p, t) in phrase.iter().zip(template) {
        match (&p.token, t) {
            (Token::Slot(text), Token::Marker(a)) => {
                let e = parse_prop(text).map_err(|source| CnlError::SlotExpression {
                    pos: p.pos + prop_error_pos(&source),
                    source,
                })?;
                match slots.get(a) {
                    Some((seen, _)) if *seen != e => return Ok(None),
                    Some(_) => {}
                    None => {
                        slots.insert(*a, (e, p.pos));
                    }
                }
            }
            (x, y) if x == y => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(slots))
}

fn prop_error_pos(e: &PropError) -> usize {
    match e {
        PropError::Syntax { pos, .. } => *pos,
        PropError::Unbound(_) => 0,
    }
}

/// Parses a phrase back into a requirement.
///
/// The phrase must be grammatical and have the shape of exactly one corpus
/// template. Constant attributes come from the template's combination; a
/// variable attribute without a slot gets its abbreviation as a placeholder
/// expression and a warning.
pub fn parse_requirement(
    text: &str,
    corpus: &CnlCorpus,
    report: &ClassificationReport,
) -> Result<ParsedRequirement, CnlError> {
    let tokens = tokenize(text, false)?;
    recognize(&tokens, text.len(), false)?;
    let mut matches = Vec::new();
    for t in &corpus.templates {
        let Ok(shape) = t.tokens() else { continue };
        if let Some(slots) = match_template(&tokens, &shape)? {
            matches.push((t, slots));
        }
    }
    if matches.len() > 1 {
        return Err(CnlError::Ambiguous {
            candidates: matches
                .iter()
                .map(|(t, _)| Candidate {
                    class_id: t.class_id,
                    text: t.text.clone(),
                })
                .collect(),
        });
    }
    let (template, slots) = matches.pop().ok_or(CnlError::NoMatch)?;
    let class = report
        .class(template.class_id)
        .ok_or_else(|| CnlError::BadTemplate {
            class_id: template.class_id,
            message: "class not in the report".into(),
        })?;
    let anchor = anchor_of(template, class);
    let mut warnings = Vec::new();
    if !template.renderable {
        warnings.push(format!(
            "class {}: {}",
            class.class_id,
            template
                .note
                .as_deref()
                .unwrap_or("template is not renderable")
        ));
    }
    let requirement = Requirement::from_fn(|a| match anchor.get(a) {
        Tristate::True => AttributeValue::Const(true),
        Tristate::False => AttributeValue::Const(false),
        Tristate::Var => match slots.get(&a) {
            Some((e, _)) => AttributeValue::Expr(e.clone()),
            None => {
                warnings.push(format!(
                    "{a} has no slot in the phrase; placeholder `{}` used",
                    a.abbreviation()
                ));
                AttributeValue::Expr(PropExpr::var(a.abbreviation()))
            }
        },
    });
    if let Some(a) = slots.keys().find(|a| anchor.get(**a).is_const()) {
        return Err(CnlError::BadTemplate {
            class_id: class.class_id,
            message: format!("slot for constant attribute <{a}>"),
        });
    }
    Ok(ParsedRequirement {
        requirement,
        class_id: class.class_id,
        template: template.text.clone(),
        warnings,
    })
}

/// Checks a template: its class and combination exist, its text derives
/// from the grammar with each marker in a position for that attribute, and
/// its markers are exactly the attributes that matter in the class formula.
pub fn validate_template(t: &CnlTemplate, report: &ClassificationReport) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(class) = report.class(t.class_id) else {
        return vec![Diagnostic::new(format!("unknown class {}", t.class_id))];
    };
    let anchor = anchor_of(t, class);
    if class.member(&anchor).is_none() {
        out.push(Diagnostic::new(format!(
            "combination {anchor} is not a member of class {}",
            class.class_id
        )));
        return out;
    }
    let tokens = match tokenize(&t.text, true) {
        Ok(tokens) => tokens,
        Err(e) => {
            out.push(error_diagnostic(e));
            return out;
        }
    };
    if let Err(e) = recognize(&tokens, t.text.len(), true) {
        out.push(error_diagnostic(e));
    }
    let mut markers: Vec<AttributeName> = tokens
        .iter()
        .filter_map(|s| match s.token {
            Token::Marker(a) => Some(a),
            _ => None,
        })
        .collect();
    markers.sort();
    markers.dedup();
    let relevant = anchor.relevant_attributes();
    for a in &markers {
        if anchor.get(*a).is_const() {
            out.push(Diagnostic::new(format!(
                "slot for constant attribute <{a}>"
            )));
        } else if !relevant.contains(a) {
            out.push(Diagnostic::new(format!(
                "slot <{a}> names an attribute that does not occur in the class formula"
            )));
        }
    }
    for a in relevant {
        if !markers.contains(&a) {
            out.push(Diagnostic::new(format!("missing slot <{a}>")));
        }
    }
    out
}

fn error_diagnostic(e: CnlError) -> Diagnostic {
    match e {
        CnlError::Syntax { pos, message } => Diagnostic {
            message: format!("not derivable from the grammar: {message}"),
            pos: Some(pos),
        },
        other => Diagnostic::new(other.to_string()),
    }
}
