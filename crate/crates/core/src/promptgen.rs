//! Assistant prompts for deriving phrases, and ingestion of the answers.

use thiserror::Error;

use crate::classify::{canonical_class, ClassificationReport, ClassifyError};
use crate::cnl::{
    canonical_text, tokenize, validate_template, CnlCorpus, CnlTemplate, Diagnostic, Provenance,
    Token, BROADER_SEMANTICS,
};
use crate::edtl::{AttributeCombination, AttributeName, Tristate};

/// The base phrase quoted inside the basic prompt.
pub const BASE_PHRASE: &str = "After 'trigger', 'invariant' is valid until either 'release' or 'reaction', and 'reaction' must occur within 'delay' from 'final'.";

const EXPLAIN: &str = "Explain why the resulting sentence is correct.";

const HINTS: &str = "Remember that if invariant is true, then the statement does not depend on the invariant, final = true means that final is now, final = false means that final never happens, delay = false means that the delay is infinite, delay = true means that there is no delay, reaction = false means that we do not wait for the reaction, reaction = true means that the statement does not depend on the reaction.";

/// Order in which constant attributes are listed after `if always`.
pub const ASSIGNMENT_ORDER: [AttributeName; 6] = [
    AttributeName::Trigger,
    AttributeName::Release,
    AttributeName::Delay,
    AttributeName::Final,
    AttributeName::Reaction,
    AttributeName::Invariant,
];

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("combination {0} has no constant attribute; the base phrase already covers it")]
    AllVariable(AttributeCombination),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// The basic prompt: reformulate the base phrase under the constant
/// attribute values of `c`.
pub fn prompt_basic(
    c: &AttributeCombination,
    include_explain: bool,
) -> Result<String, PromptError> {
    let assignments: Vec<String> = ASSIGNMENT_ORDER
        .iter()
        .filter_map(|a| match c.get(*a) {
            Tristate::Var => None,
            Tristate::True => Some(format!("{a} = true")),
            Tristate::False => Some(format!("{a} = false")),
        })
        .collect();
    if assignments.is_empty() {
        return Err(PromptError::AllVariable(*c));
    }
    let mut text = format!(
        "Reformulate in English the following sentence \"{BASE_PHRASE}\" if always {}.",
        assignments.join(", ")
    );
    if include_explain {
        text.push(' ');
        text.push_str(EXPLAIN);
    }
    Ok(text)
}

/// The basic prompt followed by a sentence that quotes the combination's
/// simplified formula over the abbreviation atoms.
pub fn prompt_with_semantics(
    c: &AttributeCombination,
    report: &ClassificationReport,
    include_explain: bool,
) -> Result<String, PromptError> {
    canonical_class(c, report)?;
    let basic = prompt_basic(c, include_explain)?;
    Ok(format!(
        "{basic} The resulting sentence must correspond to the following LTL formula \"{}\".",
        c.semantics()
    ))
}

/// Glosses for the constant attribute values.
pub fn prompt_hints() -> &'static str {
    HINTS
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub combination: AttributeCombination,
    pub basic: String,
    pub with_semantics: Option<String>,
    pub hints: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptOptions {
    pub with_semantics: bool,
    pub hints: bool,
    pub explain: bool,
}

impl Default for PromptOptions {
    fn default() -> Self {
        PromptOptions {
            with_semantics: false,
            hints: false,
            explain: true,
        }
    }
}

impl PromptBundle {
    pub fn build(
        c: &AttributeCombination,
        report: &ClassificationReport,
        options: PromptOptions,
    ) -> Result<Self, PromptError> {
        Ok(PromptBundle {
            combination: *c,
            basic: prompt_basic(c, options.explain)?,
            with_semantics: options
                .with_semantics
                .then(|| prompt_with_semantics(c, report, options.explain))
                .transpose()?,
            hints: options.hints.then(|| HINTS.to_string()),
        })
    }

    /// The prompt to send: basic or with semantics, then the hints when
    /// requested.
    pub fn text(&self) -> String {
        let main = self.with_semantics.as_deref().unwrap_or(&self.basic);
        match &self.hints {
            Some(h) => format!("{main} {h}"),
            None => main.to_string(),
        }
    }
}

const QUOTES: [char; 4] = ['\'', '\u{2018}', '\u{2019}', '"'];

/// The first sentence: text up to the first period outside single quotes,
/// with surrounding whitespace and double quotes removed.
pub fn first_sentence(text: &str) -> &str {
    let text = text.trim().trim_start_matches(['"', '\u{201c}']);
    let mut quoted = false;
    for (i, ch) in text.char_indices() {
        match ch {
            '\'' | '\u{2018}' | '\u{2019}' => quoted = !quoted,
            '.' if !quoted => return &text[..i + 1],
            _ => {}
        }
    }
    text.trim_end().trim_end_matches(['"', '\u{201d}'])
}

/// Replaces quoted attribute names and abbreviations (`'reaction'`, `'rea'`)
/// with slot markers. Other quoted text is left as is.
fn mark_attributes(sentence: &str) -> String {
    let mut out = String::new();
    let mut rest = sentence;
    while let Some(start) = rest.find(|c| QUOTES[..3].contains(&c)) {
        let open = rest[start..].chars().next().expect("quote");
        let after = start + open.len_utf8();
        let Some(len) = rest[after..].find(|c| QUOTES[..3].contains(&c)) else {
            break;
        };
        let inner = rest[after..after + len].trim();
        let close = rest[after + len..].chars().next().expect("quote");
        out.push_str(&rest[..start]);
        match AttributeName::from_name(inner).or_else(|| AttributeName::from_abbreviation(inner)) {
            Some(a) => out.push_str(&format!("<{a}>")),
            None => out.push_str(&rest[start..after + len + close.len_utf8()]),
        }
        rest = &rest[after + len + close.len_utf8()..];
    }
    out.push_str(rest);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub template: CnlTemplate,
    pub corpus: CnlCorpus,
}

/// Turns an assistant answer for combination `c` into a template and a
/// corpus with the next version number. Nothing is written to disk.
pub fn ingest_response(
    c: &AttributeCombination,
    text: &str,
    corpus: &CnlCorpus,
    report: &ClassificationReport,
) -> Result<Ingested, Vec<Diagnostic>> {
    let class = canonical_class(c, report).map_err(|e| vec![Diagnostic::new(e.to_string())])?;
    let sentence = first_sentence(text);
    if sentence.is_empty() {
        return Err(vec![Diagnostic::new("the response is empty".into())]);
    }
    let marked = mark_attributes(sentence);
    let tokens = tokenize(&marked, true).map_err(|e| vec![Diagnostic::new(e.to_string())])?;
    let mut diagnostics: Vec<Diagnostic> = tokens
        .iter()
        .filter_map(|s| match &s.token {
            Token::Slot(q) => Some(Diagnostic {
                message: format!("quoted text '{q}' is not an attribute name"),
                pos: Some(s.pos),
            }),
            _ => None,
        })
        .collect();
    let plain: Vec<Token> = tokens.into_iter().map(|s| s.token).collect();
    let mut template = CnlTemplate::new(
        class.class_id,
        &canonical_text(&plain),
        Provenance::Assistant,
    );
    if *c != class.representative {
        template = template.anchored(*c);
    }
    let reaction_constant = c.get(AttributeName::Reaction).is_const();
    diagnostics.extend(
        validate_template(&template, report)
            .into_iter()
            .filter(|d| !(reaction_constant && d.message.starts_with("missing slot"))),
    );
    if corpus
        .templates_for(class.class_id)
        .any(|t| t.text == template.text && t.combination == template.combination)
    {
        diagnostics.push(Diagnostic::new(
            "the corpus already has this template".into(),
        ));
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    if reaction_constant {
        template = template.not_renderable(BROADER_SEMANTICS);
    } else if corpus.renderable_template(class.class_id).is_some() {
        template = template
            .not_renderable("alternative phrase; the class already has a renderable template");
    }
    Ok(Ingested {
        corpus: corpus.with_template(template.clone()),
        template,
    })
}
