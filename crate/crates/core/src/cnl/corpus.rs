//! Phrase templates and versioned corpus files.
//!
//! A corpus file holds one JSON template per line and carries its version in
//! the file name (`corpus.v3.jsonl`). Corpora are never edited in place:
//! adding a template writes the next version next to the current one.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grammar::{canonical_text, tokenize, Token};
use super::{validate_template, CnlError, Diagnostic};
use crate::classify::{canonical_class, ClassificationReport};
use crate::edtl::AttributeCombination;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Assistant,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnlTemplate {
    pub class_id: usize,
    /// Phrase text with `<attribute>` slot markers.
    pub text: String,
    pub provenance: Provenance,
    pub renderable: bool,
    /// Why a template is not renderable, or other review remarks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// The class member whose attributes the markers name. Defaults to the
    /// class representative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combination: Option<AttributeCombination>,
}

impl CnlTemplate {
    pub fn new(class_id: usize, text: &str, provenance: Provenance) -> Self {
        CnlTemplate {
            class_id,
            text: text.to_string(),
            provenance,
            renderable: true,
            note: None,
            combination: None,
        }
    }

    pub fn anchored(mut self, c: AttributeCombination) -> Self {
        self.combination = Some(c);
        self
    }

    pub fn not_renderable(mut self, note: &str) -> Self {
        self.renderable = false;
        self.note = Some(note.to_string());
        self
    }

    /// The combination the slot markers refer to.
    pub fn anchor(&self, report: &ClassificationReport) -> Option<AttributeCombination> {
        self.combination
            .or_else(|| report.class(self.class_id).map(|c| c.representative))
    }

    pub fn tokens(&self) -> Result<Vec<Token>, CnlError> {
        Ok(tokenize(&self.text, true)?
            .into_iter()
            .map(|s| s.token)
            .collect())
    }

    /// Template text with canonical spacing.
    pub fn canonical_text(&self) -> Result<String, CnlError> {
        Ok(canonical_text(&self.tokens()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnlCorpus {
    pub version: u32,
    pub templates: Vec<CnlTemplate>,
}

/// Splits `dir/name.vN.jsonl` into `(dir/name, N)`.
pub fn split_versioned_path(path: &Path) -> Result<(PathBuf, u32), CnlError> {
    let bad = || CnlError::CorpusVersion(path.display().to_string());
    let file = path.file_name().and_then(|f| f.to_str()).ok_or_else(bad)?;
    let stem = file.strip_suffix(".jsonl").ok_or_else(bad)?;
    let (name, version) = stem.rsplit_once(".v").ok_or_else(bad)?;
    let version: u32 = version.parse().map_err(|_| bad())?;
    if name.is_empty() {
        return Err(bad());
    }
    Ok((path.with_file_name(name), version))
}

pub fn versioned_path(base: &Path, version: u32) -> PathBuf {
    let name = base
        .file_name()
        .and_then(|f| f.to_str())
        .unwrap_or("corpus");
    base.with_file_name(format!("{name}.v{version}.jsonl"))
}

impl CnlCorpus {
    pub fn from_jsonl(text: &str, version: u32) -> Result<Self, CnlError> {
        let mut templates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let t: CnlTemplate =
                serde_json::from_str(line).map_err(|source| CnlError::CorpusLine {
                    line: i + 1,
                    source,
                })?;
            templates.push(t);
        }
        Ok(CnlCorpus { version, templates })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.templates {
            out.push_str(&serde_json::to_string(t).expect("template serializes"));
            out.push('\n');
        }
        out
    }

    /// Loads `name.vN.jsonl`; the version comes from the file name.
    pub fn load(path: &Path) -> Result<Self, CnlError> {
        let (_, version) = split_versioned_path(path)?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CnlError::Io(path.display().to_string(), e))?;
        Self::from_jsonl(&text, version)
    }

    /// Writes this corpus as `base.vN.jsonl`, refusing to overwrite.
    pub fn write_new(&self, base: &Path) -> Result<PathBuf, CnlError> {
        let path = versioned_path(base, self.version);
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| CnlError::Io(path.display().to_string(), e))?;
        file.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| CnlError::Io(path.display().to_string(), e))?;
        Ok(path)
    }

    pub fn renderable_template(&self, class_id: usize) -> Option<&CnlTemplate> {
        self.templates
            .iter()
            .find(|t| t.class_id == class_id && t.renderable)
    }

    pub fn templates_for(&self, class_id: usize) -> impl Iterator<Item = &CnlTemplate> {
        self.templates
            .iter()
            .filter(move |t| t.class_id == class_id)
    }

    /// A copy with one more template and the next version number.
    pub fn with_template(&self, t: CnlTemplate) -> CnlCorpus {
        let mut templates = self.templates.clone();
        templates.push(t);
        CnlCorpus {
            version: self.version + 1,
            templates,
        }
    }

    /// Corpus-level checks: renderable templates validate cleanly, at most
    /// one renderable template per class, non-renderable ones say why.
    pub fn check(&self, report: &ClassificationReport) -> Vec<(usize, Diagnostic)> {
        let mut out = Vec::new();
        let mut renderable: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, t) in self.templates.iter().enumerate() {
            if t.renderable {
                for d in validate_template(t, report) {
                    out.push((i, d));
                }
                if let Some(first) = renderable.insert(t.class_id, i) {
                    out.push((
                        i,
                        Diagnostic::new(format!(
                            "class {} already has a renderable template (line {})",
                            t.class_id,
                            first + 1
                        )),
                    ));
                }
            } else if t.note.is_none() {
                out.push((
                    i,
                    Diagnostic::new("non-renderable template without a note".into()),
                ));
            }
        }
        out
    }
}

/// Note attached to phrases from combinations with a constant reaction.
pub const BROADER_SEMANTICS: &str = "constant reaction: the phrase has a broader semantics than the class formula, so it is kept out of the language";

const NOT_IN_GRAMMAR: &str =
    "formula-guided phrase outside the grammar; the class has a phrase derived with attribute hints";

pub const BASE_TEMPLATE: &str = "After <trigger>, <invariant> is valid until either <release> or <reaction>, and <reaction> must occur within <delay> from <final>.";

/// Seed phrases: the base pattern, the three phrases derived with
/// attribute hints and the three derived with the formula.
pub fn seed_corpus(report: &ClassificationReport) -> CnlCorpus {
    let key = |k: &str| -> AttributeCombination { k.parse().expect("valid key") };
    let class_of = |c: AttributeCombination| {
        canonical_class(&c, report)
            .expect("report covers every combination")
            .class_id
    };
    let anchored = |k: &str, text: &str| {
        let c = key(k);
        let t = CnlTemplate::new(class_of(c), text, Provenance::Paper);
        if report.class(t.class_id).map(|cl| cl.representative) == Some(c) {
            t
        } else {
            t.anchored(c)
        }
    };
    let row1 = "vtttvf";
    let row2 = "vvtvvv";
    let row3 = "vvvttf";
    let templates = vec![
        anchored("vvvvvv", BASE_TEMPLATE),
        anchored(row1, "After <trigger>, <reaction> occurs now."),
        anchored(
            row2,
            "After <trigger>, <invariant> is valid until either <release> or <reaction>, and <reaction> occurs within <delay> from now.",
        ),
        anchored(row3, "After <trigger>, <invariant> is valid forever.").not_renderable(BROADER_SEMANTICS),
        anchored(row1, "After <trigger>, <reaction> must occur.").not_renderable(NOT_IN_GRAMMAR),
        anchored(
            row2,
            "After <trigger>, <invariant> must hold and <delay> must not occur until either <release> or <reaction> occurs.",
        )
        .not_renderable(NOT_IN_GRAMMAR),
        anchored(row3, "After <trigger>, <invariant> must hold until <final> occurs")
            .not_renderable(BROADER_SEMANTICS),
    ];
    CnlCorpus {
        version: 1,
        templates,
    }
}
