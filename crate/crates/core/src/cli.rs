//! Command-line interface. `run` takes the arguments and output streams so
//! that tests can drive it without a process.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::{classify_all, ClassificationReport, Discrepancy};
use crate::cnl::{
    self, parse_requirement, render_requirement, split_versioned_path, CnlCorpus, CnlError,
};
use crate::edtl::{instantiate, AttributeCombination, Requirement, Tristate};
use crate::ltl::{check_equiv, parse_ltl, OracleBounds};
use crate::promptgen::{ingest_response, PromptBundle, PromptError, PromptOptions};
use crate::sup::{run_monitor, SupParameters, Trace};

/// Classification report shipped with the crate, computed at default bounds.
pub const REPORT_JSON: &str = include_str!("../data/report.json");
/// Seed corpus shipped with the crate.
pub const CORPUS_JSONL: &str = include_str!("../data/corpus.v1.jsonl");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIAGNOSTICS: i32 = 2;
pub const EXIT_DISCREPANCY: i32 = 3;
pub const EXIT_MONITOR_FAIL: i32 = 4;

pub fn embedded_report() -> ClassificationReport {
    ClassificationReport::from_json(REPORT_JSON).expect("shipped report is valid")
}

pub fn embedded_corpus() -> CnlCorpus {
    CnlCorpus::from_jsonl(CORPUS_JSONL, 1).expect("shipped corpus is valid")
}

#[derive(Parser)]
#[command(
    name = "edtl-cnl",
    version,
    about = "EDTL requirements: semantics, classes, phrases and SUP monitoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the LTL semantics of a requirement JSON file.
    Semantics {
        requirement: PathBuf,
        #[arg(long)]
        simplify: bool,
    },
    /// Partition the 729 combinations into semantic classes.
    Classify {
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a requirement JSON file as a phrase.
    Render {
        requirement: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Parse a phrase into requirement JSON.
    Parse {
        phrase: String,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Write assistant prompts for attribute combinations.
    Prompts {
        /// Combination key such as `vtttvf`.
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        comb: Option<String>,
        /// Every combination with at least one constant attribute.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "prompts")]
        out: PathBuf,
        #[arg(long)]
        with_semantics: bool,
        #[arg(long)]
        hints: bool,
        #[arg(long, overrides_with = "no_explain")]
        explain: bool,
        #[arg(long)]
        no_explain: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Add an assistant answer to the corpus as a new corpus version.
    Ingest {
        #[arg(long)]
        comb: String,
        /// File holding the answer text.
        response: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Base path of the new corpus file; `.vN.jsonl` is appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check two LTL formulas for equivalence on bounded lasso traces.
    Equiv {
        f1: String,
        f2: String,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// SUP monitoring.
    Sup {
        #[command(subcommand)]
        command: SupCommand,
    },
    /// Print the phrase grammar.
    Grammar,
}

#[derive(Subcommand)]
enum SupCommand {
    /// Run the observer on a CSV trace.
    Run { params: PathBuf, trace: PathBuf },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "prefix")]
    prefix: Option<usize>,
    #[arg(long = "loop")]
    loop_: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl BoundsArgs {
    fn bounds(&self) -> OracleBounds {
        let d = OracleBounds::default();
        OracleBounds {
            prefix_max: self.prefix.unwrap_or(d.prefix_max),
            loop_max: self.loop_.unwrap_or(d.loop_max),
            random_samples: self.samples.unwrap_or(d.random_samples),
            seed: self.seed.unwrap_or(d.seed),
            trace_cap: d.trace_cap,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Corpus file `name.vN.jsonl`; defaults to the shipped seed corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Classification report; defaults to the shipped report.
    #[arg(long)]
    report: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn usage(message: impl Display) -> Failure {
    fail(EXIT_USAGE, message)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_report(path: Option<&Path>) -> Result<ClassificationReport, Failure> {
    match path {
        Some(p) => ClassificationReport::from_json(&read(p)?)
            .map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => Ok(embedded_report()),
    }
}

fn load_corpus(path: Option<&Path>) -> Result<CnlCorpus, Failure> {
    match path {
        Some(p) => CnlCorpus::load(p).map_err(usage),
        None => Ok(embedded_corpus()),
    }
}

fn load_requirement(path: &Path) -> Result<Requirement, Failure> {
    Requirement::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_key(key: &str) -> Result<AttributeCombination, Failure> {
    key.parse().map_err(usage)
}

fn cnl_failure(e: CnlError) -> Failure {
    match e {
        CnlError::Syntax { .. } | CnlError::SlotExpression { .. } | CnlError::Io(..) => usage(e),
        _ => fail(EXIT_DIAGNOSTICS, e),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    usage(e)
}

/// Runs the command line `args` (program name first) and returns the exit
/// status. Payloads go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Semantics {
            requirement,
            simplify,
        } => {
            let r = load_requirement(&requirement)?;
            writeln!(out, "{}", instantiate(&r, simplify)).map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Classify { bounds, out: path } => {
            let bounds = bounds.bounds();
            if bounds.loop_max == 0 {
                return Err(usage("--loop must be at least 1"));
            }
            let report = classify_all(&bounds);
            let json = report.to_json() + "\n";
            match path {
                Some(p) => {
                    std::fs::write(&p, json).map_err(|e| usage(format!("{}: {e}", p.display())))?
                }
                None => out.write_all(json.as_bytes()).map_err(io_failure)?,
            }
            if report.matches_expected_count() {
                return Ok(EXIT_OK);
            }
            write_discrepancy_summary(&report, err).map_err(io_failure)?;
            Ok(EXIT_DISCREPANCY)
        }
        Command::Render { requirement, data } => {
            let r = load_requirement(&requirement)?;
            let report = load_report(data.report.as_deref())?;
            let corpus = load_corpus(data.corpus.as_deref())?;
            let phrase = render_requirement(&r, &corpus, &report).map_err(cnl_failure)?;
            writeln!(out, "{phrase}").map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Parse { phrase, data } => {
            let report = load_report(data.report.as_deref())?;
            let corpus = load_corpus(data.corpus.as_deref())?;
            let parsed = parse_requirement(&phrase, &corpus, &report).map_err(cnl_failure)?;
            writeln!(out, "{}", parsed.requirement.to_json()).map_err(io_failure)?;
            for w in &parsed.warnings {
                writeln!(err, "warning: {w}").map_err(io_failure)?;
            }
            Ok(if parsed.warnings.is_empty() {
                EXIT_OK
            } else {
                EXIT_DIAGNOSTICS
            })
        }
        Command::Prompts {
            comb,
            all: _,
            out: dir,
            with_semantics,
            hints,
            explain: _,
            no_explain,
            report,
        } => {
            let report = load_report(report.as_deref())?;
            let options = PromptOptions {
                with_semantics,
                hints,
                explain: !no_explain,
            };
            let combinations: Vec<AttributeCombination> = match comb {
                Some(k) => vec![parse_key(&k)?],
                None => crate::edtl::enumerate_combinations()
                    .into_iter()
                    .filter(|c| c.values().iter().any(|t| *t != Tristate::Var))
                    .collect(),
            };
            let bundles = combinations
                .iter()
                .map(|c| PromptBundle::build(c, &report, options))
                .collect::<Result<Vec<_>, PromptError>>()
                .map_err(usage)?;
            std::fs::create_dir_all(&dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            for b in bundles {
                let path = dir.join(format!("{}.txt", b.combination));
                std::fs::write(&path, b.text() + "\n")
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                writeln!(out, "{}", path.display()).map_err(io_failure)?;
            }
            Ok(EXIT_OK)
        }
        Command::Ingest {
            comb,
            response,
            data,
            out: base,
        } => {
            let c = parse_key(&comb)?;
            let text = read(&response)?;
            let report = load_report(data.report.as_deref())?;
            let corpus = load_corpus(data.corpus.as_deref())?;
            let base = match (base, &data.corpus) {
                (Some(b), _) => b,
                (None, Some(p)) => split_versioned_path(p).map_err(usage)?.0,
                (None, None) => PathBuf::from("corpus"),
            };
            match ingest_response(&c, &text, &corpus, &report) {
                Ok(ingested) => {
                    let path = ingested.corpus.write_new(&base).map_err(cnl_failure)?;
                    if let Some(note) = &ingested.template.note {
                        writeln!(err, "note: {note}").map_err(io_failure)?;
                    }
                    writeln!(out, "{}", path.display()).map_err(io_failure)?;
                    Ok(EXIT_OK)
                }
                Err(diagnostics) => {
                    for d in diagnostics {
                        writeln!(err, "{d}").map_err(io_failure)?;
                    }
                    Ok(EXIT_DIAGNOSTICS)
                }
            }
        }
        Command::Equiv { f1, f2, bounds } => {
            let f = parse_ltl(&f1).map_err(|e| usage(format!("first formula: {e}")))?;
            let g = parse_ltl(&f2).map_err(|e| usage(format!("second formula: {e}")))?;
            let verdict = check_equiv(&f, &g, &bounds.bounds()).map_err(usage)?;
            let json = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
            writeln!(out, "{json}").map_err(io_failure)?;
            Ok(if verdict.is_equivalent() {
                EXIT_OK
            } else {
                EXIT_DIAGNOSTICS
            })
        }
        Command::Sup {
            command: SupCommand::Run { params, trace },
        } => {
            let p = SupParameters::from_json(&read(&params)?)
                .map_err(|e| usage(format!("{}: {e}", params.display())))?;
            let file = std::fs::File::open(&trace)
                .map_err(|e| usage(format!("{}: {e}", trace.display())))?;
            let tr =
                Trace::from_csv(file).map_err(|e| usage(format!("{}: {e}", trace.display())))?;
            let verdict = run_monitor(&p, &tr).map_err(usage)?;
            let json = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
            writeln!(out, "{json}").map_err(io_failure)?;
            Ok(if verdict.pass {
                EXIT_OK
            } else {
                EXIT_MONITOR_FAIL
            })
        }
        Command::Grammar => {
            write!(out, "{}", cnl::grammar_export()).map_err(io_failure)?;
            Ok(EXIT_OK)
        }
    }
}

fn write_discrepancy_summary(
    report: &ClassificationReport,
    err: &mut dyn Write,
) -> std::io::Result<()> {
    let (mut merges, mut distinct, mut limits) = (0, 0, 0);
    for d in &report.discrepancies {
        match d {
            Discrepancy::CountMismatch { expected, found } => {
                writeln!(err, "class count {found}, expected {expected}")?;
            }
            Discrepancy::Merge { .. } => merges += 1,
            Discrepancy::Distinct { .. } => distinct += 1,
            Discrepancy::OracleLimit { .. } => limits += 1,
            Discrepancy::Constant {
                class_id,
                formula,
                members,
                trigger_false,
            } => writeln!(
                err,
                "class {class_id} is `{formula}` ({members} members, {trigger_false} with a false trigger)"
            )?,
            Discrepancy::Trigger {
                trigger_true_classes,
                variable_trigger_nonconstant,
            } => writeln!(
                err,
                "{} classes have a constantly true trigger; {variable_trigger_nonconstant} classes have a variable trigger and a non-constant formula",
                trigger_true_classes.len()
            )?,
            Discrepancy::VacuousAtom {
                class_id,
                atom,
                value,
                reduced,
            } => writeln!(err, "class {class_id}: fixing {atom} = {value} leaves the formula unchanged ({reduced})")?,
        }
    }
    writeln!(
        err,
        "evidence: {merges} merges, {distinct} separated class pairs, {limits} oracle limits"
    )
}
