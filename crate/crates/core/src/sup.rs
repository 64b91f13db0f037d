//! Simplified Universal Pattern: parameters, interval interpretation and a
//! discrete-time observer in the progress interpretation.
//!
//! One observation cycle runs through three phases. In the trigger phase
//! the start event opens the cycle, the trigger condition must hold, and the
//! end event must come within `[tmin, tmax]`. The local phase then waits
//! `[lmin, lmax]` ticks for the action start event, after which the action
//! condition must hold until the action end event arrives within
//! `[amin, amax]`.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::edtl::Tristate;
use crate::propexpr::{eval_prop, parse_prop, CmpOp, PropError, PropExpr, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeBound {
    Finite(u32),
    Infinity,
}

impl TimeBound {
    /// Whether `elapsed` ticks have reached this bound.
    fn reached(self, elapsed: u64) -> bool {
        match self {
            TimeBound::Finite(b) => elapsed >= u64::from(b),
            TimeBound::Infinity => false,
        }
    }

    fn below(self, elapsed: u64) -> bool {
        !self.reached(elapsed)
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeBound::Finite(b) => write!(f, "{b}"),
            TimeBound::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for TimeBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(TimeBound::Infinity),
            t => t.parse().map(TimeBound::Finite).map_err(|_| {
                format!("time bound must be a non-negative integer or \"inf\", got `{s}`")
            }),
        }
    }
}

impl Serialize for TimeBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TimeBound::Finite(b) => s.serialize_u32(*b),
            TimeBound::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TimeBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .map(TimeBound::Finite)
                .ok_or_else(|| de::Error::custom(format!("time bound out of range: {n}"))),
            serde_json::Value::String(s) => s.parse().map_err(de::Error::custom),
            other => Err(de::Error::custom(format!("invalid time bound {other}"))),
        }
    }
}

/// Reads an interval as an attribute value: `[0, 0]` is false, `[0, inf)`
/// is true and anything else constrains the elapsed time `t`.
pub fn interpret_interval(lo: TimeBound, hi: TimeBound) -> (Tristate, Option<PropExpr>) {
    let t_at_least = |b: u32| PropExpr::Compare("t".into(), CmpOp::Ge, i64::from(b));
    match (lo, hi) {
        (TimeBound::Finite(0), TimeBound::Finite(0)) => (Tristate::False, None),
        (TimeBound::Finite(0), TimeBound::Infinity) => (Tristate::True, None),
        (TimeBound::Finite(l), TimeBound::Infinity) => (Tristate::Var, Some(t_at_least(l))),
        (TimeBound::Finite(l), TimeBound::Finite(h)) => (
            Tristate::Var,
            Some(PropExpr::and(
                t_at_least(l),
                PropExpr::Compare("t".into(), CmpOp::Le, i64::from(h)),
            )),
        ),
        (TimeBound::Infinity, _) => (Tristate::Var, Some(PropExpr::Const(false))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpretation {
    #[default]
    Progress,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupParameters {
    pub tse: PropExpr,
    pub tc: PropExpr,
    pub tee: PropExpr,
    pub tec: PropExpr,
    pub tmin: TimeBound,
    pub tmax: TimeBound,
    pub ase: PropExpr,
    pub ac: PropExpr,
    pub aee: PropExpr,
    pub aec: PropExpr,
    pub amin: TimeBound,
    pub amax: TimeBound,
    pub lmin: TimeBound,
    pub lmax: TimeBound,
    pub interpretation: Interpretation,
    /// Duration of one tick in milliseconds. Metadata only.
    pub tick_ms: u32,
}

#[derive(Debug, Error)]
pub enum SupError {
    #[error("{0}")]
    Prop(#[from] PropError),
    #[error("parameter `{key}`: {source}")]
    Expression {
        key: &'static str,
        source: PropError,
    },
    #[error("interval [{0}, {1}] is empty")]
    Interval(&'static str, &'static str),
    #[error("malformed parameters: {0}")]
    Json(#[from] serde_json::Error),
    #[error("trace: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace row {row}, column `{column}`: expected an integer, got `{value}`")]
    Cell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("trace has no ticks")]
    EmptyTrace,
}

/// TSE = TC = TEE = `trigger`, ASE = AC = AEE = `action`, TEC = AEC =
/// false and every bound 0.
pub fn default_params(trigger: PropExpr, action: PropExpr) -> SupParameters {
    let zero = TimeBound::Finite(0);
    SupParameters {
        tse: trigger.clone(),
        tc: trigger.clone(),
        tee: trigger,
        tec: PropExpr::Const(false),
        tmin: zero,
        tmax: zero,
        ase: action.clone(),
        ac: action.clone(),
        aee: action,
        aec: PropExpr::Const(false),
        amin: zero,
        amax: zero,
        lmin: zero,
        lmax: zero,
        interpretation: Interpretation::Progress,
        tick_ms: 1,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    tse: Option<String>,
    tc: Option<String>,
    tee: Option<String>,
    tec: Option<String>,
    tmin: Option<TimeBound>,
    tmax: Option<TimeBound>,
    ase: Option<String>,
    ac: Option<String>,
    aee: Option<String>,
    aec: Option<String>,
    amin: Option<TimeBound>,
    amax: Option<TimeBound>,
    lmin: Option<TimeBound>,
    lmax: Option<TimeBound>,
    #[serde(default)]
    interpretation: Interpretation,
    tick_ms: Option<u32>,
}

impl SupParameters {
    /// Reads the JSON form. Omitted keys take defaults; an omitted trigger
    /// expression copies the first given of `tse`, `tc`, `tee` (likewise for
    /// the action), or `true` when none is given.
    pub fn from_json(text: &str) -> Result<Self, SupError> {
        let raw: RawParams = serde_json::from_str(text)?;
        let parse = |key: &'static str, v: &Option<String>| -> Result<Option<PropExpr>, SupError> {
            v.as_deref()
                .map(|s| parse_prop(s).map_err(|source| SupError::Expression { key, source }))
                .transpose()
        };
        let (tse, tc, tee) = (
            parse("tse", &raw.tse)?,
            parse("tc", &raw.tc)?,
            parse("tee", &raw.tee)?,
        );
        let (ase, ac, aee) = (
            parse("ase", &raw.ase)?,
            parse("ac", &raw.ac)?,
            parse("aee", &raw.aee)?,
        );
        let trigger = tse
            .clone()
            .or(tc.clone())
            .or(tee.clone())
            .unwrap_or(PropExpr::Const(true));
        let action = ase
            .clone()
            .or(ac.clone())
            .or(aee.clone())
            .unwrap_or(PropExpr::Const(true));
        let mut p = default_params(trigger, action);
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = $field { p.$field = v; } )* };
        }
        set!(tse, tc, tee, ase, ac, aee);
        if let Some(e) = parse("tec", &raw.tec)? {
            p.tec = e;
        }
        if let Some(e) = parse("aec", &raw.aec)? {
            p.aec = e;
        }
        let bounds = [
            (&mut p.tmin, raw.tmin),
            (&mut p.tmax, raw.tmax),
            (&mut p.amin, raw.amin),
            (&mut p.amax, raw.amax),
            (&mut p.lmin, raw.lmin),
            (&mut p.lmax, raw.lmax),
        ];
        for (slot, v) in bounds {
            if let Some(v) = v {
                *slot = v;
            }
        }
        p.interpretation = raw.interpretation;
        if let Some(ms) = raw.tick_ms {
            p.tick_ms = ms;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let e = |x: &PropExpr| serde_json::Value::String(x.to_string());
        let b = |x: &TimeBound| serde_json::to_value(x).expect("bound serializes");
        serde_json::json!({
            "tse": e(&self.tse), "tc": e(&self.tc), "tee": e(&self.tee), "tec": e(&self.tec),
            "tmin": b(&self.tmin), "tmax": b(&self.tmax),
            "ase": e(&self.ase), "ac": e(&self.ac), "aee": e(&self.aee), "aec": e(&self.aec),
            "amin": b(&self.amin), "amax": b(&self.amax),
            "lmin": b(&self.lmin), "lmax": b(&self.lmax),
            "interpretation": self.interpretation,
            "tick_ms": self.tick_ms,
        })
        .to_string()
    }

    pub fn validate(&self) -> Result<(), SupError> {
        if self.tmin > self.tmax {
            return Err(SupError::Interval("tmin", "tmax"));
        }
        if self.amin > self.amax {
            return Err(SupError::Interval("amin", "amax"));
        }
        if self.lmin > self.lmax {
            return Err(SupError::Interval("lmin", "lmax"));
        }
        Ok(())
    }
}

/// One valuation per tick, tick 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace(pub Vec<Valuation>);

impl Trace {
    pub fn new(ticks: Vec<Valuation>) -> Result<Self, SupError> {
        if ticks.is_empty() {
            return Err(SupError::EmptyTrace);
        }
        Ok(Trace(ticks))
    }

    /// A trace with a single Boolean `name` that is true exactly at `on`.
    pub fn pulses(name: &str, len: usize, on: &[usize]) -> Result<Self, SupError> {
        Self::new(
            (0..len)
                .map(|t| Valuation::new().with_bool(name, on.contains(&t)))
                .collect(),
        )
    }

    /// Header row of identifiers, one row per tick. A `0` or `1` cell sets
    /// both the Boolean and the integer value; other integers set only the
    /// integer value.
    pub fn from_csv(reader: impl Read) -> Result<Self, SupError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut ticks = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let mut v = Valuation::new();
            for (column, cell) in header.iter().zip(record.iter()) {
                let value: i64 = match cell {
                    "true" => 1,
                    "false" => 0,
                    c => c.parse().map_err(|_| SupError::Cell {
                        row: row + 1,
                        column: column.clone(),
                        value: c.to_string(),
                    })?,
                };
                if value == 0 || value == 1 {
                    v.set_bool(column.clone(), value == 1);
                }
                v.set_int(column.clone(), value);
            }
            ticks.push(v);
        }
        Self::new(ticks)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reason {
    #[serde(rename = "TEE-window-missed")]
    TeeWindowMissed,
    #[serde(rename = "TC-violated")]
    TcViolated,
    #[serde(rename = "TEC-exit")]
    TecExit,
    #[serde(rename = "ASE-window-missed")]
    AseWindowMissed,
    #[serde(rename = "AC-violated")]
    AcViolated,
    #[serde(rename = "AEE-window-missed")]
    AeeWindowMissed,
    #[serde(rename = "AEC-abort")]
    AecAbort,
    #[serde(rename = "trace-exhausted")]
    TraceExhausted,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("reason serializes");
        f.write_str(s.as_str().expect("reason is a string"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "reason", rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Fail(Reason),
    Abort(Reason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    /// Tick of the trigger start event.
    pub start: usize,
    /// Tick of the trigger end event, once seen.
    pub tee: Option<usize>,
    /// Tick of the action start event, once seen.
    pub ase: Option<usize>,
    /// Tick at which the cycle closed.
    pub end: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupVerdict {
    pub cycles: Vec<Cycle>,
    pub pass: bool,
}

impl SupVerdict {
    pub fn successes(&self) -> usize {
        self.cycles
            .iter()
            .filter(|c| c.outcome == Outcome::Success)
            .count()
    }

    pub fn first_failure(&self) -> Option<&Cycle> {
        self.cycles
            .iter()
            .find(|c| matches!(c.outcome, Outcome::Fail(_)))
    }
}

enum Phase {
    Trigger,
    Local { tee: usize },
    Action { tee: usize, ase: usize },
}

/// Runs the observer over the trace.
///
/// Within a tick the checks run in this order. Trigger phase: exit
/// condition, trigger condition, end event, deadline. Local phase: start
/// event (failing if early), deadline. Action phase: exit condition, end
/// event, action condition (only strictly between the two events), deadline.
/// A phase that ends moves on to the next phase at the same tick. When a
/// cycle closes at a later tick than it started, that tick may start the
/// next cycle; otherwise the next cycle starts one tick later.
pub fn run_monitor(p: &SupParameters, tr: &Trace) -> Result<SupVerdict, SupError> {
    let holds = |e: &PropExpr, t: usize| eval_prop(e, &tr.0[t]);
    let mut cycles = Vec::new();
    let mut t = 0;
    while t < tr.len() {
        if !holds(&p.tse, t)? {
            t += 1;
            continue;
        }
        let start = t;
        let mut phase = Phase::Trigger;
        let closed = loop {
            if t >= tr.len() {
                break None;
            }
            let next = match phase {
                Phase::Trigger => {
                    let d = (t - start) as u64;
                    if holds(&p.tec, t)? {
                        Some(Outcome::Abort(Reason::TecExit))
                    } else if !holds(&p.tc, t)? {
                        Some(Outcome::Fail(Reason::TcViolated))
                    } else if holds(&p.tee, t)? && p.tmin.reached(d) {
                        phase = Phase::Local { tee: t };
                        continue;
                    } else if p.tmax.reached(d) {
                        Some(Outcome::Fail(Reason::TeeWindowMissed))
                    } else {
                        None
                    }
                }
                Phase::Local { tee } => {
                    let d = (t - tee) as u64;
                    if holds(&p.ase, t)? {
                        if p.lmin.below(d) {
                            Some(Outcome::Fail(Reason::AseWindowMissed))
                        } else {
                            phase = Phase::Action { tee, ase: t };
                            continue;
                        }
                    } else if p.lmax.reached(d) {
                        Some(Outcome::Fail(Reason::AseWindowMissed))
                    } else {
                        None
                    }
                }
                Phase::Action { ase, .. } => {
                    let d = (t - ase) as u64;
                    if holds(&p.aec, t)? {
                        Some(Outcome::Abort(Reason::AecAbort))
                    } else if holds(&p.aee, t)? && p.amin.reached(d) {
                        Some(Outcome::Success)
                    } else if t > ase && !holds(&p.ac, t)? {
                        Some(Outcome::Fail(Reason::AcViolated))
                    } else if p.amax.reached(d) {
                        Some(Outcome::Fail(Reason::AeeWindowMissed))
                    } else {
                        None
                    }
                }
            };
            match next {
                Some(outcome) => break Some(outcome),
                None => t += 1,
            }
        };
        let (tee, ase) = match phase {
            Phase::Trigger => (None, None),
            Phase::Local { tee } => (Some(tee), None),
            Phase::Action { tee, ase } => (Some(tee), Some(ase)),
        };
        match closed {
            Some(outcome) => {
                cycles.push(Cycle {
                    start,
                    tee,
                    ase,
                    end: t,
                    outcome,
                });
                if t == start {
                    t += 1;
                }
            }
            None => {
                cycles.push(Cycle {
                    start,
                    tee,
                    ase,
                    end: tr.len() - 1,
                    outcome: Outcome::Abort(Reason::TraceExhausted),
                });
                break;
            }
        }
    }
    let pass = !cycles.iter().any(|c| matches!(c.outcome, Outcome::Fail(_)));
    Ok(SupVerdict { cycles, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inp() -> PropExpr {
        PropExpr::var("inp_1")
    }

    fn periodic(p: &SupParameters, period: usize) -> SupVerdict {
        let on: Vec<usize> = (1..=4).map(|k| k * period).collect();
        run_monitor(p, &Trace::pulses("inp_1", 4 * period + 1, &on).unwrap()).unwrap()
    }

    fn action(amin: u32, amax: u32) -> SupParameters {
        let mut p = default_params(PropExpr::Const(true), PropExpr::Const(true));
        p.aee = inp();
        p.ac = PropExpr::not(inp());
        p.amin = TimeBound::Finite(amin);
        p.amax = TimeBound::Finite(amax);
        p
    }

    #[test]
    fn degenerate_defaults_succeed_every_tick() {
        let p = default_params(PropExpr::Const(true), PropExpr::Const(true));
        let v = run_monitor(&p, &Trace::pulses("x", 5, &[]).unwrap()).unwrap();
        assert_eq!(v.cycles.len(), 5);
        for (i, c) in v.cycles.iter().enumerate() {
            assert_eq!((c.start, c.end, c.outcome), (i, i, Outcome::Success));
        }
    }

    #[test]
    fn exact_period_passes_and_late_pulse_fails() {
        let p = action(35, 35);
        let v = periodic(&p, 35);
        assert!(v.pass);
        assert_eq!(v.successes(), 4);
        assert_eq!(
            v.cycles.last().unwrap().outcome,
            Outcome::Abort(Reason::TraceExhausted)
        );
        let v = run_monitor(&p, &Trace::pulses("inp_1", 141, &[36]).unwrap()).unwrap();
        assert_eq!(v.cycles[0].outcome, Outcome::Fail(Reason::AeeWindowMissed));
        assert_eq!(v.cycles[0].end, 35);
    }

    #[test]
    fn early_pulse_violates_action_condition() {
        let v = periodic(&action(30, 40), 20);
        assert_eq!(
            v.first_failure().unwrap().outcome,
            Outcome::Fail(Reason::AcViolated)
        );
    }

    #[test]
    fn exit_conditions_abort() {
        let mut p = action(5, 5);
        p.aec = PropExpr::var("stop");
        let tr = Trace::new(
            (0..8)
                .map(|t| {
                    Valuation::new()
                        .with_bool("inp_1", false)
                        .with_bool("stop", t == 3)
                })
                .collect(),
        )
        .unwrap();
        let v = run_monitor(&p, &tr).unwrap();
        assert_eq!(v.cycles[0].outcome, Outcome::Abort(Reason::AecAbort));
        assert!(v.pass);
    }

    #[test]
    fn trigger_and_local_windows() {
        let mut p = default_params(PropExpr::var("go"), PropExpr::var("act"));
        p.tc = PropExpr::Const(true);
        p.tee = PropExpr::var("done");
        p.tmax = TimeBound::Finite(2);
        let row = |go, done, act| {
            Valuation::new()
                .with_bool("go", go)
                .with_bool("done", done)
                .with_bool("act", act)
        };
        let tr = Trace::new(vec![row(true, false, false); 4]).unwrap();
        let v = run_monitor(&p, &tr).unwrap();
        assert_eq!(v.cycles[0].outcome, Outcome::Fail(Reason::TeeWindowMissed));
        assert_eq!(v.cycles[0].end, 2);

        p.lmin = TimeBound::Finite(2);
        p.lmax = TimeBound::Finite(3);
        let tr = Trace::new(vec![row(true, true, false), row(false, false, true)]).unwrap();
        let v = run_monitor(&p, &tr).unwrap();
        assert_eq!(v.cycles[0].outcome, Outcome::Fail(Reason::AseWindowMissed));
    }

    #[test]
    fn params_json_defaults() {
        let p = SupParameters::from_json(
            r#"{"tse": "true", "ac": "not inp_1", "aee": "inp_1", "amin": 30, "amax": 40}"#,
        )
        .unwrap();
        assert_eq!(p.tc, PropExpr::Const(true));
        assert_eq!(p.ase, PropExpr::not(inp()));
        assert_eq!(p.amax, TimeBound::Finite(40));
        assert_eq!(p.lmax, TimeBound::Finite(0));
        assert_eq!(SupParameters::from_json(&p.to_json()).unwrap(), p);
        let p = SupParameters::from_json(r#"{"lmax": "inf"}"#).unwrap();
        assert_eq!(p.lmax, TimeBound::Infinity);
        assert!(SupParameters::from_json(r#"{"amin": 5, "amax": 4}"#).is_err());
        assert!(SupParameters::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SupParameters::from_json(r#"{"interpretation": "order"}"#).is_err());
    }

    #[test]
    fn csv_cells() {
        let tr = Trace::from_csv("inp_1, speed\n0, 7\n1, 1\n".as_bytes()).unwrap();
        assert_eq!(tr.len(), 2);
        assert!(!tr.0[0].get_bool("inp_1").unwrap());
        assert!(tr.0[0].get_bool("speed").is_err());
        assert_eq!(tr.0[0].get_int("speed").unwrap(), 7);
        assert!(tr.0[1].get_bool("speed").unwrap());
        assert!(Trace::from_csv("a\nx\n".as_bytes()).is_err());
        assert!(matches!(
            Trace::from_csv("a\n".as_bytes()),
            Err(SupError::EmptyTrace)
        ));
    }

    #[test]
    fn unbound_identifier_is_an_error() {
        let p = action(1, 1);
        assert!(run_monitor(&p, &Trace::pulses("other", 3, &[]).unwrap()).is_err());
    }
}
