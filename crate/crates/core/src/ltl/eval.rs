//! Exact evaluation over ultimately periodic words.
//!
//! A lasso `prefix · loop^ω` has `n = |prefix| + |loop|` distinct positions;
//! the successor of the last one is the loop start. Each subformula is a
//! vector of `n` truth values. Until and eventually are least fixpoints,
//! globally and weak until greatest fixpoints, computed by sweeping the
//! positions backwards until nothing changes.
//!
//! The evaluator is generic over a [`Lane`], so the same program runs on a
//! single `bool` or on 64 traces at once packed into a `u64`.

use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

use super::formula::{Atom, LtlFormula};
use super::LtlError;
use crate::propexpr::{PropError, Valuation};

pub trait Lane:
    Copy + Eq + BitAnd<Output = Self> + BitOr<Output = Self> + Not<Output = Self>
{
    const ALL: Self;
    const NONE: Self;
}

impl Lane for bool {
    const ALL: Self = true;
    const NONE: Self = false;
}

impl Lane for u64 {
    const ALL: Self = u64::MAX;
    const NONE: Self = 0;
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Leaf(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    G(usize),
    F(usize),
    X(usize),
    U(usize, usize),
    W(usize, usize),
}

/// A formula flattened into post-order, with its atoms indexed.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    atoms: Vec<Atom>,
}

impl Program {
    pub fn compile(f: &LtlFormula) -> Self {
        let mut p = Program {
            ops: Vec::new(),
            atoms: Vec::new(),
        };
        p.push(f);
        p
    }

    /// Compiles with a fixed atom table so several programs share leaf indices.
    pub fn compile_with_atoms(f: &LtlFormula, atoms: &[Atom]) -> Self {
        let mut p = Program {
            ops: Vec::new(),
            atoms: atoms.to_vec(),
        };
        p.push(f);
        p
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn push(&mut self, f: &LtlFormula) -> usize {
        let op = match f {
            LtlFormula::Atom(a) => {
                let idx = match self.atoms.iter().position(|b| b == a) {
                    Some(i) => i,
                    None => {
                        self.atoms.push(a.clone());
                        self.atoms.len() - 1
                    }
                };
                Op::Leaf(idx)
            }
            LtlFormula::True => Op::True,
            LtlFormula::False => Op::False,
            LtlFormula::Not(g) => Op::Not(self.push(g)),
            LtlFormula::G(g) => Op::G(self.push(g)),
            LtlFormula::F(g) => Op::F(self.push(g)),
            LtlFormula::X(g) => Op::X(self.push(g)),
            LtlFormula::And(a, b) => {
                let a = self.push(a);
                Op::And(a, self.push(b))
            }
            LtlFormula::Or(a, b) => {
                let a = self.push(a);
                Op::Or(a, self.push(b))
            }
            LtlFormula::Implies(a, b) => {
                let a = self.push(a);
                Op::Implies(a, self.push(b))
            }
            LtlFormula::U(a, b) => {
                let a = self.push(a);
                Op::U(a, self.push(b))
            }
            LtlFormula::W(a, b) => {
                let a = self.push(a);
                Op::W(a, self.push(b))
            }
        };
        self.ops.push(op);
        self.ops.len() - 1
    }

    /// Truth value at position 0.
    ///
    /// `leaf(atom, position)` supplies atom values; `buf` is scratch space
    /// reused across calls.
    pub fn eval<L: Lane>(
        &self,
        n: usize,
        loop_start: usize,
        buf: &mut Vec<L>,
        mut leaf: impl FnMut(usize, usize) -> L,
    ) -> L {
        debug_assert!(loop_start < n);
        buf.clear();
        buf.resize(self.ops.len() * n, L::NONE);
        let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
        for (k, op) in self.ops.iter().enumerate() {
            let out = k * n;
            match *op {
                Op::Leaf(a) => {
                    for i in 0..n {
                        buf[out + i] = leaf(a, i);
                    }
                }
                Op::True => buf[out..out + n].fill(L::ALL),
                Op::False => buf[out..out + n].fill(L::NONE),
                Op::Not(a) => {
                    for i in 0..n {
                        buf[out + i] = !buf[a * n + i];
                    }
                }
                Op::And(a, b) => {
                    for i in 0..n {
                        buf[out + i] = buf[a * n + i] & buf[b * n + i];
                    }
                }
                Op::Or(a, b) => {
                    for i in 0..n {
                        buf[out + i] = buf[a * n + i] | buf[b * n + i];
                    }
                }
                Op::Implies(a, b) => {
                    for i in 0..n {
                        buf[out + i] = !buf[a * n + i] | buf[b * n + i];
                    }
                }
                Op::X(a) => {
                    for i in 0..n {
                        buf[out + i] = buf[a * n + succ(i)];
                    }
                }
                Op::G(a) => fixpoint(buf, out, n, &succ, L::ALL, |buf, i, next| {
                    buf[a * n + i] & next
                }),
                Op::F(a) => fixpoint(buf, out, n, &succ, L::NONE, |buf, i, next| {
                    buf[a * n + i] | next
                }),
                Op::U(a, b) => fixpoint(buf, out, n, &succ, L::NONE, |buf, i, next| {
                    buf[b * n + i] | (buf[a * n + i] & next)
                }),
                Op::W(a, b) => fixpoint(buf, out, n, &succ, L::ALL, |buf, i, next| {
                    buf[b * n + i] | (buf[a * n + i] & next)
                }),
            }
        }
        buf[(self.ops.len() - 1) * n]
    }
}

fn fixpoint<L: Lane>(
    buf: &mut [L],
    out: usize,
    n: usize,
    succ: &impl Fn(usize) -> usize,
    init: L,
    step: impl Fn(&[L], usize, L) -> L,
) {
    buf[out..out + n].fill(init);
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let next = buf[out + succ(i)];
            let v = step(buf, i, next);
            if v != buf[out + i] {
                buf[out + i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// A finite prefix followed by a loop repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoTrace {
    pub prefix: Vec<TraceStep>,
    #[serde(rename = "loop")]
    pub cycle: Vec<TraceStep>,
}

/// One position of a trace: identifier → Boolean or integer value.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TraceStep(pub std::collections::BTreeMap<String, StepValue>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepValue {
    Bool(bool),
    Int(i64),
}

impl TraceStep {
    pub fn valuation(&self) -> Valuation {
        let mut v = Valuation::new();
        for (k, val) in &self.0 {
            match *val {
                StepValue::Bool(b) => v.set_bool(k.clone(), b),
                StepValue::Int(i) => v.set_int(k.clone(), i),
            }
        }
        v
    }

    pub fn from_valuation(v: &Valuation) -> Self {
        let mut m = std::collections::BTreeMap::new();
        for (k, b) in v.bools() {
            m.insert(k.clone(), StepValue::Bool(*b));
        }
        for (k, i) in v.ints() {
            m.insert(k.clone(), StepValue::Int(*i));
        }
        TraceStep(m)
    }
}

impl LassoTrace {
    pub fn new(prefix: Vec<Valuation>, cycle: Vec<Valuation>) -> Self {
        LassoTrace {
            prefix: prefix.iter().map(TraceStep::from_valuation).collect(),
            cycle: cycle.iter().map(TraceStep::from_valuation).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn step(&self, i: usize) -> &TraceStep {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    /// The same infinite word with the loop unrolled once more into the prefix.
    pub fn unrolled(&self) -> LassoTrace {
        let mut prefix = self.prefix.clone();
        prefix.extend(self.cycle.iter().cloned());
        LassoTrace {
            prefix,
            cycle: self.cycle.clone(),
        }
    }
}

/// Truth of `f` at position 0 of `prefix · loop^ω`.
pub fn eval_lasso(f: &LtlFormula, t: &LassoTrace) -> Result<bool, LtlError> {
    if t.cycle.is_empty() {
        return Err(LtlError::EmptyLoop);
    }
    let program = Program::compile(f);
    let n = t.len();
    let valuations: Vec<Valuation> = (0..n).map(|i| t.step(i).valuation()).collect();
    let mut table = Vec::with_capacity(program.atoms().len() * n);
    for atom in program.atoms() {
        for v in &valuations {
            table.push(atom.eval(v).map_err(|e| match e {
                PropError::Unbound(name) => LtlError::Unbound(name),
                other => LtlError::Prop(other),
            })?);
        }
    }
    let mut buf = Vec::new();
    Ok(program.eval(n, t.prefix.len(), &mut buf, |a, i| table[a * n + i]))
}
