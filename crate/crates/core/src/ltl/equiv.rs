//! Bounded equivalence oracle.
//!
//! Two formulas are compared on every lasso with `|prefix| <= prefix_max`
//! and `1 <= |loop| <= loop_max` over all Boolean valuations of their
//! atoms, shortest traces first, then on a seeded batch of random lassos.
//! Exhaustive shapes are evaluated 64 traces at a time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{eval_lasso, LassoTrace, Program};
use super::formula::{Atom, LtlFormula};
use super::LtlError;
use crate::propexpr::Valuation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBounds {
    pub prefix_max: usize,
    pub loop_max: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Upper limit on the number of exhaustively enumerated traces.
    pub trace_cap: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            prefix_max: 2,
            loop_max: 2,
            random_samples: 10_000,
            seed: 0,
            trace_cap: 100_000_000,
        }
    }
}

impl OracleBounds {
    /// Number of exhaustive traces over `atoms` atoms, saturating.
    pub fn exhaustive_count(&self, atoms: usize) -> u64 {
        let mut total: u64 = 0;
        for p in 0..=self.prefix_max {
            for l in 1..=self.loop_max {
                let bits = atoms * (p + l);
                let count = if bits >= 64 { u64::MAX } else { 1u64 << bits };
                total = total.saturating_add(count);
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EquivVerdict {
    EquivalentUpToBound {
        prefix_bound: usize,
        loop_bound: usize,
        sampled_count: usize,
    },
    Counterexample(LassoTrace),
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::EquivalentUpToBound { .. })
    }
}

/// Lane `j` of word `w` is trace index `w * 64 + j`; bit `b` of that index is
/// the value of atom `b % k` at position `b / k`.
const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Parallel search kicks in above this many 64-trace words per shape.
const PAR_WORDS: u64 = 1 << 10;

pub fn check_equiv(
    f: &LtlFormula,
    g: &LtlFormula,
    bounds: &OracleBounds,
) -> Result<EquivVerdict, LtlError> {
    if bounds.loop_max == 0 {
        return Err(LtlError::InvalidBounds);
    }
    let mut atoms: Vec<Atom> = f.atoms().into_iter().chain(g.atoms()).cloned().collect();
    atoms.sort();
    atoms.dedup();
    let k = atoms.len();
    let total = bounds.exhaustive_count(k);
    if total > bounds.trace_cap {
        return Err(LtlError::ResourceLimit {
            traces: total,
            cap: bounds.trace_cap,
        });
    }
    let pf = Program::compile_with_atoms(f, &atoms);
    let pg = Program::compile_with_atoms(g, &atoms);
    let ctx = Search {
        f,
        g,
        pf: &pf,
        pg: &pg,
        atoms: &atoms,
    };

    for n in 1..=bounds.prefix_max + bounds.loop_max {
        for p in (0..=bounds.prefix_max.min(n - 1)).rev() {
            let l = n - p;
            if l > bounds.loop_max {
                continue;
            }
            if let Some(t) = ctx.exhaustive_shape(p, l) {
                return Ok(EquivVerdict::Counterexample(t));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut bf = Vec::new();
    let mut bg = Vec::new();
    let mut bits = Vec::new();
    for _ in 0..bounds.random_samples {
        let p = rng.gen_range(0..=6usize);
        let l = rng.gen_range(1..=6usize);
        let n = p + l;
        bits.clear();
        bits.extend((0..n * k).map(|_| rng.gen::<bool>()));
        let vf = pf.eval::<bool>(n, p, &mut bf, |a, i| bits[i * k + a]);
        let vg = pg.eval::<bool>(n, p, &mut bg, |a, i| bits[i * k + a]);
        if vf != vg {
            if let Some(t) = ctx.confirm(p, n, |a, i| bits[i * k + a]) {
                return Ok(EquivVerdict::Counterexample(t));
            }
        }
    }

    Ok(EquivVerdict::EquivalentUpToBound {
        prefix_bound: bounds.prefix_max,
        loop_bound: bounds.loop_max,
        sampled_count: bounds.random_samples,
    })
}

struct Search<'a> {
    f: &'a LtlFormula,
    g: &'a LtlFormula,
    pf: &'a Program,
    pg: &'a Program,
    atoms: &'a [Atom],
}

impl Search<'_> {
    fn exhaustive_shape(&self, p: usize, l: usize) -> Option<LassoTrace> {
        let n = p + l;
        let k = self.atoms.len();
        let bits = k * n;
        let (words, mask) = if bits >= 6 {
            (1u64 << (bits - 6), u64::MAX)
        } else {
            (1, (1u64 << (1u64 << bits)) - 1)
        };
        let scan = |bufs: &mut (Vec<u64>, Vec<u64>), w: u64| -> Option<LassoTrace> {
            let leaf = |a: usize, i: usize| -> u64 {
                let b = i * k + a;
                if b < 6 {
                    LANE_PATTERNS[b]
                } else if (w >> (b - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            };
            let vf = self.pf.eval::<u64>(n, p, &mut bufs.0, leaf);
            let vg = self.pg.eval::<u64>(n, p, &mut bufs.1, leaf);
            let mut diff = (vf ^ vg) & mask;
            while diff != 0 {
                let lane = diff.trailing_zeros() as u64;
                let index = (w << 6) | lane;
                if let Some(t) = self.confirm(p, n, |a, i| (index >> (i * k + a)) & 1 == 1) {
                    return Some(t);
                }
                diff &= diff - 1;
            }
            None
        };
        if words >= PAR_WORDS {
            (0..words)
                .into_par_iter()
                .map_init(|| (Vec::new(), Vec::new()), scan)
                .find_first(Option::is_some)
                .flatten()
        } else {
            let mut bufs = (Vec::new(), Vec::new());
            (0..words).find_map(|w| scan(&mut bufs, w))
        }
    }

    /// Turns an atom assignment into a concrete lasso and re-checks it with
    /// the scalar evaluator. Assignments that no integer values can realize
    /// (contradictory comparisons) are not counterexamples.
    fn confirm(
        &self,
        p: usize,
        n: usize,
        bit: impl Fn(usize, usize) -> bool,
    ) -> Option<LassoTrace> {
        let steps: Option<Vec<Valuation>> =
            (0..n).map(|i| realize(self.atoms, |a| bit(a, i))).collect();
        let mut steps = steps?;
        let cycle = steps.split_off(p);
        let t = LassoTrace::new(steps, cycle);
        let distinguishes = eval_lasso(self.f, &t).ok()? != eval_lasso(self.g, &t).ok()?;
        assert!(distinguishes, "packed evaluation disagrees with eval_lasso");
        Some(t)
    }
}

fn realize(atoms: &[Atom], value: impl Fn(usize) -> bool) -> Option<Valuation> {
    let mut v = Valuation::new();
    let mut ints: Vec<&str> = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        match a {
            Atom::Var(name) => v.set_bool(name.clone(), value(i)),
            Atom::Compare(name, ..) => {
                if !ints.contains(&name.as_str()) {
                    ints.push(name);
                }
            }
        }
    }
    for name in ints {
        let constraints: Vec<(usize, &Atom)> = atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, Atom::Compare(n, ..) if n == name))
            .collect();
        let mut candidates: Vec<i64> = vec![0];
        for (_, a) in &constraints {
            if let Atom::Compare(_, _, c) = a {
                candidates.extend([c.saturating_sub(1), *c, c.saturating_add(1)]);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let chosen = candidates.into_iter().find(|x| {
            constraints.iter().all(|(i, a)| match a {
                Atom::Compare(_, op, c) => op.apply(*x, *c) == value(*i),
                Atom::Var(_) => true,
            })
        })?;
        v.set_int(name, chosen);
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    fn check(a: &str, b: &str) -> EquivVerdict {
        check_equiv(
            &parse_ltl(a).unwrap(),
            &parse_ltl(b).unwrap(),
            &OracleBounds::default(),
        )
        .unwrap()
    }

    #[test]
    fn identical_formulas_are_equivalent() {
        assert_eq!(
            check("G (trig -> rea)", "G (trig -> rea)"),
            EquivVerdict::EquivalentUpToBound {
                prefix_bound: 2,
                loop_bound: 2,
                sampled_count: 10_000
            }
        );
    }

    #[test]
    fn globally_versus_atom_smallest_witness() {
        // Brute force over one-atom lassos: nothing of length 1 separates
        // them; prefix [a], loop [!a] is the first length-2 shape tried.
        let expected = LassoTrace::new(
            vec![Valuation::new().with_bool("a", true)],
            vec![Valuation::new().with_bool("a", false)],
        );
        assert_eq!(check("G a", "a"), EquivVerdict::Counterexample(expected));
    }

    #[test]
    fn known_equivalences() {
        assert!(check("a W b", "G a | (a U b)").is_equivalent());
        assert!(check("!(a U b)", "!b W (!a & !b)").is_equivalent());
        assert!(check("G ((H & D) -> D)", "true").is_equivalent());
        assert!(!check("a U b", "a W b").is_equivalent());
    }

    #[test]
    fn comparison_atoms_only_yield_realizable_witnesses() {
        // The two atoms are contradictory at the same position, so the
        // formulas agree on every real trace.
        assert!(check("G !(t >= 5 & t < 3)", "true").is_equivalent());
        match check("G (t >= 5)", "t >= 5") {
            EquivVerdict::Counterexample(trace) => {
                assert!(
                    eval_lasso(&parse_ltl("G (t >= 5)").unwrap(), &trace).unwrap()
                        != eval_lasso(&parse_ltl("t >= 5").unwrap(), &trace).unwrap()
                );
            }
            v => panic!("expected counterexample, got {v:?}"),
        }
    }

    #[test]
    fn resource_limit() {
        let bounds = OracleBounds {
            trace_cap: 10,
            ..OracleBounds::default()
        };
        let err = check_equiv(&parse_ltl("a").unwrap(), &parse_ltl("b").unwrap(), &bounds);
        assert!(matches!(err, Err(LtlError::ResourceLimit { .. })));
    }

    #[test]
    fn six_atom_exhaustive_run_completes() {
        let f = parse_ltl("G (a -> ((b & !c) W (d | (c & ((b & !e) W (d | (b & f)))))))").unwrap();
        assert!(check_equiv(&f, &f.clone(), &OracleBounds::default())
            .unwrap()
            .is_equivalent());
    }
}
