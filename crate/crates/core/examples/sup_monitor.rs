//! Runs the SUP observer with the two timing requirements of the hand
//! dryer example on periodic input traces.

use edtl_cnl::propexpr::PropExpr;
use edtl_cnl::sup::{
    default_params, interpret_interval, run_monitor, SupParameters, TimeBound, Trace,
};

fn periodic(period: usize) -> Trace {
    let on: Vec<usize> = (1..=4).map(|k| k * period).collect();
    Trace::pulses("inp_1", 4 * period + 1, &on).expect("nonempty")
}

fn params(amin: u32, amax: u32) -> SupParameters {
    let inp = PropExpr::var("inp_1");
    let mut p = default_params(PropExpr::Const(true), PropExpr::Const(true));
    p.ac = PropExpr::not(inp.clone());
    p.aee = inp;
    p.amin = TimeBound::Finite(amin);
    p.amax = TimeBound::Finite(amax);
    p
}

fn main() {
    for (name, p) in [("A1", params(35, 35)), ("A2", params(30, 40))] {
        println!("{name}: action window [{}, {}]", p.amin, p.amax);
        for period in [30, 35, 40, 45] {
            let v = run_monitor(&p, &periodic(period)).expect("trace binds inp_1");
            let detail = match v.first_failure() {
                Some(c) => format!("{:?} at tick {}", c.outcome, c.end),
                None => format!("{} successes", v.successes()),
            };
            println!(
                "  period {period:>2}: {} ({detail})",
                if v.pass { "pass" } else { "FAIL" }
            );
        }
    }

    for (lo, hi) in [
        (TimeBound::Finite(0), TimeBound::Finite(0)),
        (TimeBound::Finite(0), TimeBound::Infinity),
        (TimeBound::Finite(30), TimeBound::Finite(40)),
    ] {
        let (t, e) = interpret_interval(lo, hi);
        match e {
            Some(e) => println!("[{lo}, {hi}] -> {t:?}: {e}"),
            None => println!("[{lo}, {hi}] -> {t:?}"),
        }
    }
}
