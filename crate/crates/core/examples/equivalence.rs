//! Bounded equivalence checks over lasso traces.

use edtl_cnl::edtl::{base_semantics, AttributeCombination};
use edtl_cnl::ltl::{canonical_rename, check_equiv, parse_ltl, EquivVerdict, OracleBounds};

fn show(f: &str, g: &str) {
    let verdict = check_equiv(
        &parse_ltl(f).unwrap(),
        &parse_ltl(g).unwrap(),
        &OracleBounds::default(),
    )
    .expect("within the trace cap");
    match verdict {
        EquivVerdict::EquivalentUpToBound { prefix_bound, loop_bound, sampled_count } => println!(
            "{f}  ==  {g}\n  equivalent on prefixes <= {prefix_bound}, loops <= {loop_bound}, {sampled_count} samples"
        ),
        EquivVerdict::Counterexample(trace) => println!(
            "{f}  !=  {g}\n  counterexample {}",
            serde_json::to_string(&trace).unwrap()
        ),
    }
}

fn main() {
    show("G a", "a");
    show("a W b", "G a | (a U b)");
    show("G ((H & D) -> D)", "true");

    let a: AttributeCombination = "vtttvf".parse().unwrap();
    let b: AttributeCombination = "vvtttf".parse().unwrap();
    show(&a.semantics().to_string(), &b.semantics().to_string());
    let (fa, _) = canonical_rename(&a.semantics()).unwrap();
    let (fb, _) = canonical_rename(&b.semantics()).unwrap();
    show(&fa.to_string(), &fb.to_string());
    println!("base formula has {} nodes", base_semantics().size());
}
