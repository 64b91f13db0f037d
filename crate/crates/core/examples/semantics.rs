//! Instantiates the hand dryer requirement and a few attribute combinations
//! and prints their LTL semantics before and after simplification.

use edtl_cnl::edtl::{base_semantics, instantiate, AttributeCombination, Requirement};

const HAND_DRYER: &str = r#"{
    "trigger": "H and D",
    "invariant": true,
    "final": true,
    "delay": true,
    "reaction": "D",
    "release": false
}"#;

fn main() {
    println!("base: {}", base_semantics());

    let r = Requirement::from_json(HAND_DRYER).expect("valid requirement");
    println!("hand dryer:");
    println!("  full:       {}", instantiate(&r, false));
    println!("  simplified: {}", instantiate(&r, true));

    for key in ["vtttvf", "vvtvvv", "vvvttf", "fvvvvv", "tfvvvf"] {
        let c: AttributeCombination = key.parse().expect("valid key");
        println!("{key}: {}", c.semantics());
    }
}
