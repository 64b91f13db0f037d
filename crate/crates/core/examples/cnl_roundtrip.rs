//! Renders requirements as phrases with the shipped corpus and parses the
//! phrases back.

use edtl_cnl::cli::{embedded_corpus, embedded_report};
use edtl_cnl::cnl::{parse_requirement, render_requirement};
use edtl_cnl::edtl::Requirement;

fn main() {
    let report = embedded_report();
    let corpus = embedded_corpus();

    let requirements = [
        r#"{"trigger": "H and D", "invariant": true, "final": true, "delay": true, "reaction": "D", "release": false}"#,
        r#"{"trigger": "request", "invariant": "power", "final": "request", "delay": "timeout", "reaction": "grant", "release": "cancel"}"#,
        r#"{"trigger": "start", "invariant": "ok", "final": "start", "delay": "t > 5", "reaction": "done", "release": "reset"}"#,
    ];
    for json in requirements {
        let r = Requirement::from_json(json).expect("valid requirement");
        let phrase = match render_requirement(&r, &corpus, &report) {
            Ok(p) => p,
            Err(e) => {
                println!("cannot render {}: {e}", r.to_json());
                continue;
            }
        };
        let parsed = parse_requirement(&phrase, &corpus, &report).expect("rendered phrases parse");
        println!("{phrase}");
        println!(
            "  class {} -> {}",
            parsed.class_id,
            parsed.requirement.to_json()
        );
        assert_eq!(parsed.requirement, r);
    }

    let phrase = "After 'T', 'I' is valid forever.";
    let parsed = parse_requirement(phrase, &corpus, &report).expect("phrase parses");
    println!("{phrase}");
    println!(
        "  class {} -> {}",
        parsed.class_id,
        parsed.requirement.to_json()
    );
    for w in &parsed.warnings {
        println!("  warning: {w}");
    }

    match parse_requirement("After 'T', 'I' holds.", &corpus, &report) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
