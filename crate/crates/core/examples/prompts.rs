//! Builds assistant prompts for one combination and ingests an answer into
//! a new corpus version.

use edtl_cnl::classify::canonical_class;
use edtl_cnl::cli::{embedded_corpus, embedded_report};
use edtl_cnl::edtl::AttributeCombination;
use edtl_cnl::promptgen::{ingest_response, PromptBundle, PromptOptions};

fn main() {
    let report = embedded_report();
    let corpus = embedded_corpus();
    let c: AttributeCombination = "vvfvvv".parse().expect("valid key");

    let options = PromptOptions {
        with_semantics: true,
        hints: true,
        explain: false,
    };
    let bundle = PromptBundle::build(&c, &report, options).expect("prompt builds");
    println!("{}\n", bundle.text());

    let answer = "After 'trigger', 'invariant' is valid until 'release'. Since final never happens, the reaction part never starts.";
    let class = canonical_class(&c, &report).expect("covered");
    println!(
        "class {} ({}), {} templates",
        class.class_id,
        class.canonical_formula,
        corpus.templates_for(class.class_id).count()
    );
    match ingest_response(&c, answer, &corpus, &report) {
        Ok(ingested) => {
            println!("new template: {}", ingested.template.text);
            println!("renderable: {}", ingested.template.renderable);
            println!(
                "corpus version {} -> {}",
                corpus.version, ingested.corpus.version
            );
        }
        Err(diagnostics) => {
            for d in diagnostics {
                println!("diagnostic: {d}");
            }
        }
    }
}
