//! Partitions the 729 attribute combinations into semantic classes and
//! prints one line per class. With a directory argument, also writes
//! `report.json` and the seed corpus `corpus.v1.jsonl` there.

use std::time::Instant;

use edtl_cnl::classify::classify_all;
use edtl_cnl::cnl::seed_corpus;
use edtl_cnl::ltl::OracleBounds;

fn main() -> std::io::Result<()> {
    let start = Instant::now();
    let report = classify_all(&OracleBounds::default());
    println!(
        "{} classes in {:.1?}",
        report.class_count(),
        start.elapsed()
    );
    println!("{:>3} {:<7} {:>4}  formula", "id", "rep", "size");
    for class in &report.classes {
        println!(
            "{:>3} {:<7} {:>4}  {}",
            class.class_id,
            class.representative,
            class.members.len(),
            class.canonical_formula
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        std::fs::write(dir.join("report.json"), report.to_json() + "\n")?;
        std::fs::write(dir.join("corpus.v1.jsonl"), seed_corpus(&report).to_jsonl())?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
