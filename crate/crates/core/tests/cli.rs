use std::path::Path;
use std::process::Command;

use edtl_cnl::cli::run;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("edtl-cnl").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const HAND_DRYER: &str = r#"{"trigger": "H and D", "invariant": true, "final": true, "delay": true, "reaction": "D", "release": false}"#;

fn pulses(period: usize) -> String {
    let mut s = String::from("inp_1\n");
    for t in 0..=4 * period {
        s.push_str(if t > 0 && t % period == 0 {
            "1\n"
        } else {
            "0\n"
        });
    }
    s
}

#[test]
fn semantics_command() {
    let dir = tempfile::tempdir().unwrap();
    let req = write(dir.path(), "r.json", HAND_DRYER);
    let o = cli(&["semantics", &req, "--simplify"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "G ((H & D) -> D)\n"));

    let all_var = write(
        dir.path(),
        "v.json",
        r#"{"trigger": "trig", "invariant": "inv", "final": "fin", "delay": "del", "reaction": "rea", "release": "rel"}"#,
    );
    let o = cli(&["semantics", &all_var]);
    assert_eq!(
        o.stdout.trim(),
        "G (trig -> ((inv & !fin) W (rel | (fin & ((inv & !del) W (rel | (inv & rea)))))))"
    );

    let missing = write(
        dir.path(),
        "m.json",
        r#"{"trigger": "a", "invariant": true, "final": true, "delay": true, "reaction": "b"}"#,
    );
    let o = cli(&["semantics", &missing]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("release"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn render_and_parse_commands() {
    let dir = tempfile::tempdir().unwrap();
    let req = write(dir.path(), "r.json", HAND_DRYER);
    let o = cli(&["render", &req]);
    assert_eq!(
        (o.code, o.stdout.as_str()),
        (0, "After 'H and D', 'D' occurs now.\n")
    );

    let o = cli(&["parse", "After 'H and D', 'D' occurs now."]);
    assert_eq!(o.code, 0);
    assert_eq!(
        edtl_cnl::edtl::Requirement::from_json(&o.stdout).unwrap(),
        edtl_cnl::edtl::Requirement::from_json(HAND_DRYER).unwrap()
    );

    let o = cli(&["parse", "After 'T', 'I' is valid forever."]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("broader semantics"), "{}", o.stderr);
    assert!(o.stdout.contains("\"invariant\":\"I\""));

    let o = cli(&["parse", "After 'T', 'I' holds."]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("position"));
}

#[test]
fn prompts_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = cli(&[
        "prompts",
        "--comb",
        "vtttvf",
        "--hints",
        "--no-explain",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(out.join("vtttvf.txt")).unwrap();
    assert!(text.contains(
        "if always release = false, delay = true, final = true, invariant = true. Remember that"
    ));
    assert!(!text.contains("Explain"));

    let o = cli(&[
        "prompts",
        "--comb",
        "vvvvvv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 1);
    let o = cli(&[
        "prompts",
        "--comb",
        "vvvvvx",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 1);

    let all = dir.path().join("all");
    let o = cli(&[
        "prompts",
        "--all",
        "--with-semantics",
        "--out",
        all.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0);
    assert_eq!(std::fs::read_dir(&all).unwrap().count(), 728);
}

#[test]
fn ingest_writes_the_next_version() {
    let dir = tempfile::tempdir().unwrap();
    let base = edtl_cnl::cnl::BASE_TEMPLATE;
    let v1 = write(
        dir.path(),
        "corpus.v1.jsonl",
        &format!(
            "{{\"class_id\":1,\"text\":\"{base}\",\"provenance\":\"paper\",\"renderable\":true}}\n"
        ),
    );
    let before = std::fs::read(&v1).unwrap();
    let response = write(
        dir.path(),
        "answer.txt",
        "After 'trigger', 'reaction' occurs now. This holds because the invariant is always true.",
    );
    let o = cli(&["ingest", "--comb", "vtttvf", &response, "--corpus", &v1]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v2 = dir.path().join("corpus.v2.jsonl");
    assert_eq!(o.stdout.trim(), v2.to_str().unwrap());
    assert_eq!(std::fs::read(&v1).unwrap(), before);
    let corpus = edtl_cnl::cnl::CnlCorpus::load(&v2).unwrap();
    assert_eq!(corpus.templates.len(), 2);
    assert_eq!(
        corpus.templates[1].text,
        "After <trigger>, <reaction> occurs now."
    );

    let o = cli(&[
        "ingest",
        "--comb",
        "vtttvf",
        &response,
        "--corpus",
        v2.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("already has this template"));
}

#[test]
fn equiv_command() {
    let o = cli(&["equiv", "G (trig -> rea)", "G (trig -> rea)"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("equivalent_up_to_bound"));
    let o = cli(&[
        "equiv",
        "G a",
        "a",
        "--prefix",
        "1",
        "--loop",
        "1",
        "--samples",
        "10",
        "--seed",
        "3",
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.contains("counterexample"));
    let o = cli(&["equiv", "G (", "a"]);
    assert_eq!(o.code, 1);
}

#[test]
fn sup_run_command() {
    let dir = tempfile::tempdir().unwrap();
    let a1 = write(
        dir.path(),
        "a1.json",
        r#"{"tse": "true", "ase": "true", "ac": "not inp_1", "aee": "inp_1", "amin": 35, "amax": 35}"#,
    );
    let a2 = write(
        dir.path(),
        "a2.json",
        r#"{"tse": "true", "ase": "true", "ac": "not inp_1", "aee": "inp_1", "amin": 30, "amax": 40}"#,
    );
    let p35 = write(dir.path(), "p35.csv", &pulses(35));
    let p40 = write(dir.path(), "p40.csv", &pulses(40));
    assert_eq!(cli(&["sup", "run", &a1, &p35]).code, 0);
    let o = cli(&["sup", "run", &a1, &p40]);
    assert_eq!(o.code, 4);
    assert!(o.stdout.contains("AEE-window-missed"));
    assert_eq!(cli(&["sup", "run", &a2, &p40]).code, 0);
    let bad = write(dir.path(), "bad.csv", "inp_1\nmaybe\n");
    assert_eq!(cli(&["sup", "run", &a1, &bad]).code, 1);
}

#[test]
fn grammar_and_usage() {
    let o = cli(&["grammar"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("Phrase := Req [.]"));
    assert_eq!(cli(&["no-such-command"]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_edtl-cnl");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Command::new(bin)
        .args(["classify", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    let code = status.status.code().unwrap();
    let report = edtl_cnl::classify::ClassificationReport::from_json(
        &std::fs::read_to_string(&out).unwrap(),
    )
    .unwrap();
    assert_eq!(
        report
            .classes
            .iter()
            .map(|c| c.members.len())
            .sum::<usize>(),
        729
    );
    if report.matches_expected_count() {
        assert_eq!(code, 0);
    } else {
        assert_eq!(code, 3);
        assert!(String::from_utf8_lossy(&status.stderr).contains("expected 32"));
        assert!(status.stdout.is_empty());
    }
    let loose = Command::new(bin)
        .args(["classify", "--prefix", "1", "--loop", "1", "--samples", "0"])
        .output()
        .unwrap();
    let report = edtl_cnl::classify::ClassificationReport::from_json(
        &String::from_utf8(loose.stdout).unwrap(),
    )
    .unwrap();
    assert_eq!(
        report
            .classes
            .iter()
            .map(|c| c.members.len())
            .sum::<usize>(),
        729
    );
}
