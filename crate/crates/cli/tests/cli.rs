use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fields_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperval"))
        .current_dir(fields_dir())
        .args(args)
        .output()
        .expect("binary runs")
}

fn record(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--records"];
    all.extend_from_slice(args);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    (
        serde_json::from_str(&text).unwrap(),
        out.status.code().unwrap(),
    )
}

fn classes(rec: &Value) -> Vec<String> {
    rec["result"]["members"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["class"].as_str().unwrap().to_string())
        .collect()
}

fn class_of(spec: &str, n: &str, x: &str) -> String {
    let (rec, _) = record(&["hf", "eval", spec, "--n", n, &format!("[{x}]")]);
    rec["result"]["class"].as_str().unwrap().to_string()
}

#[test]
fn field_show_reports_krasner_numbers() {
    let (rec, code) = record(&["field", "show", "q3-sqrt3"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["e"], 2);
    assert_eq!(rec["result"]["krasner"], "1/2");
    assert_eq!(rec["schema"], 1);
    let (rec, _) = record(&["field", "show", "q2.field"]);
    assert_eq!(rec["result"]["e"], 1);
    assert_eq!(rec["result"]["krasner"], "0");
}

#[test]
fn malformed_field_file_is_located() {
    let dir = std::env::temp_dir().join(format!("hyperval-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.field");
    std::fs::write(&path, "p = 3\neisenstein = [-3, 0, 1\nprecision = 10\n").unwrap();
    let out = run(&["field", "show", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") || err.contains("line 3"), "{err}");
    std::fs::write(&path, "p = 3\neisenstein = [-4, 0, 1]\nprecision = 10\n").unwrap();
    let out = run(&["field", "show", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_minus_one_contains_zero() {
    let (rec, code) = record(&["hf", "eval", "q3", "--n", "1", "[1]", "add", "[-1]"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["contains_zero"], true);
    let (rec, _) = record(&["hf", "eval", "q3", "--n", "1", "[1] sub [1]"]);
    assert_eq!(rec["result"]["contains_zero"], true);
}

#[test]
fn one_plus_one_in_h2_q2_is_two_and_six() {
    let (rec, _) = record(&[
        "hf",
        "eval",
        "q2",
        "--n",
        "2",
        "--window",
        "-2..6",
        "[1] add [1]",
    ]);
    assert_eq!(rec["result"]["contains_zero"], false);
    let mut want = vec![class_of("q2", "2", "2"), class_of("q2", "2", "6")];
    want.sort();
    let mut got = classes(&rec);
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn pi_squared_is_three() {
    let (rec, _) = record(&["hf", "eval", "q3-sqrt3", "--n", "2", "[pi] mul [pi]"]);
    assert_eq!(
        rec["result"]["class"].as_str().unwrap(),
        class_of("q3-sqrt3", "2", "3")
    );
    assert_eq!(rec["result"]["valuation"], "1");
}

#[test]
fn sqrt3_example_homs() {
    let (rec, code) = record(&["homs", "q3-sqrt3", "1", "q3-sqrt-3", "1"]);
    assert_eq!((rec["result"]["count"].as_u64(), code), (Some(2), 0));
    let (rec, code) = record(&["homs", "q3-sqrt3", "1", "q3-sqrt-3", "1", "--over-p"]);
    assert_eq!((rec["result"]["count"].as_u64(), code), (Some(0), 1));
    let (rec, _) = record(&["homs", "q3-sqrt3", "q3-sqrt-3", "--n", "1"]);
    assert_eq!(rec["result"]["count"], 2);
}

#[test]
fn iso_answers_and_exit_codes() {
    let (rec, code) = record(&["iso", "q3-sqrt3.field", "q3-sqrt-3.field", "--n", "11"]);
    assert_eq!(rec["result"]["isomorphic"], false);
    assert_eq!(code, 1);
    let (rec, code) = record(&["iso", "q3-sqrt3", "q3-sqrt12"]);
    assert_eq!(rec["result"]["isomorphic"], true);
    assert_eq!(rec["result"]["certified"], true);
    assert_eq!(rec["provenance"]["n"], 11);
    assert_eq!(code, 0);
}

#[test]
fn oracle_suite_passes_on_q2() {
    let (rec, code) = record(&["check", "q2.field", "2", "--suite", "oracle"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["failures"], 0);
}

#[test]
fn axiom_and_roundtrip_suites() {
    let out = run(&["check", "q3", "2", "--suite", "axioms", "--window", "-1..1"]);
    assert_eq!(out.status.code(), Some(0));
    let (rec, code) = record(&["triple", "roundtrip", "q2-sqrt2", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["ring_size"], "4");
}

#[test]
fn lift_refusal_names_the_bound() {
    let out = run(&["lift", "q2-sqrt2", "3", "q2-sqrt2", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("need m > 6, have m = 3"), "{err}");
    let (rec, code) = record(&["lift", "q3-sqrt3", "1", "q3-sqrt3", "1"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["count"], 2);
}

#[test]
fn budget_exhaustion_has_its_own_code() {
    let out = run(&["homs", "q3-sqrt3", "3", "q3-sqrt3", "3", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn bad_expressions_are_invalid_input() {
    let out = run(&["hf", "eval", "q3", "--n", "1", "[1] frob [2]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["phiq", "q3-sqrt3", "3", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["field", "show", "no-such-field"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phiq_matches_valuation() {
    for (x, want) in [
        ("pi^-1", false),
        ("pi^-2", false),
        ("1", true),
        ("pi", true),
        ("2 + pi", true),
    ] {
        let (rec, code) = record(&["phiq", "q3-sqrt3", "4", x]);
        assert_eq!(rec["result"]["holds"], want, "{x}");
        assert_eq!(code, if want { 0 } else { 1 });
    }
}

#[test]
fn records_are_byte_identical() {
    let args = [
        "check",
        "q2-sqrt2",
        "2",
        "--suite",
        "axioms",
        "--samples",
        "300",
        "--seed",
        "9",
        "--records",
    ];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
