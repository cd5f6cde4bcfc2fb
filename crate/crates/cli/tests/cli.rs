use std::process::{Command, Output};

use serde_json::Value;

const TWO_POINT: &str = r#"{"n":1,"k":1,"C":[[[1]],[[-1]]],"q":[1],"d":[]}"#;
const P_BLOCKS: &str = r#"{"n":2,"k":2,"C":[[[1,0],[0,1]],[[1,-2],[0,1]],[[1,0],[-2,1]]]}"#;

fn ehlcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehlcp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_lists_both_points() {
    let out = ehlcp(&["solve", "--input", TWO_POINT]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let samples: Vec<&Value> = v["solutions"]["pieces"].as_array().unwrap().iter().map(|p| &p["sample"]).collect();
    assert_eq!(samples.len(), 2);
    assert!(samples.contains(&&serde_json::json!([[1], [0]])));
    assert!(samples.contains(&&serde_json::json!([[0], [1]])));
}

#[test]
fn check_reports_ssm_w_witness() {
    let out = ehlcp(&["check", "--input", P_BLOCKS]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ssm_w"]["status"], "No");
    assert_eq!(v["ssm_w"]["certificate"]["kind"], "witness");
    assert_eq!(v["column_w"]["status"], "No");
    for block in v["normalized_blocks"].as_array().unwrap() {
        assert_eq!(block["is_p"]["status"], "Yes");
    }
}

#[test]
fn check_text_is_aligned() {
    let out = ehlcp(&["check", "--input", P_BLOCKS, "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ssm_w      No")));
}

#[test]
fn degree_of_identity_pair_and_undefined_case() {
    let out = ehlcp(&["degree", "--input", r#"{"n":2,"k":1,"C":[[[1,0],[0,1]],[[1,0],[0,1]]]}"#]);
    let v = json(&out);
    assert_eq!(v["status"], "defined");
    assert_eq!(v["value"], 1);
    assert_eq!(v["seed"], 1);
    let out = ehlcp(&["degree", "--input", r#"{"n":1,"k":1,"C":[[[1]],[[0]]]}"#, "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "undefined");
    assert_eq!(v["seed"], 9);
}

#[test]
fn analyze_two_point_fixture() {
    let v = json(&ehlcp(&["analyze", "--input", TWO_POINT]));
    assert_eq!(v["connected"], false);
    assert_eq!(v["unique"], false);
    assert_eq!(v["bounded"], true);
}

#[test]
fn rational_entries_parse_exactly() {
    let out = ehlcp(&["solve", "--input", r#"{"n":1,"k":1,"C":[[["2"]],[[1]]],"q":["3/2"]}"#]);
    let v = json(&out);
    let samples: Vec<&Value> = v["solutions"]["pieces"].as_array().unwrap().iter().map(|p| &p["sample"]).collect();
    assert_eq!(samples, vec![&serde_json::json!([["3/4"], [0]])]);
}

#[test]
fn input_errors_are_distinct() {
    let malformed = ehlcp(&["solve", "--input", r#"{"n":1,"k":1,"C":[[[1]],[[1]]]"#]);
    let dimension = ehlcp(&["solve", "--input", r#"{"n":2,"k":1,"C":[[[1]],[[1]]],"q":[1]}"#]);
    let bound = ehlcp(&["solve", "--input", r#"{"n":1,"k":2,"C":[[[1]],[[1]],[[1]]],"q":[1],"d":[[0]]}"#]);
    for out in [&malformed, &dimension, &bound] {
        assert_eq!(out.status.code(), Some(2));
    }
    assert!(stderr(&malformed).contains("malformed JSON"));
    assert!(stderr(&dimension).contains("dimension mismatch"));
    assert!(stderr(&bound).contains("non-positive"));
}

#[test]
fn unknown_flag_and_suite_rejected() {
    assert_ne!(ehlcp(&["solve", "--input", TWO_POINT, "--bogus"]).status.code(), Some(0));
    assert_eq!(ehlcp(&["fuzz", "--suite", "S-T99", "--trials", "1"]).status.code(), Some(2));
}

#[test]
fn input_from_file() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("two_point.json");
    std::fs::write(&path, TWO_POINT).unwrap();
    let out = ehlcp(&["analyze", "--input", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("connected  false"));
}

#[test]
fn newton_agrees_with_enumeration() {
    let out = ehlcp(&["solve", "--input", r#"{"n":1,"k":1,"C":[[[2]],[[1]]],"q":[3]}"#, "--newton", "--tol", "1e-12"]);
    let v = json(&out);
    let conv = &v["newton"]["Converged"];
    assert_eq!(conv["verified"], true);
    assert_eq!(conv["solution"], v["solutions"]["pieces"][0]["sample"]);
}

#[test]
fn fuzz_is_deterministic_and_passes() {
    let args = ["fuzz", "--suite", "S-T41", "--trials", "200", "--seed", "1"];
    let a = ehlcp(&args);
    let b = ehlcp(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["suites"][0]["failures"].as_array().unwrap().len(), 0);
    let report: ehlcp::harness::SuiteReport = serde_json::from_value(v["suites"][0].clone()).unwrap();
    assert_eq!(report.trials, 200);
}

#[test]
fn thread_count_does_not_change_reports() {
    let args = ["fuzz", "--suite", "column-w-collapse", "--trials", "40", "--seed", "5", "--n", "2"];
    let one = Command::new(env!("CARGO_BIN_EXE_ehlcp")).args(args).env("EHLCP_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_ehlcp")).args(args).env("EHLCP_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}
