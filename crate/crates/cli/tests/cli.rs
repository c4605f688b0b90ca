use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgalois"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

const C1: [&str; 8] = ["--q", "0.3", "--a", "q^0.3", "--b", "q^0.7", "--c", "q^0.4"];

#[test]
fn classify_generic_text() {
    let mut args = vec!["classify"];
    args.extend(C1);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case:   C1"));
    assert!(text.contains("group:  GL2"));
}

#[test]
fn classify_lower_triangular_json() {
    let v = json(&[
        "classify", "--q", "0.5", "--a", "q^2", "--b", "q^0.3", "--c", "q^0.9",
    ]);
    assert_eq!(v["schema"], "qgalois/1");
    assert_eq!(v["group"]["family"], "LowerTriangular_full");
    assert_eq!(v["symmetry_derived"], false);
    assert_eq!(v["params"]["exact"], true);
}

#[test]
fn unipotent_case() {
    let v = json(&[
        "classify", "--q", "0.3", "--a", "q^2", "--b", "q^2", "--c", "q",
    ]);
    assert_eq!(v["case_tag"], "M2");
    assert_eq!(v["group"]["family"], "UnipotentUpper");
}

#[test]
fn quartic_scalars() {
    let v = json(&[
        "classify", "--q", "0.3", "--a", "q^0.2", "--b", "q^0.3", "--c", "q^1.5",
    ]);
    assert_eq!(v["group"]["family"], "SL2_times_scalars");
    assert_eq!(v["group"]["scalar"]["kind"], "FiniteCyclic");
    assert_eq!(v["group"]["scalar"]["n"], 4);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let args = [
        "verify", "--q", "0.3", "--a", "q^0.2", "--b", "q^0.3", "--c", "q^1.5", "--seed", "7",
    ];
    let first = json(&args);
    let second = json(&args);
    assert_eq!(first, second);
    assert_eq!(first["seed"], 7);
    let checks = first["checks"].as_array().unwrap();
    assert!(checks.len() >= 6);
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    assert!(checks.iter().any(|c| c["name"] == "connection.unimodular"));
}

#[test]
fn report_lists_witnesses_and_round_trips() {
    let mut args = vec!["report"];
    args.extend(C1);
    let v = json(&args);
    let ws = v["witnesses"].as_array().unwrap();
    assert_eq!(ws.len() as u64, v["witnesses_checked"].as_u64().unwrap());
    let text = serde_json::to_string(&v).unwrap();
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, v);
}

#[test]
fn symmetry_flag_is_reported() {
    let v = json(&[
        "classify", "--q", "0.3", "--a", "q^0.3", "--b", "q^2", "--c", "q^0.9",
    ]);
    assert_eq!(v["symmetry_derived"], true);
    assert_eq!(v["group"]["family"], "LowerTriangular_full");
}

#[test]
fn exit_code_usage() {
    let out = run(&[
        "classify", "--q", "0.3", "--a", "nonsense", "--b", "1", "--c", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--a"));
    let out = run(&[
        "classify", "--q", "1.5", "--a", "0.2", "--b", "0.3", "--c", "0.4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--q"));
    let out = run(&[
        "classify", "--q", "q^2", "--a", "0.2", "--b", "0.3", "--c", "0.4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_borderline() {
    let c = format!("{}", 0.3f64.powf(1.00001));
    let out = run(&[
        "classify", "--q", "0.3", "--a", "q^0.3", "--b", "q^0.7", "--c", &c,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("borderline membership"));
}

#[test]
fn exit_code_resonant() {
    let out = run(&[
        "classify", "--q", "0.3", "--a", "q^0.3", "--b", "q^0.7", "--c", "q^2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&[
        "classify", "--q", "0.3", "--a", "q^0.3", "--b", "q^1.3", "--c", "q^0.4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_numerical_failure() {
    // an annulus far outside the unit disc sends the continuation past its step limit
    let out = run(&[
        "verify",
        "--q",
        "0.9",
        "--a",
        "q^0.3",
        "--b",
        "q^0.7",
        "--c",
        "q^0.4",
        "--annulus",
        "1e40,1e41",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
