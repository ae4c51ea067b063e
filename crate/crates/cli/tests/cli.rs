use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const DIAG_HALF: &str = r#"{"n":2,"entries":[[{"num":{"-1":[1,0]}},{"num":{}}],[{"num":{}},{"num":{"-1":[0.5,0]}}]]}"#;
const DIAG_ONE: &str = r#"{"n":2,"entries":[[{"num":{"-1":[1,0]}},{"num":{}}],[{"num":{}},{"num":{"-1":[1,0]}}]]}"#;
const IDENTITY: &str = r#"{"n":2,"entries":[[{"num":{"0":[1,0]}},{"num":{}}],[{"num":{}},{"num":{"0":[1,0]}}]]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superopt")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_diagonal() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    let out = run(&["analyze", s(&phi)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["t"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["t"][1].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["k"], serde_json::json!([1, 1]));
    assert_eq!(v["r"], 1);
}

#[test]
fn analyze_analytic_symbol() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", IDENTITY);
    let report = dir.path().join("report.json");
    let out = run(&["analyze", s(&phi), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["t"], serde_json::json!([0.0, 0.0]));
    assert_eq!(v["message"], "already analytic");
}

#[test]
fn analyze_rejects_disk_zero_denominator() {
    let dir = TempDir::new().unwrap();
    let phi = write(
        &dir,
        "phi.json",
        r#"{"n":1,"entries":[[{"num":{"0":[1,0]}, "den":{"0":[-0.5,0],"1":[1,0]}}]]}"#,
    );
    let out = run(&["analyze", s(&phi)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("denominator"));
}

#[test]
fn malformed_file_reports_location() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", "{\"n\": 1,\n \"entries\": [[{\"num\": 7}]]}");
    let out = run(&["analyze", s(&phi)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn interpolate_then_verify() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    let u = dir.path().join("u.json");
    let out = run(&["interpolate", s(&phi), "--indices", "0", "--out", s(&u)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = json(&out);
    assert_eq!(cert["certificate"]["passed"], true);
    assert_eq!(cert["certificate"]["profile"]["d"], serde_json::json!([-1, 0]));

    // U = diag(zbar, zbar (1 + 2z)/(2 + z))
    let text = std::fs::read_to_string(&u).unwrap();
    let file: Value = serde_json::from_str(&text).unwrap();
    let pole = &file["entries"][1][1]["poles"][0];
    assert!((pole[0].as_f64().unwrap() + 2.0).abs() < 1e-8 && pole[1].as_f64().unwrap().abs() < 1e-8);
    let num = &file["entries"][1][1]["num"];
    assert!((num["-1"][0].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((num["0"][0].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let out = run(&["verify", s(&phi), s(&u), "--analyze", "--indices", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn verify_reports_fourier_failure() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    let u = write(&dir, "u.json", IDENTITY);
    let out = run(&["verify", s(&phi), s(&u)]);
    assert_eq!(out.status.code(), Some(3));
    let cert = json(&out);
    let fourier = cert["checks"].as_array().unwrap().iter().find(|c| c["name"] == "fourier_match").unwrap();
    assert_eq!(fourier["passed"], false);
}

#[test]
fn verify_size_mismatch() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    let u = write(&dir, "u.json", r#"{"n":1,"entries":[[{"num":{"-1":[1,0]}}]]}"#);
    assert_eq!(run(&["verify", s(&phi), s(&u)]).status.code(), Some(3));
}

#[test]
fn unique_interpolant_and_wrong_tail() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_ONE);
    let u = dir.path().join("u.json");
    let out = run(&["interpolate", s(&phi), "--out", s(&u)]);
    assert_eq!(out.status.code(), Some(0));
    let cert = json(&out);
    assert_eq!(cert["unique"], true);
    assert!(cert["certificate"]["notes"][0].as_str().unwrap().contains("unique"));

    let out = run(&["interpolate", s(&phi), "--indices", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tail"));
}

#[test]
fn norm_too_large_exit_code() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", r#"{"n":1,"entries":[[{"num":{"-1":[2,0]}}]]}"#);
    let out = run(&["interpolate", s(&phi)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm 2"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    assert_eq!(run(&["interpolate", s(&phi), "--indices", "a"]).status.code(), Some(1));
    assert_eq!(run(&["interpolate", s(&phi), "--indices", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn grid_flag_is_accepted() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.json", DIAG_HALF);
    let out = run(&["--grid", "1024", "analyze", s(&phi)]);
    assert_eq!(out.status.code(), Some(0));
}
