//! Command-line behaviour: exit codes, JSON reports, and spec files.

use std::process::Command;

use serde_json::Value;

use pklab::cli::{run_from, Outcome};

fn run(args: &[&str]) -> Outcome {
    run_from(std::iter::once("pklab").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, v)
}

fn temp_spec(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pklab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["check", "d2", "--builtin", "heisenberg"]).code, 0);
    assert_eq!(run(&["check", "integrable", "--builtin", "iwasawa"]).code, 1);
    assert_eq!(run(&["check", "integrable", "--builtin", "iwasawa", "--at", "t=0"]).code, 0);
    assert_eq!(run(&["check", "mt", "--builtin", "c4_family"]).code, 1);
    assert_eq!(run(&["check", "nop", "phit3", "--builtin", "iwasawa"]).code, 0);
    assert_eq!(run(&["claims", "run", "--builtin", "sl2c"]).code, 0);
    assert_eq!(run(&["check", "d2"]).code, 2, "no source");
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["check", "d2", "--builtin", "nosuch"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn json_reports_carry_the_schema() {
    let (code, v) = json(&["check", "d2", "--builtin", "sl2c"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "check d2");
    assert_eq!(v["spec"], "sl2c");
    assert_eq!(v["passed"], true);
    assert!(v["report"].is_object());

    let (code, v) = json(&["check", "mt", "--builtin", "torus6", "--at", "u=x2,v=y2"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);

    let (code, v) = json(&["check", "d2", "--builtin", "nosuch"]);
    assert_eq!(code, 2);
    assert_eq!(v["schema"], 1);
    assert!(v["error"].is_string());
}

#[test]
fn claims_report_as_json() {
    let (code, v) = json(&["claims", "run", "--builtin", "heisenberg4"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["failed"], 0);
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn spec_files_and_empty_claim_lists() {
    let path = temp_spec("flat.pk", "spec flat\ncoordinates 2\ncoframe phi {\n  phi1 = dz1\n  phi2 = dz2\n}\n");
    let p = path.to_str().unwrap();
    let (code, v) = json(&["claims", "run", "--spec", p]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], 0);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["claims"].as_array().unwrap().len(), 0);
    assert_eq!(run(&["check", "integrable", "--spec", p]).code, 0);

    let bad = temp_spec("bad.pk", "coordinates 3\nform a = f*dz1\n");
    let out = run(&["check", "d2", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("f"), "{}", out.stderr);
}

#[test]
fn print_is_canonical() {
    let out = run(&["print", "--builtin", "iwasawa"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, pklab::catalog::builtin_source("iwasawa").unwrap());
}

#[test]
fn binary_forwards_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pklab");
    let ok = Command::new(bin).args(["check", "d2", "--builtin", "heisenberg3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));
    let fail = Command::new(bin).args(["check", "integrable", "--builtin", "iwasawa"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let usage = Command::new(bin).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
