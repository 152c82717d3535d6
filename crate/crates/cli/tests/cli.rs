//! End-to-end tests of the `lgt` binary: exit codes, determinism of report
//! bytes, and the documented file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lgt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lgt"))
}

fn run(args: &[&str]) -> Output {
    lgt().args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lgt-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_exit_codes_encode_verdicts() {
    // Lebesgue case: bounded
    let out = run(&[
        "check", "s2-corollary", "--p", "2", "--q", "2",
        "--phi1", "pow(a0=0,ainf=0)", "--phi2", "pow(a0=0,ainf=0)",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // imbalanced powers: unbounded
    let out = run(&[
        "check", "s2-corollary", "--p", "2", "--q", "2",
        "--phi1", "pow(a0=0.6,ainf=0.6)", "--phi2", "pow(a0=0,ainf=0)",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn neugebauer_minimal_v_is_unit() {
    let out = run(&[
        "check", "neugebauer", "--q", "2", "--u", "pow(a0=0,ainf=0)", "--v-from-u",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let sup = report["conditions"][0]["sup"].as_f64().unwrap();
    assert!((sup - 1.0).abs() < 1e-6, "sup = {sup}");
    assert_eq!(report["verdict"], "bounded");
}

#[test]
fn missing_file_is_a_data_error() {
    let out = run(&["norm", "--p", "2", "--phi", "pow(a0=0,ainf=0)", "--f", "/nonexistent.csv"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_usage_exits_64() {
    let out = run(&["check"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["norm", "--p", "2"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn norm_of_unit_block() {
    let f = tmp("unit.csv");
    write(&f, "knot,value\n1,1\n");
    let out = run(&["norm", "--p", "2", "--phi", "pow(a0=0,ainf=0)", "--f", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let norm = v["norm"].as_f64().unwrap();
    assert!((norm - 2.0f64.sqrt()).abs() < 1e-6, "norm = {norm}");
}

#[test]
fn rearrange_is_idempotent_on_files() {
    let f0 = tmp("step0.csv");
    let f1 = tmp("step1.csv");
    let f2 = tmp("step2.csv");
    write(&f0, "knot,value\n0.5,1\n1.5,4\n2,1\n");
    let out = run(&["rearrange", "--f", f0.to_str().unwrap(), "--format", "csv",
        "--out", f1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["rearrange", "--f", f1.to_str().unwrap(), "--format", "csv",
        "--out", f2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (a, b) = (std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
    assert_eq!(a, b, "rearrangement not idempotent at the file level");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("knot,value\n"));
}

#[test]
fn estimate_is_reproducible_byte_for_byte() {
    let args = [
        "estimate", "--op", "stieltjes", "--p", "2", "--samples", "5", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["inequality_id"], "I11");
    assert_eq!(v["verdict"], "saturating");
    assert!(v["max_ratio"].as_f64().unwrap() <= std::f64::consts::PI * 1.001);
}

#[test]
fn chain_reports_zero_violations_for_monotone_kernel() {
    let k = tmp("kernel.csv");
    // 2x2 sampled kernel, nonincreasing in both variables
    write(&k, ",1,1\n1,4,2\n1,3,1\n");
    let out = run(&[
        "chain", "--kernel", k.to_str().unwrap(), "--p", "2", "--q", "2",
        "--phi1", "pow(a0=0,ainf=0)", "--phi2", "pow(a0=0,ainf=0)",
        "--samples", "10", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn grid_env_override_is_honored() {
    let out = lgt()
        .args(["check", "neugebauer", "--q", "2", "--u", "pow(a0=0,ainf=0)", "--v-from-u"])
        .env("LGT_GRID", "1e-4,1e4,8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // argmax must now live inside the smaller grid
    let argmax = v["conditions"][0]["argmax_t"].as_f64().unwrap();
    assert!((1e-4..=1e4).contains(&argmax));
}

#[test]
fn bloom_kerman_hardy_examples() {
    let one = "pow(a0=0,ainf=0)";
    // unweighted Hardy operator on L^2: unbounded
    let out = run(&[
        "check", "bloom-kerman", "--kernel", "const", "--p", "2", "--q", "2",
        "--w", one, "--t", one, "--u", one, "--v", one,
    ]);
    assert_eq!(out.status.code(), Some(1));
    // classical Hardy weights: bounded
    let out = run(&[
        "check", "bloom-kerman", "--kernel", "const", "--p", "2", "--q", "2",
        "--w", "pow(a0=-1,ainf=-1)", "--t", one, "--u", one, "--v", one,
    ]);
    assert_eq!(out.status.code(), Some(0));
}
