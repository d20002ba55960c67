mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use common::data;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridqubo")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build_c4(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("c4.json");
    let o = run(&["build", "--input", &data("c4.json"), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn build_writes_model_metrics_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_c4(dir.path());
    assert!(dir.path().join("c4.metrics.txt").exists());
    let hist = std::fs::read_to_string(dir.path().join("c4.histogram.csv")).unwrap();
    assert!(hist.lines().count() > 1);
    let v: Value = serde_json::from_slice(&std::fs::read(model).unwrap()).unwrap();
    assert_eq!(v["variables"].as_array().unwrap().len(), 9);
}

#[test]
fn build_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = build_c4(dir.path());
    let first = std::fs::read(&a).unwrap();
    let b = build_c4(dir.path());
    assert_eq!(first, std::fs::read(b).unwrap());
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"nodes\": 7}").unwrap();
    assert_eq!(run(&["build", "--input", path(&bad)]).status.code(), Some(3));
    assert_eq!(run(&["build", "--input", "/nonexistent/net.json"]).status.code(), Some(3));
    assert_eq!(run(&["build", "--input", "builtin:nowhere"]).status.code(), Some(3));
    assert_eq!(run(&["build", "--input", &data("c4.json"), "--scale=-1"]).status.code(), Some(3));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(run(&["solve"]).status.code(), Some(2));
}

#[test]
fn validate_passes_and_catches_a_tampered_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--input", &data("c4.json")]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).trim_end().ends_with("PASS"));

    let model = build_c4(dir.path());
    let mut v: Value = serde_json::from_slice(&std::fs::read(&model).unwrap()).unwrap();
    v["linear"]["e_0_3"] = Value::from(-5.0);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_vec(&v).unwrap()).unwrap();
    let o = run(&["validate", "--input", &data("c4.json"), "--model", path(&tampered)]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn qubo_export_has_one_line_per_nonzero_term() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_c4(dir.path());
    let out = dir.path().join("c4.qubo");
    assert!(run(&["export", "--input", path(&model), "--format", "qubo", "--out", path(&out)]).status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(&model).unwrap()).unwrap();
    let terms = v["linear"].as_object().unwrap().len() + v["quadratic"].as_array().unwrap().len();
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), terms);
}

#[test]
fn json_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_c4(dir.path());
    let again = dir.path().join("again.json");
    assert!(run(&["export", "--input", path(&model), "--format", "json", "--out", path(&again)]).status.success());
    assert_eq!(std::fs::read(model).unwrap(), std::fs::read(again).unwrap());
}

#[test]
fn lp_export_declares_binaries() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_c4(dir.path());
    let out = dir.path().join("c4.lp");
    assert!(run(&["export", "--input", path(&model), "--format", "lp", "--out", path(&out)]).status.success());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("Binaries") && text.trim_end().ends_with("End"));
}

fn solve(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn brute_force_on_square_finds_an_optimal_tree() {
    let v = solve(&["solve", "--input", &data("c4.json"), "--method", "brute"]);
    assert_eq!(v["feasible"], Value::Bool(true));
    let open = v["open_links"].to_string();
    assert!(open == "[[1,2]]" || open == "[[2,3]]", "{open}");
    assert!((v["loss_kw"].as_f64().unwrap() - 0.006).abs() < 1e-12);
}

#[test]
fn brute_force_on_a_model_file_uses_the_network_to_decode() {
    let dir = tempfile::tempdir().unwrap();
    let model = build_c4(dir.path());
    let v = solve(&["solve", "--input", path(&model), "--network", &data("c4.json"), "--method", "brute"]);
    assert_eq!(v["feasible"], Value::Bool(true));
}

#[test]
fn annealing_on_square_is_seed_deterministic() {
    let args = ["solve", "--input", &data("c4.json"), "--method", "sa", "--sweeps", "500", "--restarts", "4", "--seed", "7"];
    let a = solve(&args);
    assert_eq!(a, solve(&args));
    assert_eq!(a["feasible"], Value::Bool(true));
}

#[test]
fn exhaustive_on_builtin_network() {
    let v = solve(&["solve", "--input", "builtin:baran-wu-33"]);
    assert_eq!(v["open_links"].to_string(), "[[6,7],[8,9],[13,14],[24,28],[31,32]]");
    assert!((v["loss_kw"].as_f64().unwrap() - 116.379).abs() < 0.01);
}

#[test]
fn inspect_reports_the_reduction() {
    let o = run(&["inspect", "--input", "builtin:baran-wu-33"]);
    assert!(o.status.success());
    assert!(!o.stdout.is_empty());
}
