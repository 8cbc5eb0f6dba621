use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_witnesskit"));
    c.env_remove("WITNESSKIT_SEED");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> (Output, Option<Value>) {
    let out = bin().args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).ok();
    (out, json)
}

fn simplices(v: &Value) -> Vec<Vec<u64>> {
    v["simplices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_array().unwrap().iter().map(|i| i.as_u64().unwrap()).collect())
        .collect()
}

#[test]
fn square_is_one_cocircular_simplex() {
    let (out, json) = run(&["delaunay", data("square.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let s = simplices(&json.unwrap());
    assert!(s.contains(&vec![0, 1, 2, 3]));
    assert_eq!(s.len(), 15);
}

#[test]
fn quad_gives_two_triangles_on_one_diagonal() {
    let (out, json) = run(&["delaunay", data("nonconvex-quad.csv").to_str().unwrap(), "--certificates"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json.unwrap();
    let s = simplices(&json);
    let triangles: Vec<_> = s.iter().filter(|t| t.len() == 3).collect();
    assert_eq!(triangles, [&vec![0, 1, 3], &vec![1, 2, 3]]);
    assert!(s.contains(&vec![1, 3]) && !s.contains(&vec![0, 2]));
    assert_eq!(json["certificates"].as_array().unwrap().len(), s.len());
    assert_eq!(json["config"]["command"], "delaunay");
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x,y\n0,0\n1,0\n0.5,oops\n").unwrap();
    let (out, _) = run(&["delaunay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn missing_file_exits_two() {
    let (out, _) = run(&["delaunay", "/nonexistent/points.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rejects_zero_trials() {
    let (out, _) = run(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_random_euclidean_instances_match() {
    let (out, json) = run(&["verify", "--trials", "200", "--dims", "2", "--sizes", "7", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = &json.unwrap()["summary"];
    assert_eq!(summary["matched"], 200);
    assert_eq!(summary["trials"], 200);
}

#[test]
fn polar_caps_regression_is_an_expected_mismatch() {
    let (out, json) = run(&["verify", "--regression", "polar-caps"]);
    assert_eq!(out.status.code(), Some(0));
    let trial = &json.unwrap()["trials"][0];
    assert_eq!(trial["classification"], "expected");
    assert_eq!(trial["mismatch_dimensions"], serde_json::json!([3]));
    assert_eq!(trial["first_mismatch"]["in_weak"], true);
}

#[test]
fn genericity_exit_codes() {
    let (out, json) = run(&["genericity", data("equator4.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json.unwrap()["violating_subset"], serde_json::json!([0, 1, 2, 3]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[0, 1, 2, 3]"));
    let (out, json) = run(&["genericity", data("random6-sphere.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json.unwrap()["generic"], true);
}

#[test]
fn circle_witness_complex_is_a_cycle() {
    let (out, json) = run(&[
        "witness-complex",
        data("circle40.csv").to_str().unwrap(),
        "--landmarks",
        "8",
        "--max-dim",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = json.unwrap();
    assert_eq!(json["f_vector"], serde_json::json!([8, 8]));
    assert_eq!(json["connected_components"], 1);
    assert_eq!(json["cycle_rank"], 1);
}

#[test]
fn seed_comes_from_the_environment() {
    let out = bin()
        .env("WITNESSKIT_SEED", "17")
        .args(["check-axioms", "--trials", "100"])
        .output()
        .unwrap();
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["seed"], 17);
    let (_, flag) = run(&["check-axioms", "--trials", "100", "--seed", "17"]);
    assert_eq!(json, flag.unwrap());
}

#[test]
fn check_axioms_flags_the_sphere() {
    let (out, _) = run(&["check-axioms", "--geometry", "hemisphere", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let (out, json) = run(&["check-axioms", "--geometry", "sphere", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json.unwrap()["report"]["convexity"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn counterexamples_check() {
    let (out, json) = run(&["counterexample", "polar-caps", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json.unwrap();
    assert_eq!(json["check"]["holds"], true);
    assert_eq!(json["counterexample"]["faces"].as_array().unwrap().len(), 15);
    let (out, _) = run(&["counterexample", "twin-simplex", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let (out, _) = run(&["counterexample", "twin-simplex", "--epsilon-prime", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_sorted_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (out, _) = run(&["delaunay", data("square.csv").to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn weighted_input_reads_last_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    // The heavy center site has an empty power cell.
    std::fs::write(&path, "0 0 0\n2 0 0\n1 1.5 0\n1 0.5 3\n").unwrap();
    let (out, json) = run(&["delaunay", path.to_str().unwrap(), "--geometry", "weighted"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json.unwrap();
    assert_eq!(json["weights"], serde_json::json!([0, 0, 0, 3]));
    assert_eq!(json["points"][1], serde_json::json!([2, 0]));
    let s = simplices(&json);
    assert!(s.contains(&vec![0, 1, 2]));
    assert!(s.iter().all(|t| !t.contains(&3)));
}
