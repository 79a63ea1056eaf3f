use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hyperwalk"));
    c.env_remove("HYPERWALK_TOL");
    c
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn spec(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// `(step, vertex, probability)` rows, skipping the header comment.
fn rows(csv: &str) -> Vec<(usize, usize, f64)> {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# measurement="));
    assert_eq!(lines.next(), Some("step,vertex,probability"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn identity_coin_line_moves_one_site_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(&dir, "line.json", r#"{"model":"coined-line","positions":9,"coin":"identity"}"#);
    let out = run(&["simulate", "--spec", &s, "--state", r#"{"coin":0,"position":4}"#, "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&stdout(&out));
    for step in 0..=3 {
        let hit: Vec<_> = rows.iter().filter(|r| r.0 == step && r.2 > 0.0).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].2, 1.0);
        // coin 0 moves one site to the left per step
        assert_eq!(hit[0].1, 4 - step);
    }
}

#[test]
fn hadamard_line_splits_evenly() {
    let out = run(&["simulate", "--spec", &spec("hadamard-line.json"), "--state", r#"{"coin":0,"position":10}"#, "--steps", "1"]);
    let rows = rows(&stdout(&out));
    let step1: Vec<_> = rows.iter().filter(|r| r.0 == 1 && r.2 > 1e-12).collect();
    assert_eq!(step1.len(), 2);
    assert_eq!((step1[0].1, step1[1].1), (9, 11));
    for r in step1 {
        assert!((r.2 - 0.5).abs() < 1e-12);
    }
}

#[test]
fn three_edge_rows_sum_to_one() {
    let out = run(&["simulate", "--spec", &spec("three-edge-grover.json"), "--state", &spec("three-edge-state.json"), "--steps", "10"]);
    let csv = stdout(&out);
    assert!(csv.starts_with("# measurement=total\n"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 11 * 4);
    for step in 0..=10 {
        let total: f64 = rows.iter().filter(|r| r.0 == step).map(|r| r.2).sum();
        assert!((total - 1.0).abs() < 1e-12, "step {step}: {total}");
    }
}

#[test]
fn json_simulation_matches_csv() {
    let args = ["simulate", "--spec", &spec("staggered-triangles.json"), "--steps", "4"];
    let csv = rows(&stdout(&run(&args)));
    let doc = json(&run(&[&args[..], &["--format", "json"]].concat()));
    let dists = doc["distributions"].as_array().unwrap();
    assert_eq!(dists.len(), 5);
    for (step, vertex, p) in csv {
        // serde_json's default float parser may be off by one ulp
        assert!((dists[step][vertex].as_f64().unwrap() - p).abs() <= 1e-15);
    }
}

#[test]
fn three_edge_to_staggered_has_seven_vertices() {
    let doc = json(&run(&["transform", "--spec", &spec("three-edge-grover.json"), "--transform", "hyperwalk-to-staggered"]));
    assert_eq!(doc["target"]["structure"]["vertices"], 7);
    assert_eq!(doc["step_map"]["a"], 2);
    assert_eq!(doc["sizes"]["basis_size"], 7);
}

#[test]
fn staggered_to_hyperwalk_keeps_the_basis_size() {
    let doc = json(&run(&["transform", "--spec", &spec("staggered-triangles.json"), "--transform", "staggered-to-hyperwalk"]));
    assert_eq!(doc["sizes"]["basis_size"], 5);
    assert_eq!(doc["step_map"]["a"], 1);
    assert_eq!(doc["step_map"]["b"], 0);
}

fn vertices_per_link(doc: &Value) -> Vec<u64> {
    doc["links"].as_array().unwrap().iter().map(|l| l["sizes"]["vertices"].as_u64().unwrap()).collect()
}

#[test]
fn three_edge_chain_reaches_336_vertices() {
    let chain = "staggered,generalized-coined,coined,szegedy";
    let built = json(&run(&["transform", "--spec", &spec("three-edge-repeated.json"), "--transform", chain]));
    assert_eq!(vertices_per_link(&built), [7, 21, 168, 336]);
    assert_eq!(built["links"][1]["sizes"]["operators"], 8);

    let counted = json(&run(&["chain-size", "--spec", &spec("three-edge-repeated.json"), "--transform", chain]));
    let links = counted.as_array().unwrap();
    let tail: Vec<u64> = links[1..].iter().map(|l| l["sizes"]["vertices"].as_u64().unwrap()).collect();
    assert_eq!(tail, [7, 21, 168, 336]);
}

#[test]
fn random_strong_suite_passes() {
    let out = run(&["verify", "--random", "20", "--transform", "staggered-to-hyperwalk", "--strong", "--seed", "7"]);
    let doc = json(&out);
    assert_eq!(doc["instances"], 20);
    assert_eq!(doc["strong_passed"], 20);
    assert_eq!(doc["verdict"], "pass");
}

#[test]
fn every_transform_verifies_on_a_sample() {
    for (s, t) in [
        ("three-edge-two-steps.json", "hyperwalk-to-coined"),
        ("three-edge-two-steps.json", "hyperwalk-to-staggered"),
        ("staggered-triangles.json", "staggered-to-generalized-coined"),
        ("staggered-triangles.json", "staggered-to-hyperwalk"),
    ] {
        let doc = json(&run(&["verify", "--spec", &spec(s), "--transform", t, "--steps", "12"]));
        assert_eq!(doc["report"]["verdict"], "pass", "{t} on {s}");
    }
}

#[test]
fn saved_result_documents_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("coined.json").to_string_lossy().into_owned();
    let s = spec("three-edge-two-steps.json");
    assert_eq!(code(&run(&["transform", "--spec", &s, "--transform", "hyperwalk-to-coined", "--out", &out])), 0);
    let doc = json(&run(&["verify", "--spec", &s, "--result", &out]));
    assert_eq!(doc["report"]["verdict"], "pass");
}

#[test]
fn corrupted_result_document_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec("three-edge-grover.json");
    let out = run(&["transform", "--spec", &s, "--transform", "hyperwalk-to-staggered"]);
    let mut doc: Value = json(&out);
    // send the first target vertex's probability to a different source vertex
    let m = doc["measurement"][0].as_array_mut().unwrap();
    let first = m.iter().position(|v| !v.is_null()).unwrap();
    let was = m[first].as_u64().unwrap();
    m[first] = Value::from((was + 1) % 4);
    let path = write(&dir, "bad.json", &doc.to_string());
    let out = run(&["verify", "--spec", &s, "--result", &path, "--state", &spec("three-edge-state.json")]);
    assert_eq!(code(&out), 5, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["verdict"], "fail");
}

#[test]
fn zero_steps_is_trivially_equivalent() {
    let doc = json(&run(&["verify", "--spec", &spec("three-edge-grover.json"), "--transform", "hyperwalk-to-coined", "--steps", "0"]));
    assert_eq!(doc["report"]["verdict"], "pass");
    assert_eq!(doc["report"]["checked_steps"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(&dir, "broken.json", "{\"model\": ");
    assert_eq!(code(&run(&["info", "--spec", &broken])), 2);
    assert_eq!(code(&run(&["info", "--spec", "/nonexistent/walk.json"])), 2);
    assert_eq!(code(&run(&["info", "--spec", &spec("three-edge-grover.json"), "--tol", "0"])), 2);

    let bad_coin = write(
        &dir,
        "coin.json",
        r#"{"model":"coined-line","positions":5,"coin":[[[1,0],[1,0]],[[0,0],[1,0]]]}"#,
    );
    assert_eq!(code(&run(&["info", "--spec", &bad_coin])), 3);
    let bad_tess = write(
        &dir,
        "tess.json",
        r#"{"model":"staggered","structure":{"vertices":3,"edges":[[0,1],[1,2]]},"tessellations":[{"polygons":[[0,1,2]]}]}"#,
    );
    assert_eq!(code(&run(&["info", "--spec", &bad_tess])), 3);
    let foreign = run(&["simulate", "--spec", &spec("three-edge-grover.json"), "--state", r#"{"vertex":3,"edge":0}"#]);
    assert_eq!(code(&foreign), 3);

    let wrong_model = run(&["transform", "--spec", &spec("three-edge-grover.json"), "--transform", "coined-to-szegedy"]);
    assert_eq!(code(&wrong_model), 4);
    let unknown = run(&["transform", "--spec", &spec("three-edge-grover.json"), "--transform", "hyperwalk-to-line"]);
    assert_eq!(code(&unknown), 4);
}

#[test]
fn tolerance_can_come_from_the_environment() {
    let out = bin()
        .args(["info", "--spec", &spec("three-edge-grover.json")])
        .env("HYPERWALK_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    for args in [
        vec!["simulate", "--spec", &*spec("three-edge-two-steps.json"), "--steps", "6"],
        vec!["transform", "--spec", &*spec("three-edge-grover.json"), "--transform", "hyperwalk-to-coined"],
        vec!["verify", "--random", "8", "--transform", "hyperwalk-to-coined", "--seed", "3"],
    ]
    .iter()
    .map(|a| a.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}
