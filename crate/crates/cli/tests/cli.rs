use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use uqcut::statevec::Circuit;

fn uqcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uqcut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = uqcut(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const TRIANGLE: &str = r#"{"n": 3, "pairwise": [[1, 2, 1], [1, 3, 2], [2, 3, 3]]}"#;
const UNIT_TRIANGLE: &str = r#"{"n": 3, "pairwise": [[1, 2, 1], [1, 3, 1], [2, 3, 1]]}"#;

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    k.sort();
    k
}

#[test]
fn version_has_semver_and_hash() {
    let s = ok_stdout(&["--version"]);
    assert!(s.starts_with(&format!("uqcut {} (", env!("CARGO_PKG_VERSION"))), "{s}");
    assert!(s.trim_end().ends_with(')'));
}

#[test]
fn gen_writes_complete_maxcut_graph_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        ok_stdout(&["gen", "--n", "3", "--range", "1:10", "--maxcut", "--seed", "7", "--out", p.to_str().unwrap()]);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(keys(&v), ["n", "pairwise", "unary"]);
    assert_eq!(v["n"], 3);
    assert!(v["unary"].as_array().unwrap().is_empty());
    let pairs = v["pairwise"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    for e in pairs {
        let w = e[2].as_f64().unwrap();
        assert!((1.0..=10.0).contains(&w));
    }
}

#[test]
fn inverted_range_is_an_argument_error() {
    let out = uqcut(&["gen", "--n", "3", "--range", "10:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}

#[test]
fn unknown_flag_is_rejected() {
    assert_eq!(uqcut(&["gen", "--n", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(uqcut(&[]).status.code(), Some(2));
}

#[test]
fn oracle_enumerates_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE);
    let v = json(&["oracle", "--in", &tri]);
    assert_eq!(v["c_min"], -4.0);
    assert_eq!(v["c_max"], 6.0);
    assert_eq!(v["argmins"], serde_json::json!(["001", "110"]));
    assert!(v.get("diagonal").is_none());
    let full = json(&["oracle", "--in", &tri, "--diagonal"]);
    assert_eq!(full["diagonal"].as_array().unwrap().len(), 8);
}

#[test]
fn solve_two_node_cut() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "two.json", r#"{"n": 2, "pairwise": [[1, 2, 1]]}"#);
    let trace = dir.path().join("trace.csv");
    let v = json(&["solve", "--in", &g, "--method", "uq", "--exact", "--trace", trace.to_str().unwrap()]);
    for k in ["thetas", "bits", "energy", "ratio", "index", "counts"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    let bits = v["bits"].as_str().unwrap();
    assert!(bits == "01" || bits == "10", "{bits}");
    assert_eq!(v["ratio"], 1.0);
    assert_eq!(v["index"], 1);
    let csv = fs::read_to_string(trace).unwrap();
    assert!(csv.starts_with("k,loss,grad_norm,step_size\n"));
    assert_eq!(csv.lines().count(), 1 + 101);
}

#[test]
fn solve_is_deterministic_in_shot_mode() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.json", TRIANGLE);
    let args = ["solve", "--in", &g, "--shots", "128", "--kmax", "20", "--seed", "5"];
    assert_eq!(ok_stdout(&args), ok_stdout(&args));
}

#[test]
fn qaoa_solve_uses_default_depth() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.json", TRIANGLE);
    let v = json(&["solve", "--in", &g, "--method", "qaoa", "--exact"]);
    // 2p parameters with p = ceil(3/2) = 2
    assert_eq!(v["thetas"].as_array().unwrap().len(), 4);
    assert_eq!(v["method"], "qaoa_simplex");
    let v = json(&["solve", "--in", &g, "--method", "qaoa", "--p", "1", "--optimizer", "ngd"]);
    assert_eq!(v["thetas"].as_array().unwrap().len(), 2);
}

#[test]
fn exact_metrics_beyond_guard_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.json", TRIANGLE);
    let out = uqcut(&["solve", "--in", &g, "--exact-metrics", "--max-nodes", "2"]);
    assert_eq!(out.status.code(), Some(3));
    // Without the flag the solve succeeds and skips the metrics.
    let v = json(&["solve", "--in", &g, "--max-nodes", "2", "--kmax", "5"]);
    assert!(v.get("ratio").is_none());

    let huge = write(dir.path(), "huge.json", r#"{"n": 27, "pairwise": [[1, 2, 1]]}"#);
    assert_eq!(uqcut(&["solve", "--in", &huge, "--exact-metrics"]).status.code(), Some(3));
    assert_eq!(uqcut(&["oracle", "--in", &huge]).status.code(), Some(3));
}

#[test]
fn missing_and_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(uqcut(&["solve", "--in", missing.to_str().unwrap()]).status.code(), Some(1));
    let dup = write(dir.path(), "dup.json", r#"{"n": 2, "pairwise": [[1, 2, 1], [2, 1, 3]]}"#);
    assert_eq!(uqcut(&["oracle", "--in", &dup]).status.code(), Some(2));
    let selfpair = write(dir.path(), "self.json", r#"{"n": 2, "pairwise": [[1, 1, 1]]}"#);
    assert_eq!(uqcut(&["oracle", "--in", &selfpair]).status.code(), Some(2));
}

#[test]
fn resources_match_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.json", UNIT_TRIANGLE);
    let v = json(&["resources", "--in", &g, "--method", "uqising"]);
    assert_eq!(keys(&v), ["cnot", "connectivity", "hadamard", "method", "qubits", "rotations", "warnings"]);
    assert_eq!((v["cnot"].as_u64(), v["rotations"].as_u64()), (Some(13), Some(6)));
    assert_eq!((v["hadamard"].as_u64(), v["qubits"].as_u64()), (Some(2), Some(5)));
    assert_eq!(v["connectivity"], serde_json::json!({"kind": "one-to-all", "degree": 4}));

    let q = json(&["resources", "--in", &g, "--method", "qaoa", "--p", "1"]);
    assert_eq!(q["rotations"], 6);

    let c = json(&["resources", "--in", &g, "--census"]);
    assert_eq!(c["census"]["cnot_raw"], 19);
    assert!(c["census"]["cnot"].as_u64().unwrap() <= 19);
}

#[test]
fn resources_on_edgeless_instance() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "empty.json", r#"{"n": 3}"#);
    // Mixer rotations scale with nodes, not edges, so QAOA keeps 3.
    for (method, rotations) in [("uqising", 0), ("qaoa", 3)] {
        let v = json(&["resources", "--in", &g, "--method", method, "--p", "1"]);
        assert_eq!(v["cnot"], 0, "{method}");
        assert_eq!(v["rotations"], rotations, "{method}");
        let warnings = v["warnings"].as_array().unwrap();
        assert!(warnings.iter().any(|w| w == "instance has no edges"), "{method}");
    }
}

#[test]
fn ksweep_reference_row_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let curves = dir.path().join("curves.csv");
    let csv = ok_stdout(&["ksweep", "--n", "10", "--instances", "10", "--signed", "--curves", curves.to_str().unwrap()]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,instance_seed,agreement"));
    let reference = std::f64::consts::FRAC_2_PI;
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 3);
            f[1].parse::<u64>().unwrap();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 11 * 10);
    let refs: Vec<f64> = rows.iter().filter(|r| r.0 == reference).map(|r| r.1).collect();
    assert_eq!(refs, vec![1.0; 10]);
    let c = fs::read_to_string(curves).unwrap();
    assert!(c.starts_with("lambda,reference,rank,mean_transformed\n"));
}

#[test]
fn exported_circuits_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", TRIANGLE);
    for which in ["controlled", "block", "ansatz", "entangle", "workflow", "qaoa"] {
        let text = ok_stdout(&["export-circuit", "--in", &g, "--which", which]);
        let c = Circuit::from_json(&text).unwrap_or_else(|e| panic!("{which}: {e}"));
        assert_eq!(c.to_json().unwrap(), text.trim_end(), "{which}");
    }
    let v = json(&["export-circuit", "--in", &g, "--which", "controlled"]);
    assert_eq!(keys(&v), ["m", "ops", "roles"]);
    assert_eq!(v["m"], 5);
    for op in v["ops"].as_array().unwrap() {
        assert!(op["kind"].is_string() && op["targets"].is_array() && op["controls"].is_array());
    }
    let cancelled = Circuit::from_json(&ok_stdout(&["export-circuit", "--in", &g, "--which", "controlled", "--cancel"])).unwrap();
    assert!(cancelled.census().cnot < 19);
}

#[test]
fn qaoa_evaluation_matches_oracle_at_zero_angles() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.json", TRIANGLE);
    let v = json(&["qaoa", "--in", &g, "--gammas", "0", "--betas", "0"]);
    // Uniform superposition: the mean of the diagonal, which is 0 for MaxCut.
    assert!(v["energy"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(uqcut(&["qaoa", "--in", &g, "--gammas", "0,1", "--betas", "0"]).status.code(), Some(2));
}

#[test]
fn bench_output_is_byte_identical_and_well_formed() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let run = |dir: &Path, jobs: &str| {
        ok_stdout(&[
            "bench", "--sizes", "3,4", "--instances", "2", "--methods", "uqmaxcut,qaoa_ngd",
            "--kmax", "20", "--shots", "64", "--seed", "11", "--jobs", jobs,
            "--out", dir.to_str().unwrap(),
        ])
    };
    let a = run(dirs[0].path(), "1");
    let b = run(dirs[1].path(), "4");
    assert_eq!(a, b);
    assert_eq!(
        fs::read(dirs[0].path().join("results.csv")).unwrap(),
        fs::read(dirs[1].path().join("results.csv")).unwrap()
    );
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("n,seed,method,r,i,iterations,wall_ms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for r in &rows {
        assert_eq!(r.len(), 7);
        let ratio: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio));
        assert!(r[4] == "0" || r[4] == "1");
        assert!(r[6].is_empty());
    }
    let manifest: Value = serde_json::from_slice(&fs::read(dirs[0].path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 11);
    assert_eq!(fs::read_dir(dirs[0].path().join("instances")).unwrap().count(), 4);
    assert_eq!(fs::read_dir(dirs[0].path().join("traces")).unwrap().count(), 8);
}

#[test]
fn bench_rejects_bad_method() {
    let out = uqcut(&["bench", "--sizes", "3", "--instances", "1", "--methods", "annealing"]);
    assert_eq!(out.status.code(), Some(2));
    let out = uqcut(&["bench", "--sizes", "3", "--instances", "1", "--ising", "--methods", "uqmaxcut"]);
    assert_eq!(out.status.code(), Some(2));
}
