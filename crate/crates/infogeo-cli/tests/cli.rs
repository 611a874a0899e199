//! End-to-end tests of the `infogeo` binary: JSON I/O, exit codes,
//! determinism of outputs.

use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infogeo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn distance_special_normal_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let p0 = write(dir.path(), "p0.json", r#"{"n":2,"D":[[1.0,0.0],[0.0,1.0]],"u":[0.0,0.0]}"#);
    let p1 = write(
        dir.path(),
        "p1.json",
        r#"{"n":2,"D":[[7.38905609893065,0.0],[0.0,1.0]],"u":[0.0,0.0]}"#,
    );
    let out = run(&[
        "distance",
        "--case",
        "special-normal",
        "--alpha",
        "0",
        "--p0",
        &p0,
        "--p1",
        &p1,
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], "ok");
    let d = v["payload"]["distance"].as_f64().unwrap();
    assert!((d - 2.0_f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn rejects_indefinite_point_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let p0 = write(dir.path(), "bad.json", r#"{"n":2,"D":[[1.0,2.0],[2.0,1.0]],"u":[0.0,0.0]}"#);
    let out = run(&["entropy", "shannon", "--n", "2", "--p", "1.0", "--point", &p0]);
    assert!(!out.status.success(), "exit code must be nonzero on error");
    let v = stdout_json(&out);
    assert_eq!(v["status"], "error");
    assert_eq!(v["payload"]["code"], "parse");
    assert!(v["payload"]["message"].as_str().unwrap().contains("D"));
}

#[test]
fn rejects_shape_mismatch_and_nan() {
    let dir = tempfile::tempdir().unwrap();
    let bad_shape =
        write(dir.path(), "s.json", r#"{"n":2,"D":[[1.0,0.0],[0.0,1.0]],"u":[0.0]}"#);
    let out = run(&["entropy", "shannon", "--n", "2", "--p", "1.0", "--point", &bad_shape]);
    assert!(!out.status.success());
    let v = stdout_json(&out);
    assert!(v["payload"]["message"].as_str().unwrap().contains("expected 2 entries"));

    let bad_nan = write(
        dir.path(),
        "nan.json",
        r#"{"n":1,"D":[[1.0]],"u":[null]}"#.replace("null", "1e999").as_str(),
    );
    let out = run(&["entropy", "shannon", "--n", "1", "--p", "1.0", "--point", &bad_nan]);
    assert!(!out.status.success());
}

#[test]
fn entropy_closed_matches_oracle_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let pt = write(dir.path(), "pt.json", r#"{"n":1,"D":[[1.7]],"u":[0.0]}"#);
    let closed = stdout_json(&run(&[
        "entropy", "renyi", "--n", "1", "--p", "1.5", "--q", "2.0", "--point", &pt,
    ]));
    let oracle = stdout_json(&run(&[
        "entropy", "renyi", "--n", "1", "--p", "1.5", "--q", "2.0", "--point", &pt,
        "--method", "oracle",
    ]));
    let a = closed["payload"]["entropy"].as_f64().unwrap();
    let b = oracle["payload"]["entropy"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    assert_eq!(oracle["diagnostics"]["method"], "quadrature");
    assert_eq!(closed["diagnostics"]["seed"], 0);
}

#[test]
fn q_equal_one_redirects_to_shannon() {
    let dir = tempfile::tempdir().unwrap();
    let pt = write(dir.path(), "pt.json", r#"{"n":1,"D":[[1.0]],"u":[0.0]}"#);
    let out = run(&[
        "entropy", "tsallis", "--n", "1", "--p", "1.0", "--q", "1.0", "--point", &pt,
    ]);
    assert!(!out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["payload"]["code"], "order_one");
}

#[test]
fn metric_command_with_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let pt = write(dir.path(), "pt.json", r#"{"n":1,"D":[[1.0]],"u":[0.0]}"#);
    let a = write(dir.path(), "a.json", r#"{"X":[[1.0]],"x":[0.0]}"#);
    let spec = write(dir.path(), "spec.json", r#"{"name":"fisher","p":1.0}"#);
    let out = run(&["metric", "--spec", &spec, "--point", &pt, "--a", &a, "--b", &a]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["payload"]["value"].as_f64().unwrap() - 0.5).abs() <= 1e-14);
    assert!((v["payload"]["as_unified"]["beta"].as_f64().unwrap() - 1.0).abs() <= 1e-14);
    // nonexistent Fisher info is an explicit error
    let spec2 = write(dir.path(), "spec2.json", r#"{"name":"fisher","p":2.5}"#);
    let out = run(&["metric", "--spec", &spec2, "--point", &pt, "--a", &a, "--b", &a]);
    assert!(!out.status.success());
    assert_eq!(stdout_json(&out)["payload"]["code"], "fisher_nonexistent");
}

#[test]
fn geodesic_ivp_writes_csv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let pt = write(dir.path(), "pt.json", r#"{"n":2,"D":[[1.0,0.0],[0.0,1.0]],"u":[0.0,0.0]}"#);
    let vel = write(
        dir.path(),
        "vel.json",
        r#"{"X":[[0.4,0.1],[0.1,-0.2]],"x":[0.3,-0.1]}"#,
    );
    let csv1 = dir.path().join("trace1.csv").display().to_string();
    let csv2 = dir.path().join("trace2.csv").display().to_string();
    for csv in [&csv1, &csv2] {
        let out = run(&[
            "geodesic", "ivp", "--point", &pt, "--velocity", &vel, "--alpha", "0.1",
            "--beta", "1.0", "--steps", "100", "--out", csv,
        ]);
        assert!(out.status.success());
    }
    let t1 = fs::read_to_string(&csv1).unwrap();
    let t2 = fs::read_to_string(&csv2).unwrap();
    assert_eq!(t1, t2, "identical inputs must give byte-identical traces");
    let mut lines = t1.lines();
    assert_eq!(lines.next().unwrap(), "t,D_11,D_12,D_22,u_1,u_2");
    assert_eq!(t1.lines().count(), 102);
}

#[test]
fn geodesic_bvp_and_closed_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p0 = write(dir.path(), "p0.json", r#"{"n":1,"D":[[2.0]],"u":[0.0]}"#);
    let p1 = write(dir.path(), "p1.json", r#"{"n":1,"D":[[2.0]],"u":[1.5]}"#);
    let csv = dir.path().join("closed.csv").display().to_string();
    let closed = stdout_json(&run(&[
        "geodesic", "closed", "--case", "n1", "--p0", &p0, "--p1", &p1, "--alpha", "0",
        "--beta", "1", "--out", &csv,
    ]));
    let d_closed = closed["payload"]["distance"].as_f64().unwrap();
    let bvp = stdout_json(&run(&[
        "geodesic", "bvp", "--p0", &p0, "--p1", &p1, "--alpha", "0", "--beta", "1",
    ]));
    let d_bvp = bvp["payload"]["distance"].as_f64().unwrap();
    assert!((d_closed - 1.960516286937094383).abs() <= 1e-9);
    assert!((d_closed - d_bvp).abs() <= 1e-5);
}

#[test]
fn curvature_scalar_values() {
    let out = stdout_json(&run(&["curvature", "scalar", "--n", "2", "--alpha", "0"]));
    assert!((out["payload"]["scal"].as_f64().unwrap() + 4.5).abs() <= 1e-14);
    assert!((out["payload"]["scal_special"].as_f64().unwrap() + 3.5).abs() <= 1e-14);
    // degenerate alpha is an explicit error
    let out = run(&["curvature", "scalar", "--n", "2", "--alpha", "-0.25"]);
    assert!(!out.status.success());
}

#[test]
fn verify_family_suite_passes() {
    let out = run(&["verify", "--suite", "family"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["all_pass"], true);
    // strict profile also holds on this build
    let out = run(&["verify", "--suite", "family", "--tol-profile", "strict"]);
    assert!(out.status.success());
}

#[test]
fn point_roundtrip_is_stable() {
    // one normalization pass, then byte-identical round trips
    let dir = tempfile::tempdir().unwrap();
    let raw = r#"{"n":2,"D":[[1.25,0.125],[0.125,0.75]],"u":[0.1,-0.2]}"#;
    let pt = write(dir.path(), "pt.json", raw);
    let out1 = stdout_json(&run(&[
        "entropy", "shannon", "--n", "2", "--p", "1.0", "--point", &pt,
    ]));
    let before = out1["payload"]["entropy"].as_f64().unwrap();
    let again = stdout_json(&run(&[
        "entropy", "shannon", "--n", "2", "--p", "1.0", "--point", &pt,
    ]));
    assert_eq!(before.to_bits(), again["payload"]["entropy"].as_f64().unwrap().to_bits());
}
