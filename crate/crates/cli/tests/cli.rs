use std::process::{Command, Output};

use serde_json::Value;

fn lorpto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorpto"))
        .args(args)
        .env_remove("LORPTO_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    let ok = lorpto(&["check", "--space", "minkowski:2", "--samples", "2000"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["violations"], 0);

    let violated = lorpto(&["witness", "--space", "model:1", "--scale", "0.2"]);
    assert_eq!(violated.status.code(), Some(2));
    assert!(json(&violated)["slack"].as_f64().unwrap() < -1e-6);

    for bad in [
        &["check", "--space", "euclid:2"][..],
        &["check", "--samples", "0"],
        &["check", "--delta", "-1"],
        &["witness", "--space", "model:1"],
        &["frobnicate"],
    ] {
        assert_eq!(lorpto(bad).status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = lorpto(&[
        "check", "--space", "model:-1", "--samples", "300", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn timing_can_be_omitted() {
    let with = json(&lorpto(&["check", "--samples", "100"]));
    assert!(with.get("wall_time_secs").is_some());
    let a = lorpto(&["check", "--samples", "100", "--no-timing"]);
    let b = lorpto(&["check", "--samples", "100", "--no-timing", "--threads", "2"]);
    assert!(json(&a).get("wall_time_secs").is_none());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sprinkle_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("causet.json");
    let p = path.to_str().unwrap();
    let s = lorpto(&["causet", "sprinkle", "--space", "model:-1", "-n", "30", "--seed", "4", "--out", p]);
    assert_eq!(s.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["n"], 30);
    let c = lorpto(&["causet", "check", "--input", p, "--no-timing"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(json(&c)["violations"], 0);
}

#[test]
fn curvature_and_cone_subcommands() {
    let e = lorpto(&["curvature", "estimate", "--space", "model:1"]);
    assert_eq!(e.status.code(), Some(0));
    assert!((json(&e)["estimate"]["k_hat"].as_f64().unwrap() - 1.0).abs() < 0.05);
    let f = lorpto(&["curvature", "fourpoint", "--seps", "1,2,3,1,2,1"]);
    // events at t = 0, 1, 2, 3 on one worldline
    assert_eq!(f.status.code(), Some(0));
    let c = lorpto(&["cone", "--space", "minkowski:1", "--samples", "200"]);
    assert_eq!(c.status.code(), Some(0));
}
