//! Exit codes and outputs of the `snapkit` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn snapkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snapkit"))
        .args(args)
        .env_remove("SNAPKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_accepts_the_example() {
    let out = snapkit(&["check", &fixture("ex1_plate_gl.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["valid"], true);
    assert_eq!(doc["rank"], 6);
}

#[test]
fn check_names_the_collinear_triangle_shaky() {
    let out = snapkit(&["check", &fixture("collinear_triangle.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("realization is shaky"), "{}", stderr(&out));
}

#[test]
fn check_names_the_count_failure() {
    let out = snapkit(&["check", &fixture("ex1_removed_edge.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("count condition failed"), "{}", stderr(&out));
}

#[test]
fn snap_refuses_a_shaky_start() {
    let out = snapkit(&["snap", &fixture("collinear_triangle.json")]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn bad_flags_are_usage_errors() {
    let out = snapkit(&["snap", &fixture("ex1_bars_gl.json"), "--rank-tol=0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = snapkit(&["snap", &fixture("ex1_bars_gl.json"), "--solver", "simplex"]);
    assert_eq!(out.status.code(), Some(2));
    let out = snapkit(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_and_malformed_inputs_fail_validation() {
    let out = snapkit(&["check", "/nonexistent/framework.json"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dimension": 2}"#).unwrap();
    let out = snapkit(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn homotopy_on_ce_is_a_precondition_error() {
    let out = snapkit(&["critical", &fixture("ex1_bars_ce.json"), "--solver", "homotopy"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn energy_reports_polished_free_values() {
    let out = snapkit(&["energy", &fixture("ex1_bars_gl.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["total_length"], 44.0);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 6);
    // Rounded coordinates leave a tiny residual strain.
    assert!(doc["density"].as_f64().unwrap() < 1e-9);
}

#[test]
fn snap_is_deterministic_and_writes_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in 0..2 {
        let json = dir.path().join(format!("snap{run}.json"));
        let svg = dir.path().join(format!("snap{run}.svg"));
        let csv = dir.path().join(format!("snap{run}.csv"));
        let out = snapkit(&[
            "snap",
            &fixture("ex1_bars_gl.json"),
            "--out",
            json.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        reports.push((
            std::fs::read(&json).unwrap(),
            std::fs::read(&svg).unwrap(),
            std::fs::read(&csv).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1], "outputs differ between runs");
    let doc: serde_json::Value = serde_json::from_slice(&reports[0].0).unwrap();
    assert_eq!(doc["diagnostics"]["polished_start"], true);
    assert_eq!(doc["witness_is_shaky"], true);
    assert_eq!(doc["path_certificate"]["success"], true);
    let csv = String::from_utf8(reports[0].2.clone()).unwrap();
    assert!(csv.starts_with("t,x1,y1,"));
    assert!(csv.lines().next().unwrap().ends_with("U_total"));
}

#[test]
fn seed_is_read_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_snapkit"))
        .args(["critical", &fixture("ex1_bars_ce.json"), "--starts", "50"])
        .env("SNAPKIT_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["seed"], 17);
    assert_eq!(doc["search"]["newton_starts"], 50);
}

#[test]
fn track_to_the_cyan_witness() {
    let out = snapkit(&["track", &fixture("ex1_bars_gl.json"), "--target", &fixture("ex1_cyan.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["monotone"], true);
    assert_eq!(doc["path_certificate"]["success"], true);
}

#[test]
fn plot_draws_one_layer_per_configuration() {
    let out = snapkit(&[
        "plot",
        &fixture("ex1_bars_gl.json"),
        "--overlay",
        &fixture("ex1_cyan.json"),
        "--overlay",
        &fixture("ex1_blue.json"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert_eq!(svg.matches(r#"<g class="configuration""#).count(), 3);
    assert_eq!(svg.matches(r#"class="knot-label""#).count(), 6);
}

#[test]
fn analysing_a_non_isostatic_framework_is_a_precondition_error() {
    let out = snapkit(&["snap", &fixture("ex1_removed_edge.json")]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
