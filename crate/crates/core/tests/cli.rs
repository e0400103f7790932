//! End-to-end tests of the command-line binary: exit codes, output syntax
//! and cross-command round-trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fefkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn parsed(output: &Output) -> Value {
    serde_json::from_str(&stdout(output)).expect("JSON output parses")
}

fn write_state(path: &Path, re: [[f64; 4]; 4]) {
    let im = [[0.0f64; 4]; 4];
    let file = serde_json::json!({
        "dims": [2, 2],
        "re": re,
        "im": im,
    });
    std::fs::write(path, file.to_string()).expect("state file writes");
}

fn border_file(dir: &Path) -> PathBuf {
    let s = std::f64::consts::SQRT_2;
    let path = dir.join("border.json");
    write_state(
        &path,
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, (3.0 - 2.0 * s) / 2.0, (1.0 - s) / 2.0, 0.0],
            [0.0, (1.0 - s) / 2.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, (2.0 * s - 2.0) / 2.0],
        ],
    );
    path
}

fn singlet_file(dir: &Path) -> PathBuf {
    let path = dir.join("singlet.json");
    write_state(
        &path,
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.5, -0.5, 0.0],
            [0.0, -0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ],
    );
    path
}

#[test]
fn missing_file_exits_one() {
    let output = run(&["analyze", "/definitely/not/here.json"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("error:"));
}

#[test]
fn invalid_state_exits_two_naming_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write_state(
        &path,
        [
            [0.6, 0.0, 0.0, 0.0],
            [0.0, 0.6, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -0.2],
        ],
    );
    let output = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("NotPositive"));
}

#[test]
fn improve_on_non_family_state_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nonfam.json");
    write_state(
        &path,
        [
            [0.25, 0.1, 0.0, 0.0],
            [0.1, 0.25, 0.0, 0.0],
            [0.0, 0.0, 0.25, 0.0],
            [0.0, 0.0, 0.0, 0.25],
        ],
    );
    let output = run(&["improve", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("--channel"));
}

#[test]
fn improve_with_clashing_flags_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let output = run(&[
        "improve",
        path.to_str().unwrap(),
        "--sweep",
        "10",
        "--channel",
        "ad",
        "--theta",
        "0.3",
        "--side",
        "B",
    ]);
    assert_eq!(output.status.code(), Some(3));
    let output = run(&["improve", path.to_str().unwrap(), "--theta", "0.3"]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn starved_bound_exits_four_but_reports_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let output = run(&[
        "bound",
        path.to_str().unwrap(),
        "--side",
        "B",
        "--dykstra-iters",
        "0",
        "--max-iters",
        "5",
    ]);
    assert_eq!(output.status.code(), Some(4));
    assert!(stdout(&output).contains("best value found"));
}

#[test]
fn demo_passes_and_reruns_byte_identically() {
    let first = run(&["demo"]);
    assert_eq!(first.status.code(), Some(0));
    let second = run(&["demo"]);
    assert_eq!(first.stdout, second.stdout);
    let first_json = run(&["demo", "--format", "json"]);
    let second_json = run(&["demo", "--format", "json"]);
    assert_eq!(first_json.status.code(), Some(0));
    assert_eq!(first_json.stdout, second_json.stdout);
}

#[test]
fn demo_json_reports_every_check_passing() {
    let output = run(&["demo", "--format", "json"]);
    let doc = parsed(&output);
    assert_eq!(doc["all_pass"], Value::Bool(true));
    let checks = doc["checks"].as_array().expect("checks array");
    assert_eq!(checks.len(), 10);
    for check in checks {
        assert_eq!(check["pass"], Value::Bool(true), "failed: {}", check["name"]);
    }
}

#[test]
fn analyze_border_state_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let output = run(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert!((doc["f"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["n"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(doc["reduction"]["violated_a"], Value::Bool(true));
    assert_eq!(doc["reduction"]["violated_b"], Value::Bool(true));
}

#[test]
fn canonicalized_output_revalidates_and_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let canon = dir.path().join("canon.json");
    let output = run(&[
        "canonicalize",
        path.to_str().unwrap(),
        "--out",
        canon.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let output = run(&["analyze", canon.to_str().unwrap(), "--format", "json"]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert!((doc["f"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    let diag = doc["canonical_t_diagonal"].as_array().expect("diagonal");
    for (entry, expected) in diag.iter().zip(doc["t"].as_array().unwrap().iter().enumerate()) {
        let (i, row) = expected;
        assert!((entry.as_f64().unwrap() - row[i].as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn teleport_through_singlet_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let path = singlet_file(dir.path());
    let output = run(&[
        "teleport",
        path.to_str().unwrap(),
        "--samples",
        "1000",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert!((doc["exact"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((doc["mc_mean"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn improve_border_state_reports_the_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let improved = dir.path().join("improved.json");
    let output = run(&[
        "improve",
        path.to_str().unwrap(),
        "--out",
        improved.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert_eq!(doc["best"]["variant"], Value::String("B-rho44".into()));
    assert!((doc["best"]["delta"].as_f64().unwrap() - 0.0224077499274828).abs() < 1e-9);
    assert!((doc["f_after"].as_f64().unwrap() - 0.522407749927483).abs() < 1e-9);
    assert!(doc["fidelity_after"].as_f64().unwrap() > 2.0 / 3.0);

    let output = run(&["analyze", improved.to_str().unwrap(), "--format", "json"]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert!((doc["f"].as_f64().unwrap() - 0.522407749927483).abs() < 1e-9);
}

#[test]
fn sweep_and_closed_form_agree_on_the_border_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let output = run(&[
        "improve",
        path.to_str().unwrap(),
        "--sweep",
        "3000",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert_eq!(doc["best"]["variant"], Value::String("B-rho44".into()));
    assert!((doc["best"]["delta"].as_f64().unwrap() - 0.0224077499274828).abs() < 1e-6);
}

#[test]
fn explicit_channel_on_singlet_decreases_f() {
    let dir = tempfile::tempdir().unwrap();
    let path = singlet_file(dir.path());
    let output = run(&[
        "improve",
        path.to_str().unwrap(),
        "--channel",
        "ad",
        "--theta",
        "0.3",
        "--side",
        "B",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    assert!((doc["f_before"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(doc["f_after"].as_f64().unwrap() < 1.0 - 1e-3);
    let closed = doc["f_after"].as_f64().unwrap();
    let brute = doc["f_after_bruteforce"].as_f64().unwrap();
    assert!((closed - brute).abs() < 1e-4);
}

#[test]
fn bound_on_border_state_certifies_the_gain() {
    let dir = tempfile::tempdir().unwrap();
    let path = border_file(dir.path());
    let output = run(&[
        "bound",
        path.to_str().unwrap(),
        "--side",
        "B",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = parsed(&output);
    let value = doc["value"].as_f64().unwrap();
    assert!(value >= 0.5214);
    assert!(value <= 0.5224077499274828 + 1e-6);
    assert_eq!(doc["converged"], Value::Bool(true));
    assert!(!doc["kraus_operators"].as_array().unwrap().is_empty());
    let achieved = doc["f_after_recovered_channel"].as_f64().unwrap();
    assert!((achieved - value).abs() < 1e-4);
}
