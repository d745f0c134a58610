//! End-to-end tests of the `qsignal` binary: exit codes, JSON/table
//! agreement, determinism, and numeric-tolerance diffs against the
//! golden output files.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn paper_game() -> String {
    format!("{}/../../paper.game", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    serde_json::from_str(&text).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsignal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "args {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

// Structural equality with numeric tolerance on every number.
fn assert_close(got: &Value, want: &Value, tol: f64, path: &str) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= tol, "{path}: {a} vs {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{path}: length {} vs {}", a.len(), b.len());
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_close(x, y, tol, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            let keys_a: Vec<_> = a.keys().collect();
            let keys_b: Vec<_> = b.keys().collect();
            assert_eq!(keys_a, keys_b, "{path}: key sets differ");
            for (k, x) in a {
                assert_close(x, &b[k], tol, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(got, want, "{path}"),
    }
}

#[test]
fn golden_normal_form_classical() {
    let got = run_json(&["normal-form", "--classical", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("normal_form_classical.json"), 1e-9, "$");
}

#[test]
fn golden_normal_form_quantum() {
    let got = run_json(&["normal-form", "--quantum", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("normal_form_quantum.json"), 1e-9, "$");
}

#[test]
fn golden_nash_both_modes() {
    let got = run_json(&["nash", "--classical", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("nash_classical.json"), 1e-9, "$");
    let got = run_json(&["nash", "--quantum", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("nash_quantum.json"), 1e-9, "$");
}

#[test]
fn golden_pbe_classical() {
    let got = run_json(&["pbe", "--classical", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("pbe_classical.json"), 1e-9, "$");
}

#[test]
fn golden_state() {
    let got = run_json(&["state", "--profile", "0,0,pi,pi", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("state_0_0_pi_pi.json"), 1e-9, "$");
}

#[test]
fn golden_classify() {
    // The classification is grid-robust: a coarse grid must reproduce
    // the stored verdict flags; numbers agree to the optimality tolerance.
    let got = run_json(&["classify", "--grid", "65", "--format", "json", &paper_game()]);
    assert_close(&got, &golden("classify_grid65.json"), 1e-6, "$");
}

#[test]
fn unicode_pi_accepted_in_profile() {
    let ascii = run_json(&["state", "--profile", "0,0,pi,pi", "--format", "json", &paper_game()]);
    let unicode = run_json(&["state", "--profile", "0,0,π,π", "--format", "json", &paper_game()]);
    assert_close(&ascii, &unicode, 0.0, "$");
}

#[test]
fn deterministic_output() {
    let args = ["classify", "--grid", "33", "--format", "json", &paper_game()];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical reruns");
}

#[test]
fn table_and_json_agree_numerically() {
    let json = run_json(&["nash", "--quantum", "--format", "json", &paper_game()]);
    let table = run(&["nash", "--quantum", &paper_game()]);
    let text = String::from_utf8(table.stdout).unwrap();
    for eq in json["equilibria"].as_array().unwrap() {
        let payoffs = eq["payoffs"].as_array().unwrap();
        assert!(text.contains("(7.5, 7.75)"));
        assert_eq!(payoffs[0].as_f64().unwrap(), 7.5);
        assert_eq!(payoffs[1].as_f64().unwrap(), 7.75);
    }
}

#[test]
fn state_reports_paper_amplitudes() {
    let got = run_json(&["state", "--profile", "0,0,pi,pi", "--format", "json", &paper_game()]);
    let terms = got["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    let probs: Vec<f64> = terms.iter().map(|t| t["prob"].as_f64().unwrap()).collect();
    let labels: Vec<&str> = terms.iter().map(|t| t["label"].as_str().unwrap()).collect();
    assert_eq!(labels, vec!["00011", "01100", "10011", "11100"]);
    for (p, want) in probs.iter().zip([0.375, 0.375, 0.125, 0.125]) {
        assert!((p - want).abs() < 1e-9);
    }
}

#[test]
fn exit_codes() {
    // Success.
    assert_eq!(run(&["nash", "--classical", &paper_game()]).status.code(), Some(0));

    // Usage / spec errors: exit 2.
    let both = run(&["nash", "--classical", "--quantum", &paper_game()]);
    assert_eq!(both.status.code(), Some(2));
    let neither = run(&["nash", &paper_game()]);
    assert_eq!(neither.status.code(), Some(2));
    let missing = run(&["nash", "--classical", "/definitely/not/here.game"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = run(&["frobnicate", &paper_game()]);
    assert_eq!(unknown.status.code(), Some(2));

    let dir = std::env::temp_dir();
    let empty = dir.join("qsignal_cli_empty.game");
    std::fs::write(&empty, "").unwrap();
    let out = run(&["nash", "--classical", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));

    let bad_p = dir.join("qsignal_cli_bad_p.game");
    std::fs::write(&bad_p, "p = 1.5\n").unwrap();
    let out = run(&["nash", "--classical", bad_p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('p') && err.contains("1.5"), "{err}");

    // A mode violation is a spec error, not a crash.
    let out = run(&["state", "--profile", "0,0,0", &paper_game()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_profile_angles_rejected() {
    let out = run(&["state", "--profile", "0,0,pi,garbage", &paper_game()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("garbage"));
    let out = run(&["state", "--profile", "0,0,pi,4", &paper_game()]);
    // theta = 4 > pi is out of range.
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_grid_and_tol_flow_through() {
    let dir = std::env::temp_dir();
    let spec = dir.join("qsignal_cli_opts.game");
    // Options must precede the [leaves] section.
    let text = std::fs::read_to_string(paper_game())
        .unwrap()
        .replace("[leaves]", "grid = 33\ntol = 1e-6\n[leaves]");
    std::fs::write(&spec, text).unwrap();
    let out = run(&["classify", "--format", "json", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pbe_cells"], serde_json::json!([[1, 1], [2, 2]]));
}
