//! End-to-end runs of the `liebr` binary: exit codes, file formats and
//! byte-for-byte reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn liebr(args: &[&str], config: Option<&str>, dir: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_liebr"));
    cmd.args(args).current_dir(dir);
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(&path);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("process exited normally")
}

fn read(dir: &Path, rel: &str) -> String {
    std::fs::read_to_string(dir.join(rel)).unwrap()
}

fn json(dir: &Path, rel: &str) -> Value {
    serde_json::from_str(&read(dir, rel)).unwrap()
}

fn out(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn rigid_body_simulation_conserves_its_casimir() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(
        &["simulate", "--out", "run"],
        Some(r#"{"command": "simulate", "model": "rigid_body", "integrator": {"t_final": 20.0, "dt": 1e-3}}"#),
        tmp.path(),
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&out(tmp.path(), "run"), "summary.json");
    let drift = summary["casimir_drifts"][0]["max_relative_drift"].as_f64().unwrap();
    assert!(drift < 1e-6, "{drift}");
    let (header, rows) = csv_rows(&read(&out(tmp.path(), "run"), "trajectory.csv"));
    assert_eq!(header, ["t", "z1", "z2", "z3", "H", "|K|^2"]);
    assert_eq!(rows.last().unwrap()[0], 20.0);
}

#[test]
fn extended_pendulum_keeps_its_constraints() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(
        &["simulate", "--out", "."],
        Some(r#"{"model": "pendulum_extended", "initial": [1.0, 0.0, 0.3, 0.0], "integrator": {"t_final": 5.0, "record_every": 1}}"#),
        tmp.path(),
        &[],
    );
    assert_eq!(code(&o), 0);
    let (_, rows) = csv_rows(&read(tmp.path(), "trajectory.csv"));
    assert_eq!(rows.len(), 5001);
    assert!(rows.iter().all(|r| r[1] == 1.0 && r[2] == 0.0));
}

#[test]
fn usage_and_configuration_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    assert_eq!(code(&liebr(&["simulate"], Some(r#"{"model": "double_pendulum"}"#), p, &[])), 1);
    assert_eq!(code(&liebr(&["simulate"], Some(r#"{"model": "pendulum", "extra": 1}"#), p, &[])), 1);
    assert_eq!(code(&liebr(&["kernel"], Some(r#"{"command": "simulate"}"#), p, &[])), 1);
    assert_eq!(code(&liebr(&["simulate"], Some("not json"), p, &[])), 1);
    assert_eq!(code(&liebr(&["simulate", "--frobnicate"], None, p, &[])), 1);
    assert_eq!(code(&liebr(&[], None, p, &[])), 1);
    assert_eq!(code(&liebr(&["verify", "--config", "missing.json"], None, p, &[])), 1);
    assert_eq!(code(&liebr(&["verify"], Some(r#"{"verify": {"suite": "everything"}}"#), p, &[])), 1);
    assert_eq!(code(&liebr(&["simulate"], Some(r#"{"model": "pendulum"}"#), p, &[("LIEBR_THREADS", "zero")])), 1);
    assert_eq!(code(&liebr(&["--help"], None, p, &[])), 0);
}

#[test]
fn blow_up_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(
        &["simulate"],
        Some(r#"{"model": "charged_noncanonical", "integrator": {"t_final": 1e4, "dt": 100.0}}"#),
        tmp.path(),
        &[],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("blew up"));
}

#[test]
fn oscillator_caustic_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(
        &["kernel"],
        Some(
            r#"{"kernel": {"kind": "ho", "tau": 3.141592653589793, "omega": 1.0, "x_prime": [0.0],
                "grid": {"lower": [-1.0], "upper": [1.0], "points": [5]}}}"#,
        ),
        tmp.path(),
        &[],
    );
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nearest caustic"));
}

#[test]
fn magnetic_kernel_without_field_matches_free_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = r#""grid": {"lower": [-1.0, -0.5, 0.0], "upper": [1.0, 0.5, 0.2], "points": [5, 3, 2]}"#;
    let landau = format!(
        r#"{{"constants": {{"b": [0.0, 0.0, 0.0]}}, "kernel": {{"kind": "landau", "tau": 0.8, "x_prime": [0.1, 0.2, -0.3], {grid}}}}}"#
    );
    let free = format!(r#"{{"kernel": {{"kind": "free", "tau": 0.8, "x_prime": [0.1, 0.2, -0.3], {grid}}}}}"#);
    assert_eq!(code(&liebr(&["kernel", "--out", "l"], Some(&landau), tmp.path(), &[])), 0);
    assert_eq!(code(&liebr(&["kernel", "--out", "f"], Some(&free), tmp.path(), &[])), 0);
    let (hl, rl) = csv_rows(&read(&out(tmp.path(), "l"), "kernel.csv"));
    let (hf, rf) = csv_rows(&read(&out(tmp.path(), "f"), "kernel.csv"));
    assert_eq!(rl.len(), 30);
    let col = |h: &[String], n: &str| h.iter().position(|c| c == n).unwrap();
    for (a, b) in rl.iter().zip(&rf) {
        for name in ["re", "im"] {
            let (x, y) = (a[col(&hl, name)], b[col(&hf, name)]);
            assert!((x - y).abs() <= 1e-8 * y.abs().max(1e-3), "{name}: {x} vs {y}");
        }
        assert_eq!(a[col(&hl, "gauge_re")], 1.0);
    }
}

#[test]
fn relativistic_pure_magnetic_trace_log_column() {
    let tmp = tempfile::tempdir().unwrap();
    let (charge, b, s) = (0.7_f64, 1.2_f64, 0.9_f64);
    let cfg = format!(
        r#"{{"kernel": {{"kind": "relativistic", "tau": {s}, "x_prime": [0.0, 0.1, 0.2, 0.0],
            "field": {{"e": [0.0, 0.0, 0.0], "b": [0.0, 0.0, {b}], "charge": {charge}}},
            "grid": {{"lower": [0.0, -1.0, -1.0, 0.5], "upper": [0.0, 1.0, 1.0, 0.5], "points": [1, 3, 3, 1]}}}}}}"#
    );
    let o = liebr(&["kernel"], Some(&cfg), tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(&read(&out(tmp.path(), "liebr-out"), "kernel.csv"));
    let c = h.iter().position(|n| n == "tr_log_term").unwrap();
    let x = charge * b * s;
    for r in rows {
        assert!((r[c] - x / x.sin()).abs() < 1e-14, "{}", r[c]);
    }
}

#[test]
fn verify_suites_pass_and_report_per_check() {
    let tmp = tempfile::tempdir().unwrap();
    for suite in ["brackets", "models", "proper_time"] {
        let o = liebr(&["verify", "--out", suite], Some(&format!(r#"{{"verify": {{"suite": "{suite}"}}}}"#)), tmp.path(), &[]);
        assert_eq!(code(&o), 0, "{suite}: {}", read(&out(tmp.path(), suite), "report.json"));
        let r = json(&out(tmp.path(), suite), "report.json");
        assert_eq!(r["passed"], Value::Bool(true));
        assert!(r["checks"].as_array().unwrap().len() > 5);
    }
    let r = json(&out(tmp.path(), "proper_time"), "report.json");
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "action/worldline_quadrature"));
}

#[test]
fn semiclassical_suite_without_convolutions() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(&["verify"], Some(r#"{"verify": {"suite": "semiclassical", "semigroup": false}}"#), tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn injected_broken_tensor_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(
        &["verify"],
        Some(r#"{"verify": {"suite": "brackets", "inject_broken_tensor": true}}"#),
        tmp.path(),
        &[],
    );
    assert_ne!(code(&o), 0);
    let r = json(&out(tmp.path(), "liebr-out"), "report.json");
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == Value::Bool(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["broken_fixture/jacobi"]);
}

/// Runs `args` twice into separate directories and returns the files of
/// both runs.
fn twice(args: &[&str], config: &str, env: &[(&str, &str)]) -> Vec<(String, Vec<u8>, Vec<u8>)> {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let mut a = args.to_vec();
        a.extend(["--out", run]);
        let o = liebr(&a, Some(config), tmp.path(), env);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for entry in std::fs::read_dir(tmp.path().join("a")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        let a = std::fs::read(tmp.path().join("a").join(&name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(&name)).unwrap();
        files.push((name, a, b));
    }
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let kernel = r#"{"kernel": {"kind": "landau", "tau": 0.6, "x_prime": [0.1, -0.2, 0.0],
        "grid": {"lower": [-1.0, -1.0, 0.0], "upper": [1.0, 1.0, 0.0], "points": [40, 40, 1]}}}"#;
    let sim = r#"{"model": "charged_noncanonical", "integrator": {"t_final": 3.0, "dt": 1e-3, "record_every": 7}}"#;
    for (args, cfg, env) in [
        (&["kernel", "--seedless"][..], kernel, &[][..]),
        (&["kernel"][..], kernel, &[("LIEBR_THREADS", "1")][..]),
        (&["simulate", "--seedless"][..], sim, &[][..]),
        (&["verify"][..], r#"{"verify": {"suite": "brackets", "samples": 30}}"#, &[][..]),
    ] {
        let files = twice(args, cfg, env);
        assert!(!files.is_empty());
        for (name, a, b) in files {
            assert_eq!(a, b, "{name} differs between runs");
            let text = String::from_utf8(a).expect("UTF-8");
            assert!(!text.contains('\r') && text.ends_with('\n'), "{name}");
        }
    }
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let o = liebr(&["simulate"], Some(r#"{"model": "pendulum", "integrator": {"t_final": 0.01}}"#), tmp.path(), &[]);
    assert_eq!(code(&o), 0);
    let text = read(&out(tmp.path(), "liebr-out"), "trajectory.csv");
    for cell in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 17, "{cell}");
    }
}
