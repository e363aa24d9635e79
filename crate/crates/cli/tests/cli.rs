use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn schwartz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schwartz"))
        .args(args)
        .env_remove("SCHWARTZ_SEED")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_config(command: &str, dir: &Path, config: &Path, extra: &[&str]) -> Output {
    let out = dir.join("out");
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    schwartz(&args)
}

/// Rows of `x0[,x1…],re,im`, parsed.
fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const DERIVATIVE: &str = r#"{ "kind": "differential", "terms": [{ "index": [1], "coeff": 1 }] }"#;
const LINE_PI: &str = r#"{ "dim": 1, "counts": [64], "half_extents": [3.141592653589793] }"#;

#[test]
fn solve_derivative_of_sin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {DERIVATIVE}, "datum": {{ "kind": "sin", "k": 1 }} }}"#),
    );
    let out = run_config("solve", dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let (header, rows) = read_csv(&dir.path().join("out/solution.csv"));
    assert_eq!(header, "x0,re,im");
    assert_eq!(rows.len(), 64);
    for row in rows {
        assert!((row[1] + row[0].cos()).abs() < 1e-10);
        assert!(row[2].abs() < 1e-10);
    }
    let report = read_json(&dir.path().join("out/report.json"));
    assert_eq!(report["status"], "ok");
    assert!(report["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["divisibility"]["divisible"], true);
    assert_eq!(report["grid"]["counts"][0], 64);
    assert_eq!(report["policy"]["residual_threshold"], 1e-10);
}

#[test]
fn solve_derivative_of_constant_is_not_divisible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {DERIVATIVE}, "datum": {{ "kind": "constant", "value": 1 }} }}"#),
    );
    let out = run_config("solve", dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let report = read_json(&dir.path().join("out/report.json"));
    assert_eq!(report["status"], "not_divisible");
    let failure = &report["divisibility"]["failure"];
    assert_eq!(failure["worst_index"], serde_json::json!([0.0]));
    assert_eq!(failure["worst_flat_index"], 32);
    assert!(!dir.path().join("out/solution.csv").exists());
}

#[test]
fn malformed_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let odd = write_config(
        dir.path(),
        "odd.json",
        r#"{ "grid": { "dim": 1, "counts": [63], "half_extents": [1.0] } }"#,
    );
    let broken = write_config(dir.path(), "broken.json", "{ \"grid\": ");
    let unknown = write_config(
        dir.path(),
        "unknown.json",
        r#"{ "grid": { "dim": 1, "counts": [8], "half_extents": [1.0] }, "datum": { "kind": "bessel" } }"#,
    );
    for cfg in [&odd, &broken, &unknown] {
        assert_eq!(run_config("solve", dir.path(), cfg, &[]).status.code(), Some(1));
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(run_config("expand", dir.path(), &missing, &[]).status.code(), Some(1));
    assert_eq!(run_config("green", dir.path(), &odd, &["--index", "0"]).status.code(), Some(1));
}

#[test]
fn green_of_helmholtz_near_analytic_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{
          "grid": { "dim": 1, "counts": [1024], "half_extents": [20.0] },
          "operator": { "kind": "differential",
                        "terms": [{ "index": [0], "coeff": 1 }, { "index": [2], "coeff": -1 }] }
        }"#,
    );
    let out = run_config("green", dir.path(), &cfg, &["--index", "0", "-2.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("out/green.json"));
    assert_eq!(report["route"], "inverse");
    assert!(report["max_weak_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(report["indices"][1]["flat_index"], 448);

    let (_, rows) = read_csv(&dir.path().join("out/green_512.csv"));
    let dx = 40.0 / 1024.0;
    let mut away = 0.0_f64;
    for row in &rows {
        let x: f64 = row[0];
        let err = (row[1] - 0.5 * (-x.abs()).exp()).abs();
        if x == 0.0 {
            // the band-limited kink: truncated tail of Σ 1/(1+p²)
            assert!(err <= 1.05 * dx / (std::f64::consts::PI.powi(2)), "{err}");
        } else if x.abs() <= 10.0 {
            away = away.max(err);
        }
    }
    assert!(away <= 1e-3, "{away}");
}

#[test]
fn green_of_identity_is_delta_like() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{ "grid": { "dim": 1, "counts": [64], "half_extents": [4.0] }, "operator": { "kind": "identity" } }"#,
    );
    let out = run_config("green", dir.path(), &cfg, &["--index", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("out/green.json"));
    assert!(report["max_weak_residual"].as_f64().unwrap() <= 1e-8);
    let k = report["indices"][0]["flat_index"].as_u64().unwrap();
    let (_, rows) = read_csv(&dir.path().join(format!("out/green_{k}.csv")));
    for row in rows {
        let expected = if row[0] == 0.5 { 8.0 } else { 0.0 };
        assert!((row[1] - expected).abs() < 1e-10);
    }
}

#[test]
fn green_of_derivative_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &format!(r#"{{ "grid": {LINE_PI}, "operator": {DERIVATIVE} }}"#));
    let out = run_config("green", dir.path(), &cfg, &["--index", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let report = read_json(&dir.path().join("out/green.json"));
    assert_eq!(report["status"], "not_divisible");
    assert_eq!(report["failures"][0]["kind"], "not_invertible");
    assert_eq!(report["failures"][0]["worst_index"], serde_json::json!([0.0]));
}

#[test]
fn green_index_off_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &format!(r#"{{ "grid": {LINE_PI}, "operator": {{ "kind": "identity" }} }}"#));
    assert_eq!(run_config("green", dir.path(), &cfg, &["--index", "0.01"]).status.code(), Some(1));
    assert_eq!(run_config("green", dir.path(), &cfg, &["--index", "0,0"]).status.code(), Some(1));
}

#[test]
fn expand_with_unit_symbol_returns_datum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{ "grid": { "dim": 2, "counts": [16, 8], "half_extents": [4.0, 3.0] },
             "operator": { "kind": "diagonal", "family": "fourier", "symbol": { "kind": "constant", "value": 1 } },
             "datum": { "kind": "gaussian", "sigma": 0.8, "center": [0.5, -0.25] } }"#,
    );
    let out = run_config("expand", dir.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/expanded.csv"));
    assert_eq!(header, "x0,x1,re,im");
    assert_eq!(rows.len(), 128);
    // axis 0 varies slowest
    assert_eq!((rows[0][0], rows[1][0]), (-4.0, -4.0));
    for row in rows {
        let r2 = (row[0] - 0.5).powi(2) + (row[1] + 0.25).powi(2);
        assert!((row[2] - (-r2 / 1.28).exp()).abs() < 1e-10);
        assert!(row[3].abs() < 1e-10);
    }
    let (_, coords) = read_csv(&dir.path().join("out/coordinates.csv"));
    assert_eq!(coords.len(), 128);
}

#[test]
fn expand_in_dirac_family_multiplies_pointwise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{ "grid": { "dim": 1, "counts": [32], "half_extents": [2.0] },
             "operator": { "kind": "diagonal", "family": "dirac",
                           "symbol": { "kind": "polynomial",
                                       "terms": [{ "index": [0], "coeff": 1 }, { "index": [2], "coeff": [0, 1] }] } },
             "datum": { "kind": "cos", "k": 2 } }"#,
    );
    assert_eq!(run_config("expand", dir.path(), &cfg, &[]).status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("out/expanded.csv"));
    for row in rows {
        let u = (2.0 * row[0]).cos();
        assert!((row[1] - u).abs() < 1e-14);
        assert!((row[2] - row[0] * row[0] * u).abs() < 1e-14);
    }
}

#[test]
fn expand_of_zero_datum_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {DERIVATIVE}, "datum": {{ "kind": "zero" }} }}"#),
    );
    assert_eq!(run_config("expand", dir.path(), &cfg, &[]).status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("out/expanded.csv"));
    assert!(rows.iter().all(|r| r[1] == 0.0 && r[2] == 0.0));
}

#[test]
fn datum_from_file_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let sin = write_config(
        dir.path(),
        "sin.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {{ "kind": "identity" }}, "datum": {{ "kind": "sin", "k": 2 }} }}"#),
    );
    assert_eq!(run_config("solve", dir.path(), &sin, &[]).status.code(), Some(0));
    std::fs::rename(dir.path().join("out/solution.csv"), dir.path().join("datum.csv")).unwrap();
    let from_file = write_config(
        dir.path(),
        "file.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {{ "kind": "identity" }}, "datum": {{ "kind": "file", "path": "datum.csv" }} }}"#),
    );
    assert_eq!(run_config("solve", dir.path(), &from_file, &[]).status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("out/solution.csv"));
    for row in rows {
        assert!((row[1] - (2.0 * row[0]).sin()).abs() < 1e-12);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{ "grid": {LINE_PI}, "operator": {DERIVATIVE}, "datum": {{ "kind": "sin", "k": 3 }},
                      "policy": {{ "zero_threshold": 1e-10 }} }}"#),
    );
    let mut runs = Vec::new();
    for _ in 0..2 {
        assert_eq!(run_config("solve", dir.path(), &cfg, &[]).status.code(), Some(0));
        runs.push((
            std::fs::read(dir.path().join("out/solution.csv")).unwrap(),
            std::fs::read(dir.path().join("out/report.json")).unwrap(),
        ));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn output_dir_is_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(r#"{{ "grid": {LINE_PI}, "datum": {{ "kind": "zero" }}, "output": {{ "dir": "results" }} }}"#),
    );
    let out = schwartz(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("results/solution.csv").exists());
}

#[test]
fn verify_exit_codes() {
    let ok = schwartz(&["verify", "identity"]);
    assert_eq!(ok.status.code(), Some(0));
    let table = String::from_utf8(ok.stdout).unwrap();
    assert!(table.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert_eq!(schwartz(&["verify", "nope"]).status.code(), Some(1));

    let bad_seed = Command::new(env!("CARGO_BIN_EXE_schwartz"))
        .args(["verify", "identity"])
        .env("SCHWARTZ_SEED", "forty-two")
        .output()
        .unwrap();
    assert_eq!(bad_seed.status.code(), Some(1));
}

#[test]
fn verify_json_records_the_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_schwartz"))
        .args(["verify", "solver", "--json"])
        .env("SCHWARTZ_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 7);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}
