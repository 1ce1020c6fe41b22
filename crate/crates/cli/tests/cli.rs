use std::path::Path;
use std::process::{Command, Output};

use biquat::kernels::{fundamental_solution, Sign, SpacePoint};
use biquat::Complex64;

fn biquat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biquat")).args(args).output().expect("run biquat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV data lines with the metadata comments removed.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn green_values(text: &str) -> Vec<f64> {
    let lines = data_lines(text);
    assert_eq!(lines[0], "s_re,s_im,v1_re,v1_im,v2_re,v2_im,v3_re,v3_im");
    lines[1].split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn algebra_check_passes() {
    let o = biquat(&["check", "--suite", "algebra"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "suite,check,measured,lower,upper,pass");
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn unknown_suite_is_config_error() {
    let o = biquat(&["check", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flag_is_config_error() {
    assert_eq!(biquat(&["scatter", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(biquat(&["scatter", "--threads", "0"]).status.code(), Some(2));
    assert_eq!(biquat(&["green-eval", "--x", "1,2"]).status.code(), Some(2));
}

#[test]
fn missing_semi_axis_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scatter": {"ellipsoid": {"a": 5, "b": 3}}}"#);
    let o = biquat(&["scatter", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scatter.ellipsoid") && err.contains('c'), "{err}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scater": {}}"#);
    assert_eq!(biquat(&["check", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(biquat(&["check", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn green_eval_vanishes_before_source() {
    let o = biquat(&["green-eval", "--t", "-1", "--x", "0.3,0.2,0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(green_values(&stdout(&o)).iter().all(|v| *v == 0.0));
}

#[test]
fn green_eval_at_time_zero_is_fundamental_solution() {
    let o = biquat(&["green-eval", "--t", "0", "--x", "1,0,0", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let digits = data_lines(&text)[1].split(',').next().unwrap().split('e').next().unwrap().trim_start_matches('-').len();
    assert_eq!(digits, 16, "15 significant digits plus the point");
    let got = green_values(&text);
    let k = fundamental_solution(Complex64::new(1.0, 0.0), Sign::Plus, SpacePoint::new(1.0, 0.0, 0.0)).unwrap();
    let want: Vec<f64> = k.components().iter().flat_map(|c| [c.re, c.im]).collect();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-13, "{got:?} vs {want:?}");
    }
}

#[test]
fn green_eval_sweep_is_second_order() {
    let o = biquat(&["green-eval", "--sweep", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows[1..] {
        let ratio = r["ratio"].as_f64().unwrap();
        assert!((3.2..=4.8).contains(&ratio), "{ratio}");
    }
}

#[test]
fn scatter_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let o = biquat(&["scatter", "--n-list", "10", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["metadata"]["command"], "scatter");
    assert_eq!(v["metadata"]["seed"], 20240917);
    let row = &v["rows"][0];
    assert_eq!(row["N"], 10);
    assert!(row["errE"].as_f64().unwrap() < 1e-3);
    assert!(row["errH"].as_f64().unwrap() < 1e-3);
}

#[test]
fn config_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 7, "format": "json", "scatter": {"n_list": [15]}}"#);
    let o = biquat(&["scatter", "--config", &cfg, "--n-list", "10", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("seed=7"));
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("10,"));
}

/// Rows without the trailing `wall_ms` column.
fn scatter_digits(threads: &str) -> Vec<String> {
    let o = biquat(&["scatter", "--n-list", "10,20", "--threads", threads]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut out: Vec<String> = text.lines().filter(|l| !l.starts_with("# timestamp")).map(str::to_owned).collect();
    for l in out.iter_mut().filter(|l| !l.starts_with('#')) {
        l.truncate(l.rfind(',').unwrap());
    }
    out
}

#[test]
fn scatter_is_deterministic_across_runs_and_threads() {
    let one = scatter_digits("1");
    assert_eq!(one, scatter_digits("1"));
    assert_eq!(one, scatter_digits("4"));
}

#[test]
fn selftest_problem_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scatter": {"problem": "chiral_selftest", "beta": 0.1, "n_list": [10]}}"#);
    let o = biquat(&["scatter", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = write_config(dir.path(), r#"{"scatter": {"problem": "dipole", "beta": 0.1}}"#);
    assert_eq!(biquat(&["scatter", "--config", &bad]).status.code(), Some(2));
}
