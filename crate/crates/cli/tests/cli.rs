use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lpfnt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpfnt"))
        .args(args)
        .env_remove("LPFNT_THREADS")
        .output()
        .expect("spawn lpfnt")
}

fn ok(args: &[&str]) -> String {
    let out = lpfnt(args);
    assert!(
        out.status.success(),
        "lpfnt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Runs a failing command and returns its single stderr line.
fn fails(args: &[&str]) -> String {
    let out = lpfnt(args);
    assert!(!out.status.success(), "lpfnt {args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "multi-line error: {err}");
    assert!(err.starts_with("error: "), "{err}");
    err
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in {report}"))
}

fn read_column(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.parse().unwrap())
        .collect()
}

fn read_coefficients(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

/// Writes samples of `f` on the grid of `A_{m,n,p}` and returns their path.
fn samples(dir: &TempDir, m: &str, n: &str, p: &str, f: impl Fn(&[f64]) -> f64) -> std::path::PathBuf {
    let grid = ok(&["grid", "--m", m, "--n", n, "--p", p]);
    let mut text = String::from("value\n");
    for line in grid.lines().skip(1) {
        let x: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        text.push_str(&format!("{}\n", f(&x)));
    }
    let path = dir.path().join(format!("samples_{m}_{n}_{p}.csv"));
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn indexset_reports() {
    let r = ok(&["indexset", "--m", "3", "--n", "2", "--p", "1"]);
    assert_eq!(field(&r, "cardinality"), "10");
    assert_eq!(field(&r, "entropy"), "6 3 1");

    let r = ok(&["indexset", "--m", "2", "--n", "2", "--p", "inf"]);
    assert_eq!(field(&r, "cardinality"), "9");
    assert_eq!(field(&r, "density"), "1");

    let r = ok(&["indexset", "--m", "5", "--n", "8", "--p", "2"]);
    assert_eq!(field(&r, "cardinality"), "9389");

    let json: Value = serde_json::from_str(&ok(&["indexset", "--m", "3", "--n", "2", "--p", "1", "--format", "json", "--dump"])).unwrap();
    assert_eq!(json["indices"].as_array().unwrap().len(), 10);
    assert_eq!(json["indices"][1], serde_json::json!([1, 0, 0]));
}

#[test]
fn indexset_files() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("a.txt");
    let tubes = dir.path().join("t.csv");
    ok(&[
        "indexset",
        "--m",
        "3",
        "--n",
        "2",
        "--p",
        "1",
        "--out",
        set.to_str().unwrap(),
        "--tubes-out",
        tubes.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&set).unwrap();
    assert!(text.starts_with("3 2 1\n0 0 0\n1 0 0\n"));
    assert_eq!(text.lines().count(), 11);
    let tubes = fs::read_to_string(&tubes).unwrap();
    assert_eq!(tubes, "T1,3,2,1,2,1,1\nT2,3,2,1\nT3,3\nentropy,6,3,1\n");
}

#[test]
fn transform_round_trip_csv_and_binary() {
    let dir = TempDir::new().unwrap();
    let f = |x: &[f64]| (x[0] + 0.5 * x[1]).exp() * (1.0 + x[2] * x[2]).recip();
    let input = samples(&dir, "3", "6", "2", f);
    let coeffs = dir.path().join("c.csv");
    let back = dir.path().join("back.csv");
    let summary = ok(&[
        "transform",
        input.to_str().unwrap(),
        "--m",
        "3",
        "--n",
        "6",
        "--p",
        "2",
        "--out",
        coeffs.to_str().unwrap(),
    ]);
    assert!(summary.starts_with("coefficients "), "{summary}");
    ok(&["transform", coeffs.to_str().unwrap(), "--inverse", "--out", back.to_str().unwrap()]);
    let (a, b) = (read_column(&input), read_column(&back));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-11 * x.abs().max(1.0), "{x} vs {y}");
    }

    let bin = dir.path().join("c.fnt1");
    ok(&[
        "transform",
        input.to_str().unwrap(),
        "--m",
        "3",
        "--n",
        "6",
        "--p",
        "2",
        "--format",
        "binary",
        "--out",
        bin.to_str().unwrap(),
    ]);
    let bytes = fs::read(&bin).unwrap();
    assert_eq!(&bytes[..4], b"FNT1");
    let csv_coeffs = read_coefficients(&coeffs);
    assert_eq!(bytes.len(), 28 + 8 * csv_coeffs.len());
    for (chunk, c) in bytes[28..].chunks(8).zip(&csv_coeffs) {
        assert_eq!(f64::from_le_bytes(chunk.try_into().unwrap()), *c);
    }
    let back_bin = dir.path().join("back_bin.csv");
    ok(&["transform", bin.to_str().unwrap(), "--inverse", "--out", back_bin.to_str().unwrap()]);
    assert_eq!(read_column(&back_bin), b);
}

#[test]
fn constant_samples_give_delta_coefficients() {
    let dir = TempDir::new().unwrap();
    let input = samples(&dir, "4", "3", "1", |_| 2.5);
    let out = ok(&["transform", input.to_str().unwrap(), "--m", "4", "--n", "3", "--p", "1"]);
    let coeffs: Vec<f64> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(coeffs.len(), 35);
    assert!((coeffs[0] - 2.5).abs() < 1e-14);
    assert!(coeffs[1..].iter().all(|c| c.abs() < 1e-12), "{coeffs:?}");
}

#[test]
fn naive_flag_matches_fast_transform() {
    let dir = TempDir::new().unwrap();
    let input = samples(&dir, "3", "5", "inf", |x| (x[0] * x[1] - x[2]).sin());
    let args = ["transform", input.to_str().unwrap(), "--m", "3", "--n", "5", "--p", "inf"];
    let fast = ok(&args);
    let mut naive_args = args.to_vec();
    naive_args.push("--naive");
    let naive = ok(&naive_args);
    let parse = |s: &str| -> Vec<f64> { s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect() };
    let (a, b) = (parse(&fast), parse(&naive));
    let scale = b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-10 * scale);
    }
}

#[test]
fn approximate_exactness_trend_and_determinism() {
    let r = ok(&["approximate", "--model", "poly", "--m", "3", "--n", "2", "--p", "1", "--format", "json"]);
    let json: Value = serde_json::from_str(&r).unwrap();
    assert!(json[0]["rmse"].as_f64().unwrap() <= 1e-10, "{r}");

    let sweep = ok(&["approximate", "--model", "otl", "--sweep", "4:8", "--p", "2", "--seed", "3"]);
    let rmse: Vec<f64> = sweep.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(rmse.len(), 5);
    assert!(rmse[4] < rmse[0], "{sweep}");
    assert_eq!(sweep, ok(&["approximate", "--model", "otl", "--sweep", "4:8", "--p", "2", "--seed", "3"]));

    let all = ok(&["approximate", "--model", "poly", "--m", "2", "--sweep", "1:2"]);
    assert_eq!(all.lines().count(), 7);
    assert!(all.lines().any(|l| l.contains(",inf,")));
}

#[test]
fn activity_otl_pipeline() {
    let r = ok(&["activity", "--model", "otl", "--n", "10", "--p", "2", "--k", "all"]);
    let json: Value = serde_json::from_str(&r).unwrap();
    assert_eq!(json["cardinality"], 145138);
    assert_eq!(json["p"], 2.0);
    let theta1 = json["theta"][0].as_f64().unwrap();
    assert!((theta1 / 2.46 - 1.0).abs() < 5e-3, "{theta1}");
    assert_eq!(json["ranking"], serde_json::json!([1, 2, 3, 4, 6, 5]));
}

#[test]
fn activity_piston_ranking() {
    let r = ok(&["activity", "--model", "piston", "--n", "10", "--k", "all"]);
    let json: Value = serde_json::from_str(&r).unwrap();
    assert_eq!(json["cardinality"], 766518);
    assert_eq!(json["ranking"], serde_json::json!([2, 3, 4, 1, 5, 7, 6]));
}

#[test]
fn activity_threads_and_mc_are_deterministic() {
    let args = ["activity", "--model", "otl", "--n", "4", "--mc", "500,3", "--seed", "9"];
    let one = ok(&[&args[..], &["--threads", "1"]].concat());
    let four = ok(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let json: Value = serde_json::from_str(&one).unwrap();
    assert_eq!(json["mc"]["N"], 500);
    assert_eq!(json["mc"]["mean"].as_array().unwrap().len(), 6);
    let via_env = Command::new(env!("CARGO_BIN_EXE_lpfnt"))
        .args(args)
        .env("LPFNT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(via_env.stdout).unwrap(), one);
}

#[test]
fn eval_models_and_coefficients() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("p.csv");
    fs::write(&pts, "x1,x2,x3,x4,x5,x6\n100,25,3,1.85,0.725,175\n").unwrap();
    let out = ok(&["eval", pts.to_str().unwrap(), "--model", "otl"]);
    let v: f64 = out.lines().nth(1).unwrap().parse().unwrap();
    assert!(v > 4.0 && v < 7.0, "{v}");

    let input = samples(&dir, "2", "4", "1", |x| x[0] * x[0] - x[1]);
    let coeffs = dir.path().join("c.csv");
    ok(&["transform", input.to_str().unwrap(), "--m", "2", "--n", "4", "--p", "1", "--out", coeffs.to_str().unwrap()]);
    let ref_pts = dir.path().join("r.csv");
    fs::write(&ref_pts, "0.3,-0.2\n-1,1\n").unwrap();
    let out = ok(&["eval", ref_pts.to_str().unwrap(), "--coeffs", coeffs.to_str().unwrap()]);
    let vals: Vec<f64> = out.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert!((vals[0] - 0.29).abs() < 1e-12 && vals[1].abs() < 1e-12, "{vals:?}");
}

#[test]
fn config_files() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "indexset", "m": 6, "n": 10, "p": 2}"#).unwrap();
    assert_eq!(field(&ok(&["--config", cfg.to_str().unwrap()]), "cardinality"), "145138");
    fs::write(&cfg, r#"{"command": "indexset", "m": 6, "n": 10, "p": 2, "typo": 1}"#).unwrap();
    assert!(fails(&["--config", cfg.to_str().unwrap()]).contains("unknown field"));
}

#[test]
fn errors_are_single_lines() {
    assert!(fails(&["indexset", "--m", "3"]).contains("--n"));
    assert!(fails(&["indexset", "--m", "3", "--n", "2", "--p", "-1"]).contains("p must lie"));
    assert!(fails(&["activity", "--model", "nope", "--n", "3"]).contains("unknown model"));
    assert!(fails(&["activity", "--model", "otl", "--n", "3", "--k", "most"]).contains("k strategy"));
    assert!(fails(&["transform", "/nonexistent.csv", "--m", "2", "--n", "2", "--p", "1"]).contains("nonexistent"));
    assert!(fails(&["frobnicate"]).contains("usage"));
    assert!(fails(&[]).contains("subcommand"));
    let out = lpfnt(&["indexset", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
