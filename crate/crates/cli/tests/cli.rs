// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use std::fs;
use std::path::Path;

use common::{bin, dataset, run};

const SMALL: [&str; 10] = [
    "--horizon", "7", "--origins", "2", "--folds", "3", "--repeats", "1", "--learners", "decision_tree,svm",
];

fn args<'a>(cmd: &'a str, data: &'a str, out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd, "--data", data, "--out", out];
    v.extend_from_slice(&SMALL);
    v.extend_from_slice(extra);
    v
}

fn error_json(stderr: &[u8]) -> serde_json::Value {
    let text = String::from_utf8_lossy(stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn evaluate_is_idempotent_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 6, 60, 1);
    let out = dir.path().join("out");
    let a = args("evaluate", data.to_str().unwrap(), out.to_str().unwrap(), &[]);
    assert!(run(&a).status.success());
    let first = read(&out.join("records.csv"));
    assert_eq!(first.lines().count() - 1, 6 * 12 * 2);
    assert_eq!(fs::read_dir(out.join(".cache")).unwrap().count(), 1);
    assert!(run(&a).status.success());
    assert_eq!(first, read(&out.join("records.csv")));

    let ranking = read(&out.join("ranking_smape.csv"));
    let errs: Vec<f64> = ranking
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 12);
    assert!(errs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn features_one_row_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 5, 60, 2);
    let out = dir.path().join("out");
    let a = args("features", data.to_str().unwrap(), out.to_str().unwrap(), &[]);
    assert!(run(&a).status.success());
    let csv = read(&out.join("features.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0].split(',').count(), 25);
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("constant_columns.json"))).unwrap();
    assert!(report["constant_columns"].as_array().unwrap().iter().any(|c| c == "frequency"));
    assert!(run(&a).status.success());
    assert_eq!(csv, read(&out.join("features.csv")));
}

#[test]
fn run_writes_tables_and_seed_only_moves_learners() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 16, 80, 3);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = run(&args("run", data.to_str().unwrap(), a.to_str().unwrap(), &[]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for t in [
        "table2_rankings", "table3_top4", "table4_top6", "table5_top6_snaive", "table6_basic",
        "table7_labels", "table8_outperformance_smape", "table9_outperformance_mase", "table10_patterns",
    ] {
        assert!(a.join(format!("{t}.csv")).exists(), "{t}");
    }
    assert!(a.join("report.json").exists());
    assert!(a.join("confusion").is_dir());

    let out = run(&args("run", data.to_str().unwrap(), b.to_str().unwrap(), &["--cv-seed", "99"]));
    assert!(out.status.success());
    let rows = |p: &Path, kind: &str| -> Vec<String> {
        read(p).lines().filter(|l| l.split(',').nth(1) == Some(kind)).map(String::from).collect()
    };
    for t in ["table3_top4.csv", "table6_basic.csv"] {
        assert_eq!(rows(&a.join(t), "individual"), rows(&b.join(t), "individual"));
        assert_eq!(rows(&a.join(t), "boundary"), rows(&b.join(t), "boundary"));
    }

    // tables regenerate byte for byte from the report
    let before = read(&a.join("table3_top4.csv"));
    fs::remove_file(a.join("table3_top4.csv")).unwrap();
    let r = run(&["report", "--out", a.to_str().unwrap()]);
    assert!(r.status.success());
    assert_eq!(before, read(&a.join("table3_top4.csv")));
}

#[test]
fn basic_pool_emits_only_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 12, 70, 4);
    let out = dir.path().join("out");
    let r = run(&args("run", data.to_str().unwrap(), out.to_str().unwrap(), &["--pools", "basic"]));
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let tables: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().to_string())
        .filter(|n| n.starts_with("table"))
        .collect();
    assert_eq!(tables, vec!["table6_basic.csv".to_string()]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 4, 50, 5);
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "data = {:?}\nhorizon = 7\norigins = 1\nout = {:?}\n",
            data.to_str().unwrap(),
            dir.path().join("from_file").to_str().unwrap()
        ),
    )
    .unwrap();
    let flag_out = dir.path().join("from_flag");
    let r = run(&["evaluate", "--config", cfg.to_str().unwrap(), "--out", flag_out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(flag_out.join("records.csv").exists());
    assert!(!dir.path().join("from_file").exists());
}

#[test]
fn env_var_sets_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 3, 50, 6);
    let target = dir.path().join("env_out");
    let r = bin()
        .args(["features", "--data", data.to_str().unwrap()])
        .env("TSMETA_OUT", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(r.status.success());
    assert!(target.join("features.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();

    let r = run(&["run", "--test-ratio", "1.5", "--data", "x.csv", "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));
    assert_eq!(error_json(&r.stderr)["error"]["kind"], "config");

    let r = run(&["run", "--pools", "top9", "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));

    let r = run(&["evaluate", "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));

    let missing = dir.path().join("missing.csv");
    let r = run(&["evaluate", "--data", missing.to_str().unwrap(), "--out", out_s]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(error_json(&r.stderr)["error"]["kind"], "data");

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "series_id,t,value\na,1,1.0\na,2,oops\n").unwrap();
    let r = run(&["evaluate", "--data", bad.to_str().unwrap(), "--out", out_s]);
    assert_eq!(r.status.code(), Some(2));
    let msg = error_json(&r.stderr)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("bad.csv") && msg.contains("line 3"), "{msg}");

    // two series are too few for the meta-learning phase
    let tiny = dataset(dir.path(), 2, 60, 9);
    let r = run(&args("run", tiny.to_str().unwrap(), out_s, &[]));
    assert_eq!(r.status.code(), Some(3));
    assert_eq!(error_json(&r.stderr)["error"]["kind"], "internal");
}
