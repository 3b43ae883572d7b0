use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn chuilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chuilab")).args(args).output().expect("binary runs")
}

fn json_without_clock(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    v.as_object_mut().unwrap().remove("wall_clock").expect("wall_clock present");
    v
}

fn csv_body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn energy_report_has_metadata() {
    let out = chuilab(&["energy", "--uniform", "2", "--seed", "7"]);
    assert!(out.status.success());
    let v = json_without_clock(&out);
    assert_eq!(v["tool"], "chuilab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["spec"]["rel_tolerance"], 1e-3);
    let e = v["result"]["energy"]["value"].as_f64().unwrap();
    assert!((e - 5.128919969).abs() < 0.02, "{e}");
    assert_eq!(v["result"]["energy"]["converged"], true);
}

#[test]
fn reruns_differ_only_in_wall_clock() {
    let args = ["bounds", "--weights", "1,2,4", "--seed", "3"];
    let a = chuilab(&args);
    let b = chuilab(&args);
    assert_eq!(json_without_clock(&a), json_without_clock(&b));
    let strip = |o: &Output| {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .lines()
            .filter(|l| !l.contains("unix_seconds") && !l.contains("elapsed_seconds"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn execution_modes_agree() {
    let a = chuilab(&["energy", "--uniform", "3", "--dim", "3", "--sequential"]);
    let b = chuilab(&["energy", "--uniform", "3", "--dim", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(json_without_clock(&a), json_without_clock(&b));
}

#[test]
fn config_file_and_out_path() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"dimension": 2, "charges": [{"position": [1.0, 0.0], "weight": 1.0}]}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let out = chuilab(&["energy", "--config", config.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let e = v["result"]["energy"]["value"].as_f64().unwrap();
    assert!((e - 4.0).abs() < 4e-3, "{e}");
}

#[test]
fn defect_sweep_csv_columns() {
    let out = chuilab(&["defect-sweep", "--jmax", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# tool=chuilab version="));
    assert!(text.contains("# seed=1\n"));
    assert!(text.contains("# spec={"));
    let body = csv_body(&text);
    assert_eq!(body[0], "l,defect,defect_over_l,err");
    assert_eq!(body.len(), 5);
    for (j, row) in body[1..].iter().enumerate() {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let l = 2.0 * std::f64::consts::PI * 0.5f64.powi(j as i32);
        assert_eq!(cells[0], l, "17 significant digits round-trip");
        assert!((cells[2] - cells[1] / l).abs() < 1e-15);
    }
    // Full circle: one pole over the whole disk.
    let first: Vec<f64> = body[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((first[1] - 4.0).abs() < 1e-2);
}

#[test]
fn two_pole_sweep_rows() {
    let out = chuilab(&["prop14-sweep", "--jmax", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "delta,value,ratio,err");
    assert_eq!(body.len(), 5);
    for row in &body[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let d = cells[0];
        assert!((cells[2] - cells[1] / (d + d * (1.0 / d).ln())).abs() < 1e-12);
        assert!(cells[2] > 1.0 && cells[2] < 10.0);
    }
}

#[test]
fn lemma_suite_passes() {
    let out = chuilab(&["lemma-suite", "--trials", "2000", "--dims", "2"]);
    assert!(out.status.success());
    let v = json_without_clock(&out);
    let suites = v["result"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 4);
    assert!(suites.iter().all(|s| s["failures"] == 0 && s["trials"] == 2000));
}

#[test]
fn optimize_writes_trace() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let out = chuilab(&["optimize", "--weights", "1,1", "--budget", "150", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_without_clock(&out);
    let best = v["result"]["best"]["energy"].as_f64().unwrap();
    assert!((best - 5.1289).abs() < 0.05, "{best}");
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() >= 2);
    for line in lines.lines() {
        let it: Value = serde_json::from_str(line).unwrap();
        assert!(it["energy"].as_f64().unwrap() >= best - 1e-12);
    }
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["energy"][..],
        &["energy", "--uniform", "2", "--weights", "1,2"],
        &["energy", "--weights", "1,x"],
        &["energy", "--weights", "1,-2"],
        &["energy", "--uniform", "3", "--dim", "5"],
        &["energy", "--config", "/nonexistent/config.json"],
        &["energy", "--uniform", "2", "--rel-tol", "0"],
        &["frobnicate"],
    ] {
        let out = chuilab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"dimension": 2, "charges": [{"position": [2.0, 0.0], "weight": 1.0}]}"#).unwrap();
    let out = chuilab(&["energy", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn starved_budget_exits_3() {
    let out = chuilab(&["energy", "--uniform", "3", "--max-evals", "1000", "--rel-tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_without_clock(&out);
    assert_eq!(v["result"]["energy"]["converged"], false);
}
