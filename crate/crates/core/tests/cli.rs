use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn kahler_qm(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kahler-qm"));
    cmd.args(args);
    for (key, _) in std::env::vars() {
        if key.starts_with("KAHLER_QM_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON report")
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["verify", "--cases", "many"],
        vec!["verify", "--suite", "nope"],
        vec!["verify", "--dim", "4"],
        vec!["verify", "--cutoff", "1"],
        vec!["verify", "--tolerance", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let (code, _, err) = run(&mut kahler_qm(&args));
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_and_version_exit_cleanly() {
    let (code, out, _) = run(&mut kahler_qm(&["--help"]));
    assert_eq!(code, 0);
    for cmd in ["verify", "flow", "reconstruct", "pullback", "geometry"] {
        assert!(out.contains(cmd));
    }
    let (code, out, _) = run(&mut kahler_qm(&["--version"]));
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn verify_reports_are_reproducible() {
    let args = ["verify", "--suite", "nc-calculus", "--cases", "4", "--seed", "7"];
    let (code, first, _) = run(&mut kahler_qm(&args));
    let (_, second, _) = run(&mut kahler_qm(&args));
    assert_eq!(code, 0);
    assert_eq!(first, second);
    let report = json(&first);
    assert_eq!(report["suite"], "nc-calculus");
    assert_eq!(report["config"]["seed"], 7);
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        assert_eq!(e["status"], "PASS");
        assert!(e["residual"].as_f64().unwrap() <= e["threshold"].as_f64().unwrap());
    }
}

#[test]
fn negative_controls_show_the_expected_failures() {
    let (code, out, _) = run(&mut kahler_qm(&["verify", "--suite", "negative-controls"]));
    assert_eq!(code, 0);
    let report = json(&out);
    for e in report["entries"].as_array().unwrap() {
        assert_ne!(e["status"], "FAIL", "{}", e["name"]);
    }
}

#[test]
fn failing_checks_exit_with_one() {
    // Rounded arithmetic cannot meet this tolerance.
    let (code, out, err) = run(&mut kahler_qm(&["verify", "--suite", "pullback", "--tolerance", "1e-30", "--cases", "2"]));
    assert_eq!(code, 1);
    assert!(json(&out)["entries"].as_array().unwrap().iter().any(|e| e["status"] == "FAIL"));
    assert!(!err.is_empty());
}

#[test]
fn flags_override_environment_which_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("kahler.toml");
    fs::write(&config, "[space]\ncutoff = 3\nseed = 11\nhbar = 0.5\n[verify]\ncases = 2\nsuite = \"geometry\"\n").unwrap();
    let path = config.to_str().unwrap();

    let (_, out, _) = run(&mut kahler_qm(&["verify", "--config", path]));
    let r = json(&out);
    assert_eq!((r["config"]["cutoff"].as_u64(), r["config"]["seed"].as_u64()), (Some(3), Some(11)));
    assert_eq!(r["config"]["hbar"], 0.5);
    assert_eq!(r["suite"], "geometry");

    let (_, out, _) = run(kahler_qm(&["verify", "--config", path]).env("KAHLER_QM_CUTOFF", "4"));
    assert_eq!(json(&out)["config"]["cutoff"], 4);

    let (_, out, _) = run(kahler_qm(&["verify", "--config", path, "--cutoff", "5"]).env("KAHLER_QM_CUTOFF", "4"));
    let r = json(&out);
    assert_eq!(r["config"]["cutoff"], 5);
    assert_eq!(r["config"]["seed"], 11);

    let (_, out, _) = run(kahler_qm(&["verify"]).env("KAHLER_QM_CONFIG", path).env("KAHLER_QM_SUITE", "nc-calculus"));
    assert_eq!(json(&out)["suite"], "nc-calculus");
}

#[test]
fn malformed_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "[space]\nmodes = 2\n").unwrap();
    let (code, _, err) = run(&mut kahler_qm(&["verify", "--config", config.to_str().unwrap()]));
    assert_eq!(code, 2);
    assert!(err.contains("bad.toml"));
    let (code, _, _) = run(&mut kahler_qm(&["verify", "--config", "/nonexistent/kahler.toml"]));
    assert_eq!(code, 2);
}

#[test]
fn flow_writes_a_trajectory_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let (code, _, _) = run(&mut kahler_qm(&[
        "flow", "--cutoff", "2", "--t-end", "0.5", "--step", "0.05", "--integrator", "split-exact", "--output", "csv",
        "--out-dir", out_dir.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let files: Vec<_> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    let csv_file = files.iter().find(|p| p.extension().is_some_and(|e| e == "csv")).expect("a CSV file");
    let mut reader = csv::Reader::from_path(csv_file).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 3 + 2 * 3);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11);
    let n0: f64 = rows[0][1].parse().unwrap();
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        assert!((0.0..=0.5 + 1e-12).contains(&t));
        assert!((row[1].parse::<f64>().unwrap() - n0).abs() < 1e-10);
    }
}

#[test]
fn demo_reports_pass() {
    for cmd in ["reconstruct", "pullback", "geometry"] {
        let (code, out, _) = run(&mut kahler_qm(&[cmd, "--cutoff", "3"]));
        assert_eq!(code, 0, "{cmd}");
        let report = json(&out);
        assert_eq!(report["config"]["cutoff"], 3);
        assert!(report["entries"].as_array().is_some_and(|e| !e.is_empty()));
    }
}
