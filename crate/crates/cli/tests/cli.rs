use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lambda_mb_cli::{parse_config, scenarios};

fn lambda_mb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-mb")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|d| d.ok())
        .map(|d| d.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn list_prints_every_canned_scenario() {
    let out = lambda_mb(&["list"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let listed: Vec<_> = stdout.lines().collect();
    assert_eq!(listed, scenarios::names().collect::<Vec<_>>());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&lambda_mb(&[])), 2);
    assert_eq!(code(&lambda_mb(&["--scenario", "fig9"])), 2);
    assert_eq!(code(&lambda_mb(&["--scenario", "slow", "--engine", "spectral"])), 2);
    assert_eq!(code(&lambda_mb(&["run", "/nonexistent/config.txt"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "scenario = slow\nomega0 = -1\n").unwrap();
    let out = lambda_mb(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("ParseError at line 2, column 10"), "{stderr}");

    let both = lambda_mb(&["run", cfg.to_str().unwrap(), "--scenario", "slow"]);
    assert_eq!(code(&both), 2);
}

#[test]
fn check_mode_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = lambda_mb(&["--scenario", "slow", "--check", "--quiet", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(!out_dir.exists());
}

#[test]
fn failing_tolerance_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.txt");
    // the numeric engine cannot reach 1e-14 on this grid
    fs::write(&cfg, "scenario = slow\nengine = numeric\ntol_numeric = 1e-14\n").unwrap();
    let out = lambda_mb(&["run", cfg.to_str().unwrap(), "--check", "--quiet"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn run_writes_artifacts_and_manifest_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out = lambda_mb(&["--scenario", "fast", "--engine", "all", "--quiet", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_files(dir.path()), ["analytic.csv", "dressing.csv", "numeric.csv"]);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("result: pass"), "{report}");

    // the manifest is itself a config that reproduces the run
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    let cfg = parse_config(&manifest).unwrap();
    let again = tempfile::tempdir().unwrap();
    let out = lambda_mb(&["run", dir.path().join("manifest.txt").to_str().unwrap(), "--quiet", "--out", again.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(cfg.engine.name(), "all");
    for name in csv_files(dir.path()) {
        assert_eq!(fs::read(dir.path().join(&name)).unwrap(), fs::read(again.path().join(&name)).unwrap(), "{name}");
    }
}
