//! End-to-end tests of the `oscnet` binary: exit codes, CSV schemas,
//! reproducibility, and the config file path.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn oscnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscnet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn help_exits_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--help"],
        vec!["eigen", "--help"],
        vec!["simulate", "--help"],
        vec!["msf", "--help"],
        vec!["floquet", "--help"],
        vec!["experiment", "--help"],
    ] {
        let out = oscnet(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {out:?}");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("Usage"), "{args:?} help: {text}");
    }
}

#[test]
fn every_documented_flag_appears_in_help() {
    let dir = tempfile::tempdir().unwrap();
    let expect: &[(&str, &[&str])] = &[
        ("eigen", &["--preset", "--config", "--out", "--svg", "--seed"]),
        ("simulate", &["--preset", "--mu", "--dt", "--t-end"]),
        ("msf", &["--mu", "--lambda", "--kappa", "--dt"]),
        ("floquet", &["--mu", "--gamma", "--kappa", "--lambda", "--dt"]),
        ("experiment", &["--kappa-on", "--t-switch", "--t-end", "--threshold"]),
    ];
    for (sub, flags) in expect {
        let out = oscnet(&[sub, "--help"], dir.path());
        let text = String::from_utf8_lossy(&out.stdout);
        for flag in *flags {
            assert!(text.contains(flag), "{sub} help is missing {flag}: {text}");
        }
    }
}

#[test]
fn eigen_preset_reports_reference_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(&["eigen", "--preset", "paper-network"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let expected = [0.0, 0.3, 2.0, 2.0, 2.0, 2.8, 4.0, 4.9];
    for (i, want) in expected.iter().enumerate() {
        let key = format!("lambda_{}", i + 1);
        let line = text
            .lines()
            .find(|l| l.starts_with(&key))
            .unwrap_or_else(|| panic!("missing {key} in:\n{text}"));
        let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!((value - want).abs() < 0.05, "{key} = {value}, want {want}");
    }
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("index,eigenvalue\n"));
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn usage_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(&["eigen", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = oscnet(&["msf", "--kappa", "backwards"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn bad_config_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    fs::write(&path, "[model]\nmu = -1\n").unwrap();
    let out = oscnet(&["eigen", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mu must be > 0"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn numerical_blowup_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // dt = 1 makes RK4 on the Van der Pol field diverge quickly
    let out = oscnet(
        &["simulate", "--preset", "paper-network", "--dt", "1", "--t-end", "50"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("non-finite"), "{err}");
}

#[test]
fn experiment_runs_and_reports_sync_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(
        &[
            "experiment",
            "--preset",
            "paper-network",
            "--kappa-on",
            "1.0",
            "--t-switch",
            "15",
            "--t-end",
            "60",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.starts_with("sync_time")).unwrap();
    let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!(value > 15.0 && value < 60.0, "sync_time {value}");
    let csv = fs::read_to_string(dir.path().join("sync.csv")).unwrap();
    assert!(csv.starts_with("t,error\n"));
}

#[test]
fn csv_output_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "experiment",
        "--kappa-on",
        "0.5",
        "--t-end",
        "20",
        "--t-switch",
        "5",
        "--seed",
        "7",
    ];
    let out = oscnet(&args, dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let first = fs::read(dir.path().join("sync.csv")).unwrap();
    oscnet(&args, dir.path());
    let second = fs::read(dir.path().join("sync.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn svg_plot_is_emitted() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(
        &["msf", "--mu", "1", "--lambda", "4.9", "--kappa", "0:0.5:0.25", "--svg", "msf.svg"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let svg = fs::read_to_string(dir.path().join("msf.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polyline"));
    let csv = fs::read_to_string(dir.path().join("msf.csv")).unwrap();
    assert!(csv.starts_with("kappa,alpha,max_multiplier,max_exponent\n"));
    // header column count matches every row
    let cols = csv.lines().next().unwrap().split(',').count();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').count(), cols);
    }
}

#[test]
fn config_file_drives_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let config = "\
[graph]
preset = paper-network

[model]
mu = 1

[coupling]
kappa = 0@0, 0.5@5

[integrator]
dt = 0.001
t_end = 10
record_stride = 100

[experiment]
seed = 3

[outputs]
trajectory = run.csv
";
    let path = dir.path().join("scenario.ini");
    fs::write(&path, config).unwrap();
    let out = oscnet(&["simulate", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 17); // t plus 8 nodes x 2 components
    assert!(header.starts_with("t,x1_1,x1_2,"));
    assert_eq!(csv.lines().count(), 102); // header + t=0 + 100 strided records
}

#[test]
fn floquet_verdict_reports_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(&["floquet", "--mu", "1", "--verdict-kappa", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let verdict = text.lines().find(|l| l.starts_with("verdict_stable")).unwrap();
    assert!(verdict.ends_with("true"), "{verdict}");
    assert!(text.contains("worst_mode_lambda"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("mode_")).count(), 7, "{text}");
}

#[test]
fn msf_defaults_lambda_to_largest_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(&["msf", "--kappa", "0:0.2:0.2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.starts_with("lambda")).unwrap();
    let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((value - 4.9).abs() < 0.05, "default lambda {value}");
}

#[test]
fn experiment_rejects_explicit_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.ini");
    fs::write(&path, "[graph]\nn = 2\nedges = 0-1\n").unwrap();
    let out = oscnet(&["experiment", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("paper-network"), "{err}");
}

#[test]
fn out_flag_overrides_config_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscnet(
        &["eigen", "--preset", "paper-network", "--out", "custom.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("custom.csv").exists());
    assert!(!dir.path().join("spectrum.csv").exists());
}
