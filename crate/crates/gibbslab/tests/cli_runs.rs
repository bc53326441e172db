//! End-to-end runs of the command-line binary: artifact layout, byte-level
//! determinism, exit codes and error wording.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbslab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .env_remove("GIBBSLAB_WORKERS")
        .output()
        .expect("binary should launch")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["validate"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn build_writes_report_and_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = 1.0\nseed = 3\n");
    let out = run(&["--config", &cfg, "--out", "a", "build"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("a/report.toml")).unwrap();
    assert!(report.contains("command = \"build\""));
    assert!(report.contains("[stationary]"));
    assert!(report.contains("[parent]"));
    assert!(!report.contains("passed = false"), "failing check in:\n{report}");
    let spectra = fs::read_to_string(tmp.path().join("a/spectra.csv")).unwrap();
    assert!(spectra.starts_with("series,index,value"));
    assert!(spectra.contains("hamiltonian"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("report.toml"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = 1.0\nseed = 11\n[model]\nkind = \"hubbard\"\nsites = 1\nu = 0.2\n");
    for outdir in ["a", "b"] {
        let out = run(&["--config", &cfg, "--out", outdir, "build"], tmp.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["report.toml", "spectra.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn gap_and_mix_and_kernels_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = 1.0\n");
    for (cmd, artifact) in [
        ("gap", "report.toml"),
        ("mix", "decay.csv"),
        ("kernels", "decay.csv"),
    ] {
        let dir = format!("out-{cmd}");
        let out = run(&["--config", &cfg, "--out", &dir, cmd], tmp.path());
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(tmp.path().join(&dir).join(artifact).exists(), "{cmd} artifact");
    }
}

#[test]
fn sweep_writes_table_and_handles_single_point() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "beta = 1.0\n[sweep]\nu_min = 0.0\nu_max = 0.0\npoints = 1\n",
    );
    let out = run(&["--config", &cfg, "--out", "s", "sweep"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 2, "header plus one row:\n{table}");
}

#[test]
fn correlations_run_writes_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[correlation]\nmodes = 4\n");
    let out = run(&["--config", &cfg, "--out", "c", "correlations"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let decay = fs::read_to_string(tmp.path().join("c/decay.csv")).unwrap();
    assert!(decay.contains("correlation"));
    assert!(decay.contains("quasi_locality"));
}

#[test]
fn negative_beta_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = -1.0\n");
    let out = run(&["--config", &cfg, "validate"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("beta"), "stderr should name the field: {err}");
}

#[test]
fn unknown_config_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = 1.0\nbogus_knob = 3\n");
    let out = run(&["--config", &cfg, "validate"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus_knob"), "stderr should name the field: {err}");
}

#[test]
fn oversized_model_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "max_modes = 2\n[model]\nkind = \"hubbard\"\nsites = 2\n",
    );
    let out = run(&["--config", &cfg, "validate"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("max_modes"), "{err}");
}

#[test]
fn worker_count_must_be_a_positive_integer() {
    let tmp = tempfile::tempdir().unwrap();
    for bad in ["abc", "0"] {
        let out = bin()
            .args(["validate"])
            .current_dir(tmp.path())
            .env("GIBBSLAB_WORKERS", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "GIBBSLAB_WORKERS={bad}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("GIBBSLAB_WORKERS"), "{err}");
    }
}

#[test]
fn worker_count_accepts_a_small_pool() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["validate"])
        .current_dir(tmp.path())
        .env("GIBBSLAB_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn method_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "beta = 1.0\n");
    let out = run(
        &["--config", &cfg, "--out", "m", "--method", "both", "build"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("m/report.toml")).unwrap();
    assert!(report.contains("method = \"both\""));
    assert!(report.contains("dissipator_method_gap"));
    let bad = run(&["--config", &cfg, "--method", "fancy", "validate"], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["--config", "nope.toml", "validate"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
