//! End-to-end checks of the runner: exit codes, error messages, output
//! schemas, and byte-level reproducibility.

use std::path::Path;
use std::process::Command;

fn kg1d() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kg1d"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn resonance_zero_potential_reports_resonant() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    write(&conf, "experiment = resonance\npotential = zero\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(json["experiment"], "resonance");
    assert_eq!(json["results"][0]["is_resonant"], true);
    assert_eq!(json["pass"], true);
}

#[test]
fn scattering_zero_potential_is_trivial_and_pinned_header() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    write(&conf, "experiment = scattering\nn_scatter = 20\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("scattering.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,ReW,ImW,ReT,ImT,ReRp,ImRp,ReRm,ImRm,unitarity_defect"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // T = 1 + 0i, R = 0 for the free problem
    assert!((first[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    assert!(first[5].parse::<f64>().unwrap().abs() < 1e-10);
}

#[test]
fn identical_config_byte_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    write(
        &conf,
        "experiment = free-kernel\nseed = 12\nt = 10\n",
    );
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = kg1d()
            .args(["--config", conf.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());
        (
            std::fs::read(out_dir.join("free-kernel.csv")).unwrap(),
            std::fs::read(out_dir.join("summary.json")).unwrap(),
        )
    };
    let (csv_a, json_a) = run("a");
    let (csv_b, json_b) = run("b");
    assert_eq!(csv_a, csv_b, "CSV outputs differ between identical runs");
    assert_eq!(json_a, json_b, "JSON outputs differ between identical runs");
}

#[test]
fn override_flag_replaces_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    write(&conf, "experiment = resonance\npotential = zero\n");
    let out = kg1d()
        .args([
            "--config",
            conf.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--override",
            "potential=sech2:-0.4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(json["results"][0]["is_resonant"], false);
    assert_eq!(json["config_echo"]["potential"], "sech2:-0.4");
}

#[test]
fn bad_inputs_fail_with_named_key() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");

    // grid precondition: odd N
    write(&conf, "experiment = scattering\nN = 15\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("must be even"), "stderr: {stderr}");

    // duplicate key
    write(&conf, "experiment = scattering\nN = 64\nN = 128\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate key 'N'"));

    // unknown key
    write(&conf, "experiment = scattering\nbogus = 1\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key 'bogus'"));

    // unknown experiment
    write(&conf, "experiment = dance\n");
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment 'dance'"));
}

#[test]
fn threshold_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    // the free flow decays like t^{-1/2}; demanding -2 must fail the gate
    write(
        &conf,
        "experiment = free-decay\nfit_min = -3\nfit_max = -2\nt_list = log:10,40,6\n",
    );
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(json["pass"], false);
}

#[test]
fn evolve_writes_state_slice_schema() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    write(
        &conf,
        "experiment = evolve\npotential = sech2:-0.4\nt = 5\nN = 512\n",
    );
    let out = kg1d()
        .args(["--config", conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    assert!(csv.starts_with("x,re_psi,im_psi,re_psidot,im_psidot\n"));
    assert_eq!(csv.lines().count(), 513); // header + N rows
}
