//! End-to-end checks of the command-line contract: exit codes, overrides,
//! and run-to-run reproducibility of the output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_overland"))
}

fn write_file(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

fn small_setup(dir: &Path) -> PathBuf {
    let dem = dir.join("dem.asc");
    let mut content = String::from(
        "ncols 8\nnrows 6\nxllcorner 0\nyllcorner 0\ncellsize 0.5\nNODATA_value -9999\n",
    );
    for j in 0..6 {
        let row: Vec<String> = (0..8).map(|i| format!("{}", (i + j) as f64 * 0.005)).collect();
        content.push_str(&row.join(" "));
        content.push('\n');
    }
    write_file(&dem, &content);
    let cfg = dir.join("run.cfg");
    write_file(
        &cfg,
        &format!(
            "dem_file = {}\nt_end = 3\noutput_interval = 1\ninitial_surface_level = 0.05\n\
             outlet = left\nboundary_left = neumann\n",
            dem.display()
        ),
    );
    cfg
}

#[test]
fn check_config_accepts_valid_and_rejects_unknown_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_setup(dir.path());
    let ok = bin().args(["check-config", "--config"]).arg(&cfg).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("config hash"));

    let bad = bin()
        .args(["check-config", "--config"])
        .arg(&cfg)
        .args(["--set", "tyop=1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown key"));
}

#[test]
fn missing_config_file_exits_2() {
    let out = bin().args(["run", "--config", "/definitely/missing.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_value_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_setup(dir.path());
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--set", "cfl=1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cfl must be in (0, 1]"));
}

#[test]
fn same_config_runs_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_setup(dir.path());
    for out in ["one", "two"] {
        let status = bin()
            .args(["run", "--quiet", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["snapshot_00000.txt", "snapshot_00003.txt", "hydrograph.txt", "mass_balance.txt"] {
        let a = fs::read(dir.path().join("one").join(name)).unwrap();
        let b = fs::read(dir.path().join("two").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn overrides_change_the_provenance_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_setup(dir.path());
    let base = bin().args(["check-config", "--config"]).arg(&cfg).output().unwrap();
    let patched = bin()
        .args(["check-config", "--config"])
        .arg(&cfg)
        .args(["--set", "g=9.8"])
        .output()
        .unwrap();
    assert!(base.status.success() && patched.status.success());
    assert_ne!(base.stdout, patched.stdout);
}

#[test]
fn verify_subcommand_reports_and_succeeds() {
    let out = bin().args(["verify", "ritter"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("suite ritter"));
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}
