//! End-to-end tests of the `netvmo` binary: subcommands, artifacts, and the
//! documented exit codes (0 ok, 2 scenario errors, 3 simulation aborts,
//! 4 suite failures).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netvmo"))
}

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/five_cameras.scn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn simulate_writes_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(golden_path())
        .args(["--out"])
        .arg(dir.path())
        .args(["--tfinal", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(dir.path().join("series.csv").exists());
    assert!(dir.path().join("summary.txt").exists());
    assert!(stdout(&out).contains("settled U_p"));
}

#[test]
fn gain_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(golden_path())
        .args(["--out"])
        .arg(dir.path())
        .args(["--ks", "50", "--tfinal", "0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("k_s = 5.0000000000000000e1"), "{summary}");
    assert!(summary.contains("k = 2.0000000000000000e-2"), "{summary}");
}

#[test]
fn missing_scenario_file_exits_two() {
    let out = bin().args(["simulate", "/nonexistent/path.scn"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn malformed_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.scn");
    std::fs::write(&path, "this is not a scenario\n").unwrap();
    let out = bin().args(["simulate"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"));
}

#[test]
fn invalid_override_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(golden_path())
        .args(["--out"])
        .arg(dir.path())
        .args(["--dt", "-0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_abort_exits_three() {
    // A viewing camera whose target sits behind it cannot synthesize a
    // measurement, so a visual-mode run aborts on the first step.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("behind.scn");
    std::fs::write(
        &path,
        "[camera]\nid = 1\nposition = 0 0 0\nfocal_length = 0.03\nvisible = true\n\n\
         [target]\ncamera = 1\nposition = 0 0 -2\norientation = 0 0 0\n\n\
         [gains]\nk_e = 1\nk_s = 0\n\n\
         [integration]\ndt = 0.001\nt_final = 1\nerror_mode = visual\n",
    )
    .unwrap();
    let out = bin().args(["simulate"]).arg(&path).args(["--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("camera 1"), "{err}");
    assert!(err.contains("behind the camera"), "{err}");
}

#[test]
fn verify_passes_and_prints_check_lines() {
    let out = bin().args(["verify", "--seed", "42", "--trials", "300"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS rotation-triple-inequality"));
    assert!(text.contains("PASS image-jacobian-fd"));
    assert!(text.contains("PASS mean-pose-descent"));
    assert!(text.contains("PASS tree-load-cross-check"));
}

#[test]
fn verify_zero_trials_warns_but_passes() {
    let out = bin().args(["verify", "--trials", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("WARNING"));
}

#[test]
fn report_recomputes_metrics_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sim = bin()
        .args(["simulate"])
        .arg(golden_path())
        .args(["--out"])
        .arg(dir.path())
        .args(["--tfinal", "0.3"])
        .output()
        .unwrap();
    assert_eq!(sim.status.code(), Some(0));
    let out = bin()
        .args(["report"])
        .arg(dir.path().join("series.csv"))
        .arg(golden_path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("recompute_max_dev_U_p"), "{text}");
    assert!(text.contains("lambda_mismatches = 0"), "{text}");
}

#[test]
fn mean_prints_the_baseline() {
    let out = bin().args(["mean"]).arg(golden_path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let p_line = text.lines().find(|l| l.starts_with("p_star = ")).unwrap();
    let parts: Vec<f64> = p_line
        .strip_prefix("p_star = ")
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((parts[0] - 0.47).abs() < 0.005);
    assert!((parts[1] - 0.95).abs() < 0.005);
    assert!((parts[2] + 1.92).abs() < 0.005);
    assert!(text.contains("beta = "));
}

#[test]
fn cli_reruns_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = bin()
            .args(["simulate"])
            .arg(golden_path())
            .args(["--out"])
            .arg(d.path())
            .args(["--tfinal", "0.2"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(d1.path().join("series.csv")).unwrap(),
        std::fs::read(d2.path().join("series.csv")).unwrap()
    );
}
