use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn exq(command: &str, domain: &str, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exq"))
        .args(["--command", command, "--domain"])
        .arg(fixture(domain))
        .arg("--out")
        .arg(out)
        .output()
        .expect("exq runs")
}

#[test]
fn analyze_annulus_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = exq("analyze", "annulus_2_1.json", dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let lambda = report["lambda_min"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() < 1e-12, "{lambda}");
}

#[test]
fn malformed_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = exq("analyze", "malformed.json", dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_is_a_read_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exq("analyze", "does_not_exist.json", dir.path()).status.code(), Some(2));
}

#[test]
fn bad_configuration_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_exq"))
        .args(["--command", "analyze", "--samples", "8", "--domain"])
        .arg(fixture("annulus_2_1.json"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn overlapping_contours_are_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exq("analyze", "overlapping.json", dir.path()).status.code(), Some(3));
}

#[test]
fn fit_reports_verdict_through_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exq("fit", "annulus_2_1.json", &dir.path().join("a")).status.code(), Some(0));
    assert!(dir.path().join("a/fit.json").exists());
    assert!(dir.path().join("a/residuals.csv").exists());
    assert_eq!(exq("fit", "perturbed_annulus.json", &dir.path().join("b")).status.code(), Some(1));
}

#[test]
fn appendix_on_concentric_annulus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = exq("appendix", "annulus_3_2.json", dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("appendix.txt")).unwrap();
    assert!(text.contains("PASS") && !text.contains("FAIL"));
    assert_eq!(exq("appendix", "perturbed_annulus.json", &dir.path().join("p")).status.code(), Some(1));
}

#[test]
fn stokes_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exq("stokes", "annulus_2_1.json", dir.path()).status.code(), Some(0));
    for name in ["stokes.json", "stokes.csv", "zeros.csv", "stokes.svg"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}
