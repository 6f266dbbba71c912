use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_czo-lab"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_kernel_prints_a_report() {
    let out = bin()
        .args([
            "verify-kernel",
            "--family",
            "huovinen",
            "--k",
            "3",
            "--samples",
            "500",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["size_ratio"].as_f64().unwrap() <= 1.0 + 1e-12);
}

#[test]
fn trace_and_alpha_on_a_measure_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("seg.json");
    let seg =
        czo_lab::measures::make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, 1.0 / 64.0).unwrap();
    czo_lab::io::save_measure(&seg, &m).unwrap();

    let out = bin()
        .args([
            "trace",
            "--kernel",
            "riesz:1:2",
            "--x",
            "0,0",
            "--rmax",
            "0.5",
            "--tail",
            "2",
        ])
        .arg("--measure")
        .arg(&m)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(
        csv.starts_with("r,value_x1,value_x2,cumulative_oscillation\n"),
        "{csv}"
    );

    let out = bin()
        .args(["alpha", "--family", "zero", "--x", "0,0", "--r", "0.125"])
        .arg("--measure")
        .arg(&m)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["family"], "zero");
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(scenarios().join("empty_measure.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("point0_trace.csv").exists());
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"schema": 1, "bogus": 1}"#);
    let out = bin()
        .arg("run")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = bin()
        .args([
            "alpha",
            "--measure",
            "/nonexistent/m.json",
            "--x",
            "0,0",
            "--r",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["verify-kernel", "--family", "huovinen", "--k", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // A corner atom of the Cantor set is neither nearly symmetric nor of low density.
    let sc = write(
        dir.path(),
        "cantor.json",
        r#"{"schema": 1,
            "measure": {"builtin": "cantor4", "level": 4, "side": 1},
            "kernel": {"family": "riesz", "s": 1.0, "dim": 2},
            "points": {"sample": 1, "seed": 1},
            "radii": {"r_max": 0.0625, "ratio": 0.5, "count": 1},
            "analyses": ["pipeline"]}"#,
    );
    let out = bin()
        .arg("run")
        .arg(&sc)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
