use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mspt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mspt"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn mspt")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn anomaly_tdi_open_is_realizable() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["anomaly", "--scenario", "tdi-open"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("anomaly.json"));
    assert_eq!(v["open_realizable"], true);
    assert_eq!(v["closed_realizable"], false);
    assert!(dir.path().join("anomaly_matrix.csv").exists());
}

#[test]
fn anomaly_rejects_unknown_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["anomaly", "--scenario", "no-such-edge"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-edge"));
}

#[test]
fn gap_scan_tdi_block() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["gap-scan", "--scenario", "tdi-block", "--bound", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("gap_scan.json"));
    assert_eq!(v["rank"], 1);
    assert_eq!(v["fully_gapped"], false);
}

#[test]
fn spectral_flow_single_winding() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["spectral-flow", "--n", "64", "--m", "0.5", "--w", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectral_flow.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let cols: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(&cols[..3], &["2", "66", "2"]);
}

#[test]
fn malformed_ensemble_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ens.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "n": 16, "samples": 4, "seed": 1, "stifness": 0.5}"#).unwrap();
    let o = mspt(&["edge-corr", "--file", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stifness"), "{err}");
}

#[test]
fn edge_corr_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["edge-corr", "--n", "16"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn symmetry_check_fixed_winding() {
    let dir = tempfile::tempdir().unwrap();
    let o = mspt(&["symmetry-check", "--seed", "3", "--n", "4", "--samples", "6"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("symmetry_check.json"));
    assert_eq!(v["strong"]["pass"], true);
    assert_eq!(v["weak"]["pass"], true);
}

#[test]
fn edge_corr_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["edge-corr", "--seed", "5", "--n", "48", "--samples", "20", "--operator", "S"];
    for d in [&a, &b] {
        let o = mspt(&args, d.path());
        assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["s_correlator.csv", "s_correlator.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
