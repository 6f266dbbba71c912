use std::path::Path;

use czo_lab::lab::{emit_plots_data, load_scenario, run_scenario, RunOptions};
use sha2::{Digest, Sha256};

fn scenario_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

#[test]
fn shipped_scenarios_parse() {
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}

#[test]
fn empty_measure_scenario_writes_a_consistent_manifest() {
    let dir = scenario_dir();
    let sc = load_scenario(&dir.join("empty_measure.json")).unwrap();
    let opts = RunOptions {
        base_dir: dir,
        ..Default::default()
    };
    let (prepared, outputs) = run_scenario(&sc, &opts).unwrap();
    let rec = &outputs[0].record.results;
    assert_eq!(rec["trace"]["verdict"]["verdict"], "converged");

    let out = tempfile::tempdir().unwrap();
    let entries = emit_plots_data(&prepared, &outputs, out.path()).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), entries.len());
    for e in &entries {
        let bytes = std::fs::read(out.path().join(&e.file)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), e.sha256);
    }
}

#[test]
fn preset_override_is_echoed() {
    let dir = scenario_dir();
    let sc = load_scenario(&dir.join("empty_measure.json")).unwrap();
    let opts = RunOptions {
        preset: Some("coarse".into()),
        base_dir: dir,
        ..Default::default()
    };
    let (prepared, _) = run_scenario(&sc, &opts).unwrap();
    assert_eq!(prepared.scales.m, 4);
}
