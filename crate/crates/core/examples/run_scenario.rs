//! Runs a scenario file and writes its artifacts, as `czo-lab run` does.
//!
//! `cargo run --example run_scenario -- crates/core/scenarios/flat_segment.json /tmp/flat`

use std::path::PathBuf;

use czo_lab::lab::{emit_plots_data, load_scenario, run_scenario, RunOptions};

fn main() -> czo_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/empty_measure.json").into()
    }));
    let out = PathBuf::from(args.next().unwrap_or_else(|| {
        std::env::temp_dir()
            .join("czo-lab-out")
            .display()
            .to_string()
    }));
    let sc = load_scenario(&path)?;
    let opts = RunOptions {
        base_dir: path.parent().map(|p| p.to_path_buf()).unwrap_or_default(),
        ..Default::default()
    };
    let (prepared, outputs) = run_scenario(&sc, &opts)?;
    for o in &outputs {
        println!(
            "point {} at {:?}: {:.1} ms",
            o.record.point, o.record.x, o.record.timing_ms
        );
    }
    for e in emit_plots_data(&prepared, &outputs, &out)? {
        println!("{:<28} {:>8} bytes  {}", e.file, e.bytes, &e.sha256[..16]);
    }
    Ok(())
}
