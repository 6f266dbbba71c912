//! JSON scenarios: build a measure, sweep points and radii, run analyses and write CSV/JSON
//! artifacts.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "measure": {"builtin": "segment", "center": [0, 0], "direction": [1, 0], "half_length": 1, "h": 0.0009765625},
//!   "kernel": {"family": "riesz", "s": 1.0, "dim": 2},
//!   "points": [[0, 0], [0.25, 0]],
//!   "radii": {"r_max": 0.125, "ratio": 0.5, "count": 5},
//!   "analyses": ["trace", "alpha_flat", {"alpha_spike": {"k": 3}}, "symmetry", "pipeline"],
//!   "scales": {"preset": "fine"}
//! }
//! ```
//!
//! Every output file is written through a temporary file and renamed. Floats use the
//! shortest representation that round-trips, so equal inputs give byte-identical CSVs.

pub mod cli;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{load_measure, write_atomic};
use crate::kernels::Kernel;
use crate::lipschitz_dual::{alpha_decay_curve, decay_curve_csv, FamilySelector, SearchSpec};
use crate::measures::{
    make_cantor4_measure, make_perturbed_segment, make_plane_measure, make_segment_measure,
    make_spike_measure, DiscreteMeasure, SpikeParams,
};
use crate::scales::{choose_averaging_scale, reduce_to_doubling, DoublingCase, ScaleParams};
use crate::symmetry::{huovinen_theta, symmetric_point_defect};
use crate::transforms::{double_average, transform_trace, truncated_transform, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

/// A generated measure or a measure file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Segment {
        center: Vec<f64>,
        direction: Vec<f64>,
        half_length: f64,
        h: f64,
    },
    Plane {
        base: Vec<f64>,
        basis: Vec<Vec<f64>>,
        extent: f64,
        h: f64,
    },
    Spike {
        k: u32,
        m: u32,
        angle: f64,
        vertex: [f64; 2],
        #[serde(default = "one")]
        scale: f64,
        extent: f64,
        h: f64,
    },
    Cantor4 {
        level: u32,
        side: f64,
    },
    PerturbedSegment {
        center: [f64; 2],
        half_length: f64,
        h: f64,
        amplitude: f64,
        wavelength: f64,
    },
    Empty {
        dim: usize,
        s: f64,
        resolution: f64,
    },
    /// Measure file; relative paths resolve against the scenario file.
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

/// Builds one of the canonical measures.
pub fn builtin_measure(spec: &MeasureSpec, base_dir: &Path) -> Result<DiscreteMeasure> {
    match spec {
        MeasureSpec::Segment {
            center,
            direction,
            half_length,
            h,
        } => make_segment_measure(center, direction, *half_length, *h),
        MeasureSpec::Plane {
            base,
            basis,
            extent,
            h,
        } => make_plane_measure(base, basis, *extent, *h),
        MeasureSpec::Spike {
            k,
            m,
            angle,
            vertex,
            scale,
            extent,
            h,
        } => make_spike_measure(
            &SpikeParams {
                k: *k,
                m: *m,
                angle: *angle,
                vertex: *vertex,
                scale: *scale,
            },
            *extent,
            *h,
        ),
        MeasureSpec::Cantor4 { level, side } => make_cantor4_measure(*level, *side),
        MeasureSpec::PerturbedSegment {
            center,
            half_length,
            h,
            amplitude,
            wavelength,
        } => make_perturbed_segment(center, *half_length, *h, *amplitude, *wavelength),
        MeasureSpec::Empty { dim, s, resolution } => DiscreteMeasure::empty(*dim, *s, *resolution),
        MeasureSpec::File { path } => load_measure(base_dir.join(path)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsSpec {
    List(Vec<Vec<f64>>),
    /// `sample` distinct support atoms chosen with the seeded generator.
    Sample {
        sample: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusGrid {
    pub r_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl RadiusGrid {
    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.r_max * self.ratio.powi(j as i32))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Trace,
    AlphaFlat,
    AlphaSpike { k: u32 },
    AlphaFixed { nu: PathBuf },
    Symmetry,
    Pipeline,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Trace => "trace",
            Analysis::AlphaFlat => "alpha_flat",
            Analysis::AlphaSpike { .. } => "alpha_spike",
            Analysis::AlphaFixed { .. } => "alpha_fixed",
            Analysis::Symmetry => "symmetry",
            Analysis::Pipeline => "pipeline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalesSpec {
    Preset { preset: String },
    Explicit(ScaleParams),
}

impl Default for ScalesSpec {
    fn default() -> Self {
        ScalesSpec::Preset {
            preset: "fine".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceSpec {
    pub tail_window: usize,
    pub tol: f64,
}

impl Default for TraceSpec {
    fn default() -> Self {
        Self {
            tail_window: 4,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub measure: MeasureSpec,
    pub kernel: Kernel,
    pub points: PointsSpec,
    pub radii: RadiusGrid,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub scales: ScalesSpec,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub trace: TraceSpec,
    /// Default output directory, relative to the scenario file.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Parses a scenario, reporting the offending field on failure.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            path: origin.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, path)
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub preset: Option<String>,
    /// Directory against which relative measure paths resolve.
    pub base_dir: PathBuf,
}

/// `Θ` used by presets: `2/sin(π/k)` for `K_k`, and 2 otherwise.
fn default_theta(kernel: &Kernel) -> f64 {
    match *kernel {
        Kernel::Huovinen { k } if k >= 3 => huovinen_theta(k).unwrap_or(2.0),
        _ => 2.0,
    }
}

/// A scenario with its measure built and every field checked.
pub struct Prepared {
    pub scenario: Scenario,
    pub measure: DiscreteMeasure,
    pub points: Vec<Vec<f64>>,
    pub scales: ScaleParams,
    pub fixed: Vec<(usize, DiscreteMeasure)>,
}

/// Validates a scenario and builds its measure, collecting every problem found.
pub fn prepare(scenario: &Scenario, opts: &RunOptions) -> Result<Prepared> {
    let mut bad = Vec::new();
    if scenario.schema != SCHEMA_VERSION {
        bad.push(format!(
            "schema: expected {SCHEMA_VERSION}, got {}",
            scenario.schema
        ));
    }
    if scenario.analyses.is_empty() {
        bad.push("analyses: must not be empty".into());
    }
    if let Err(e) = scenario.kernel.validate() {
        bad.push(format!("kernel: {e}"));
    }
    let g = scenario.radii;
    if !(g.r_max > 0.0 && g.ratio > 0.0 && g.ratio < 1.0 && g.count >= 1) {
        bad.push("radii: need r_max > 0, 0 < ratio < 1 and count ≥ 1".into());
    }
    let measure = match builtin_measure(&scenario.measure, &opts.base_dir) {
        Ok(m) => Some(m),
        Err(e) => {
            bad.push(format!("measure: {e}"));
            None
        }
    };
    let theta = default_theta(&scenario.kernel);
    let preset = opts.preset.clone().or(match &scenario.scales {
        ScalesSpec::Preset { preset } => Some(preset.clone()),
        ScalesSpec::Explicit(_) => None,
    });
    let scales = match (&preset, &scenario.scales) {
        (Some(name), _) => ScaleParams::preset(name, theta),
        (None, ScalesSpec::Explicit(p)) => Ok(p.clone()),
        (None, ScalesSpec::Preset { .. }) => unreachable!("preset names are handled above"),
    };
    let scales = match scales.and_then(|s| s.validate().map(|_| s)) {
        Ok(s) => Some(s),
        Err(e) => {
            bad.push(format!("scales: {e}"));
            None
        }
    };
    let mut fixed = Vec::new();
    for (i, a) in scenario.analyses.iter().enumerate() {
        if let Analysis::AlphaFixed { nu } = a {
            match load_measure(opts.base_dir.join(nu)) {
                Ok(m) => fixed.push((i, m)),
                Err(e) => bad.push(format!("analyses[{i}].alpha_fixed.nu: {e}")),
            }
        }
    }
    let Some(measure) = measure else {
        return Err(Error::Config(bad));
    };
    if scenario.kernel.dim() != measure.dim() {
        bad.push(format!(
            "kernel: dimension {} does not match the measure dimension {}",
            scenario.kernel.dim(),
            measure.dim()
        ));
    }
    let points = match &scenario.points {
        PointsSpec::List(list) => list.clone(),
        PointsSpec::Sample { sample: n, seed } => {
            let seed = opts.seed.unwrap_or(*seed);
            if *n > measure.len() {
                bad.push(format!(
                    "points: cannot sample {n} atoms from {}",
                    measure.len()
                ));
                Vec::new()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut idx = sample(&mut rng, measure.len(), *n).into_vec();
                idx.sort_unstable();
                idx.into_iter()
                    .map(|i| measure.atoms()[i].position.clone())
                    .collect()
            }
        }
    };
    for (i, p) in points.iter().enumerate() {
        if p.len() != measure.dim() {
            bad.push(format!(
                "points[{i}]: has {} coordinates, measure lives in R^{}",
                p.len(),
                measure.dim()
            ));
        }
    }
    let floor = 2.0 * measure.resolution();
    if let Some(r_min) = g.radii().last() {
        if *r_min < floor {
            bad.push(format!(
                "radii: smallest radius {r_min} is below the resolution floor 2·h = {floor}"
            ));
        }
    }
    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }
    Ok(Prepared {
        scenario: scenario.clone(),
        measure,
        points,
        scales: scales.expect("validated above"),
        fixed,
    })
}

/// One analysed point.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub point: usize,
    pub x: Vec<f64>,
    pub results: serde_json::Map<String, serde_json::Value>,
    pub timing_ms: f64,
    pub params: serde_json::Value,
}

pub struct PointOutput {
    pub record: RunRecord,
    /// `(file name, CSV text)`
    pub csvs: Vec<(String, String)>,
}

fn params_echo(p: &Prepared) -> serde_json::Value {
    serde_json::json!({
        "schema": p.scenario.schema,
        "measure": p.scenario.measure,
        "kernel": p.scenario.kernel,
        "radii": p.scenario.radii,
        "scales": p.scales,
        "search": p.scenario.search,
        "trace": p.scenario.trace,
    })
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Runs every analysis at every point.
pub fn run_prepared(p: &Prepared) -> Result<Vec<PointOutput>> {
    let sc = &p.scenario;
    let mu = &p.measure;
    let kernel = &sc.kernel;
    let radii = sc.radii.radii();
    let echo = params_echo(p);
    let mut outputs = Vec::with_capacity(p.points.len());
    for (i, x) in p.points.iter().enumerate() {
        let start = Instant::now();
        let mut results = serde_json::Map::new();
        let mut csvs = Vec::new();
        for (ai, analysis) in sc.analyses.iter().enumerate() {
            let name = format!("point{i}_{}.csv", analysis.name());
            let context = |e: Error| match e {
                Error::Input(msg) => {
                    Error::Input(format!("point {i} {:?}, {}: {msg}", x, analysis.name()))
                }
                other => other,
            };
            match analysis {
                Analysis::Trace => {
                    let t = transform_trace(
                        mu,
                        kernel,
                        x,
                        sc.radii.r_max,
                        sc.radii.ratio,
                        sc.trace.tail_window,
                        sc.trace.tol,
                    )
                    .map_err(context)?;
                    results.insert(
                        "trace".into(),
                        serde_json::json!({
                            "verdict": verdict_json(&t.verdict),
                            "tail_oscillation": t.tail_oscillation,
                            "radii": t.radii.len(),
                        }),
                    );
                    csvs.push((name, t.to_csv()));
                }
                Analysis::AlphaFlat | Analysis::AlphaSpike { .. } | Analysis::AlphaFixed { .. } => {
                    let family = match analysis {
                        Analysis::AlphaFlat => FamilySelector::Flat(sc.search.clone()),
                        Analysis::AlphaSpike { k } => FamilySelector::Spike {
                            k: *k,
                            search: sc.search.clone(),
                        },
                        _ => FamilySelector::Fixed(
                            p.fixed
                                .iter()
                                .find(|(j, _)| *j == ai)
                                .map(|(_, m)| m.clone())
                                .expect("fixed measures loaded during preparation"),
                        ),
                    };
                    let curve = alpha_decay_curve(mu, x, &radii, &family).map_err(context)?;
                    results.insert(
                        analysis.name().into(),
                        serde_json::Value::Array(
                            curve
                                .iter()
                                .map(|(r, a)| serde_json::json!({"r": r, "alpha": a.to_json()}))
                                .collect(),
                        ),
                    );
                    csvs.push((name, decay_curve_csv(&curve)));
                }
                Analysis::Symmetry => {
                    let rep =
                        symmetric_point_defect(mu, kernel, x, sc.radii.r_max).map_err(context)?;
                    let mut csv = String::from("r,defect\n");
                    for (r, d) in &rep.defect_by_radius {
                        csv.push_str(&format!("{r},{d}\n"));
                    }
                    results.insert(
                        "symmetry".into(),
                        serde_json::json!({"max_defect": rep.max_defect, "breakpoints": rep.defect_by_radius.len()}),
                    );
                    csvs.push((name, csv));
                }
                Analysis::Pipeline => {
                    let out =
                        reduce_to_doubling(mu, x, sc.radii.r_max, &p.scales).map_err(context)?;
                    let mut row = serde_json::json!({"doubling": out});
                    let mut csv = String::from(
                        "r0,case,levels,branch,big_r,x_tilde,t_r0,double_average,difference\n",
                    );
                    if out.case == DoublingCase::AbsolutelyConvergent {
                        csv.push_str(&format!(
                            "{},absolutely_convergent,{},,,,,,\n",
                            out.r0, out.levels
                        ));
                    } else {
                        // The measure is its own comparison measure here.
                        let choice = choose_averaging_scale(mu, mu, x, out.r0, &p.scales)
                            .map_err(context)?;
                        let t = truncated_transform(mu, kernel, x, out.r0)?;
                        let avg = double_average(mu, kernel, &choice.x_tilde, choice.big_r, out.r0)
                            .map_err(context)?;
                        let diff = t.dist(&avg);
                        csv.push_str(&format!(
                            "{},{},{},{},{},\"{}\",{},{},{}\n",
                            out.r0,
                            serde_json::to_value(out.case)
                                .unwrap()
                                .as_str()
                                .unwrap_or(""),
                            out.levels,
                            serde_json::to_value(choice.branch)
                                .unwrap()
                                .as_str()
                                .unwrap_or(""),
                            choice.big_r,
                            choice
                                .x_tilde
                                .iter()
                                .map(|v| format!("{v}"))
                                .collect::<Vec<_>>()
                                .join(" "),
                            t.norm(),
                            avg.norm(),
                            diff
                        ));
                        row["averaging"] = serde_json::to_value(&choice).unwrap_or_default();
                        row["difference"] = serde_json::json!(diff);
                    }
                    results.insert("pipeline".into(), row);
                    csvs.push((name, csv));
                }
            }
        }
        outputs.push(PointOutput {
            record: RunRecord {
                point: i,
                x: x.clone(),
                results,
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
                params: echo.clone(),
            },
            csvs,
        });
    }
    Ok(outputs)
}

/// Validates and runs a scenario.
pub fn run_scenario(
    scenario: &Scenario,
    opts: &RunOptions,
) -> Result<(Prepared, Vec<PointOutput>)> {
    let p = prepare(scenario, opts)?;
    let out = run_prepared(&p)?;
    Ok((p, out))
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Writes the per-point CSVs, `run.jsonl` and, last, `manifest.json`.
pub fn emit_plots_data(
    prepared: &Prepared,
    outputs: &[PointOutput],
    dir: &Path,
) -> Result<Vec<ManifestEntry>> {
    if outputs.is_empty() {
        return Err(Error::input("no records to write"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        write_atomic(&dir.join(name), bytes)?;
        entries.push(ManifestEntry {
            file: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    };
    for out in outputs {
        for (name, csv) in &out.csvs {
            put(name, csv.as_bytes())?;
        }
    }
    let mut jsonl = String::new();
    for out in outputs {
        jsonl.push_str(&serde_json::to_string(&out.record).expect("records serialise"));
        jsonl.push('\n');
    }
    put("run.jsonl", jsonl.as_bytes())?;
    let manifest = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "params": params_echo(prepared),
        "files": entries,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    write_atomic(&dir.join("manifest.json"), text.as_bytes())?;
    Ok(entries)
}
