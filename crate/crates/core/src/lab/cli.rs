//! `czo-lab` command line.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{load_measure, write_atomic};
use crate::kernels::{verify_axioms, Kernel};
use crate::lipschitz_dual::{alpha_flat, alpha_mu_nu, alpha_spike, Comparison, SearchSpec};
use crate::measures::{Ball, DiscreteMeasure};
use crate::transforms::transform_trace;

use super::{emit_plots_data, load_scenario, run_scenario, RunOptions};

#[derive(Debug, Parser)]
#[command(
    name = "czo-lab",
    version,
    about = "Truncated singular integrals and transportation numbers on atomic measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write CSV/JSON artifacts.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// coarse, default or fine
        #[arg(long)]
        preset: Option<String>,
    },
    /// Transportation number of a measure file on one ball, as JSON.
    Alpha {
        #[arg(long)]
        measure: PathBuf,
        /// flat, spike:K, zero or fixed:PATH
        #[arg(long, default_value = "flat")]
        family: String,
        /// Ball center, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        r: f64,
        /// Use the small search grid.
        #[arg(long)]
        coarse: bool,
    },
    /// Principal-value trace as CSV.
    Trace {
        #[arg(long)]
        measure: PathBuf,
        /// riesz:S:D, huovinen:K or a kernel JSON object
        #[arg(long)]
        kernel: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        rmax: f64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 4)]
        tail: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled check of the kernel axioms, as JSON.
    VerifyKernel {
        /// riesz or huovinen
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        rmin: f64,
        #[arg(long, default_value_t = 1e3)]
        rmax: f64,
    },
}

/// Parses `riesz:S:D`, `huovinen:K` or a JSON kernel object.
pub fn parse_kernel(text: &str) -> Result<Kernel> {
    let t = text.trim();
    if t.starts_with('{') {
        let k: Kernel =
            serde_json::from_str(t).map_err(|e| Error::input(format!("kernel: {e}")))?;
        k.validate()?;
        return Ok(k);
    }
    let parts: Vec<&str> = t.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::input(format!("kernel: `{s}` is not a number")))
    };
    match parts.as_slice() {
        ["riesz", s, d] => Kernel::riesz(num(s)?, num(d)? as usize),
        ["huovinen", k] => Kernel::huovinen(num(k)? as u32),
        _ => Err(Error::input(format!(
            "kernel `{t}`: expected riesz:S:D or huovinen:K"
        ))),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("results serialise")
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            preset,
        } => {
            let base_dir = scenario.parent().map(Path::to_path_buf).unwrap_or_default();
            let sc = load_scenario(&scenario)?;
            let dir = out
                .or_else(|| sc.output.as_ref().map(|o| base_dir.join(o)))
                .ok_or_else(|| {
                    Error::Config(vec![
                        "output: no --out given and no \"output\" in the scenario".into(),
                    ])
                })?;
            let opts = RunOptions {
                seed,
                preset,
                base_dir,
            };
            let (prepared, outputs) = run_scenario(&sc, &opts)?;
            let files = emit_plots_data(&prepared, &outputs, &dir)?;
            Ok(format!(
                "{} points, {} files written to {}",
                outputs.len(),
                files.len() + 1,
                dir.display()
            ))
        }
        Command::Alpha {
            measure,
            family,
            x,
            r,
            coarse,
        } => {
            let mu = load_measure(&measure)?;
            let ball = Ball::new(x, r)?;
            let spec = if coarse {
                SearchSpec::coarse()
            } else {
                SearchSpec::default()
            };
            let res = if family == "flat" {
                alpha_flat(&mu, &ball, &spec)?
            } else if family == "zero" {
                let empty = DiscreteMeasure::empty(mu.dim(), mu.s(), mu.resolution())?;
                let mut res = alpha_mu_nu(&mu, &empty, &ball)?;
                res.comparison = Comparison::Zero;
                res
            } else if let Some(k) = family.strip_prefix("spike:") {
                let k = k
                    .parse()
                    .map_err(|_| Error::input(format!("family `{family}`: bad k")))?;
                alpha_spike(&mu, &ball, k, &spec)?
            } else if let Some(path) = family.strip_prefix("fixed:") {
                alpha_mu_nu(&mu, &load_measure(path)?, &ball)?
            } else {
                return Err(Error::input(format!(
                    "family `{family}`: expected flat, spike:K, zero or fixed:PATH"
                )));
            };
            Ok(to_json(&res.to_json()))
        }
        Command::Trace {
            measure,
            kernel,
            x,
            rmax,
            rho,
            tail,
            tol,
            out,
        } => {
            let mu = load_measure(&measure)?;
            let kernel = parse_kernel(&kernel)?;
            let t = transform_trace(&mu, &kernel, &x, rmax, rho, tail, tol)?;
            let csv = t.to_csv();
            match out {
                Some(path) => {
                    write_atomic(&path, csv.as_bytes())?;
                    Ok(to_json(&t.verdict))
                }
                None => Ok(csv.trim_end().to_string()),
            }
        }
        Command::VerifyKernel {
            family,
            s,
            dim,
            k,
            samples,
            seed,
            rmin,
            rmax,
        } => {
            let kernel = match family.as_str() {
                "riesz" => Kernel::riesz(s, dim)?,
                "huovinen" => Kernel::huovinen(k)?,
                other => {
                    return Err(Error::input(format!(
                        "family `{other}`: expected riesz or huovinen"
                    )))
                }
            };
            if samples == 0 {
                return Err(Error::input("samples must be at least 1"));
            }
            Ok(to_json(&verify_axioms(
                &kernel,
                samples,
                (rmin, rmax),
                seed,
            )?))
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
