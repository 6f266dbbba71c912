//! Principal-value traces of the s = 1 Riesz transform at the support point t = 1/4 of a
//! segment and of a wiggled segment.

use czo_lab::measures::{make_perturbed_segment, make_segment_measure};
use czo_lab::transforms::{transform_trace, Verdict};
use czo_lab::Kernel;

fn main() -> czo_lab::Result<()> {
    let h = 2f64.powi(-10);
    let kernel = Kernel::riesz(1.0, 2)?;
    let flat = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, h)?;
    let wavy = make_perturbed_segment(&[0.0, 0.0], 1.0, h, 0.02, 0.25)?;

    for (name, mu) in [("segment", &flat), ("perturbed", &wavy)] {
        let x = &mu.atoms()[mu.len() / 2 + 256].position;
        let trace = transform_trace(mu, &kernel, x, 0.25, 0.5, 4, 1e-6)?;
        let verdict = match &trace.verdict {
            Verdict::Converged { limit } => format!(
                "converged to {:?}",
                limit.0.iter().map(|z| z.re).collect::<Vec<_>>()
            ),
            Verdict::Oscillating => "oscillating".into(),
            Verdict::Indeterminate => format!(
                "indeterminate (tail oscillation {:.2e})",
                trace.tail_oscillation
            ),
        };
        println!("{name}: {} radii, {verdict}", trace.radii.len());
    }
    println!();
    print!(
        "{}",
        transform_trace(&flat, &kernel, &[0.5, 0.0], 0.25, 0.5, 4, 1e-6)?.to_csv()
    );
    Ok(())
}
