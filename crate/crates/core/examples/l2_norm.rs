//! Power-iteration estimates of the truncated Riesz transform norm on L²(μ) for a segment
//! and a Cantor set, across truncation levels.

use czo_lab::measures::{make_cantor4_measure, make_segment_measure};
use czo_lab::transforms::l2_operator_norm;
use czo_lab::Kernel;

fn main() -> czo_lab::Result<()> {
    let kernel = Kernel::riesz(1.0, 2)?;
    let segment = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, 1.0 / 256.0)?;
    let cantor = make_cantor4_measure(4, 1.0)?;
    for (name, mu) in [("segment", &segment), ("cantor level 4", &cantor)] {
        for eps in [0.1, 0.03, 0.01] {
            let est = l2_operator_norm(mu, &kernel, eps, 200, 1)?;
            println!(
                "{name:<15} eps = {eps:<5} ‖T_ε‖ ≈ {:.4} ({} iterations, converged: {})",
                est.value, est.iterations, est.converged
            );
        }
    }
    Ok(())
}
