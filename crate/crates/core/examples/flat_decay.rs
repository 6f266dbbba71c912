//! α^flat of a segment quadrature at an on-segment point, across dyadic radii.
//!
//! Run with `cargo run --release --example flat_decay`.

use std::time::Instant;

use czo_lab::lipschitz_dual::{alpha_flat, SearchSpec};
use czo_lab::measures::{make_segment_measure, Ball};

fn main() -> czo_lab::Result<()> {
    let h = 2f64.powi(-10);
    let mu = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, h)?;
    let x = vec![0.25, 0.0];
    let spec = SearchSpec::default();

    println!(
        "{:>10} {:>14} {:>14} {:>8} {:>8}",
        "r", "alpha_flat", "bound", "solves", "ms"
    );
    for p in 3..=7 {
        let r = 2f64.powi(-p);
        let t = Instant::now();
        let res = alpha_flat(&mu, &Ball::new(x.clone(), r)?, &spec)?;
        let bound = 8.0 * (h + r / 64.0) / r;
        println!(
            "{:>10.6} {:>14.6e} {:>14.6e} {:>8} {:>8}",
            r,
            res.value,
            bound,
            res.lp_solves,
            t.elapsed().as_millis()
        );
    }
    Ok(())
}
