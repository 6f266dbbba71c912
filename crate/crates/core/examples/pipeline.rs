//! Scale selection on a flat segment: reduce to a doubling scale, pick `(x̃, R)`, and compare
//! `T_{r0}(μ)(x)` with the double ball average around `x̃`.

use czo_lab::measures::make_segment_measure;
use czo_lab::scales::{choose_averaging_scale, reduce_to_doubling, ScaleParams};
use czo_lab::transforms::{double_average, truncated_transform};
use czo_lab::Kernel;

fn main() -> czo_lab::Result<()> {
    let h = 2f64.powi(-10);
    let mu = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, h)?;
    let kernel = Kernel::riesz(1.0, 2)?;
    let params = ScaleParams::fine(2.0);
    let r = 1.0 / 32.0;

    for x0 in [-0.5, -0.25, 0.0, 0.25, 0.5] {
        let x = [x0, 0.0];
        let red = reduce_to_doubling(&mu, &x, r, &params)?;
        let choice = choose_averaging_scale(&mu, &mu, &x, red.r0, &params)?;
        let t = truncated_transform(&mu, &kernel, &x, red.r0)?;
        let avg = double_average(&mu, &kernel, &choice.x_tilde, choice.big_r, red.r0)?;
        let diff = t.dist(&avg);
        let tol = 0.05 * t.norm().max(1.0) + 20.0 * h / red.r0;
        println!(
            "x = {x0:>5}: {:?} r0 = {} {:?} R = {}  |T| = {:.6}  |avg| = {:.6}  diff = {:.3e}  tol = {:.3e}",
            red.case,
            red.r0,
            choice.branch,
            choice.big_r,
            t.norm(),
            avg.norm(),
            diff,
            tol
        );
    }
    Ok(())
}
