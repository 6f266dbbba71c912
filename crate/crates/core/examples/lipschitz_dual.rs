//! The Lipschitz-dual linear program on a handful of atoms, with its optimal test function.

use czo_lab::lipschitz_dual::lipschitz_dual_sup;
use czo_lab::Complex64;

fn main() -> czo_lab::Result<()> {
    let coeffs = vec![
        (vec![0.0, 0.0], Complex64::new(1.0, 0.0)),
        (vec![0.5, 0.0], Complex64::new(-0.5, 0.0)),
        (vec![0.0, 1.5], Complex64::new(-0.5, 0.0)),
        (vec![3.9, 0.0], Complex64::new(0.25, 0.25)),
    ];
    let (value, witness) = lipschitz_dual_sup(&coeffs, &[0.0, 0.0], 1.0)?;
    println!("sup = {value:.9}");
    for (p, f) in witness.support_points.iter().zip(&witness.values) {
        println!("  f({:>4}, {:>4}) = {f:>10.6}", p[0], p[1]);
    }
    let (pair, support) = witness.violations();
    println!("constraint violations: pairwise {pair:.1e}, support {support:.1e}");
    println!("witness hash {}", witness.hash());
    Ok(())
}
