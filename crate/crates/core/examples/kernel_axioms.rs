//! Sampled size, antisymmetry and smoothness checks for the kernels the crate ships.

use czo_lab::kernels::verify_axioms;
use czo_lab::Kernel;

fn main() -> czo_lab::Result<()> {
    let kernels = [
        Kernel::riesz(0.5, 2)?,
        Kernel::riesz(1.0, 2)?,
        Kernel::riesz(1.9, 3)?,
        Kernel::huovinen(3)?,
        Kernel::huovinen(5)?,
    ];
    println!(
        "{:<22} {:>10} {:>10} {:>12} {:>10}",
        "kernel", "size", "C_K", "smoothness", "C_smooth"
    );
    for k in &kernels {
        let rep = verify_axioms(k, 10_000, (1e-3, 1e3), 0)?;
        println!(
            "{:<22} {:>10.6} {:>10.6} {:>12.6} {:>10.6}",
            k.name(),
            rep.size_ratio,
            rep.size_constant,
            rep.smoothness_ratio,
            rep.smooth_constant
        );
    }
    Ok(())
}
