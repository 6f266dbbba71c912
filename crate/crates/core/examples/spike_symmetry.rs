//! A 3-spike is a symmetric measure for the Huovinen kernel K₃: every support point has
//! vanishing ball moments up to quadrature error. The 1-spike through the same vertex is not
//! symmetric for K₃ at points off its line.

use czo_lab::measures::make_spike_measure;
use czo_lab::symmetry::symmetric_point_defect;
use czo_lab::{Kernel, SpikeParams};

fn main() -> czo_lab::Result<()> {
    let h = 2f64.powi(-8);
    let kernel = Kernel::huovinen(3)?;
    let spike = SpikeParams {
        k: 3,
        m: 3,
        angle: 0.2,
        vertex: [0.0, 0.0],
        scale: 1.0,
    };
    let nu = make_spike_measure(&spike, 1.0, h)?;
    println!("{} atoms, h = {h}", nu.len());
    // Keep B(x, 0.5) inside the quadrature, which stops at distance 1 from the vertex.
    let inner: Vec<_> = nu
        .atoms()
        .iter()
        .filter(|a| czo_lab::geometry::norm(&a.position) <= 0.45)
        .collect();
    for i in (0..inner.len()).step_by(inner.len() / 6) {
        let x = &inner[i].position;
        let rep = symmetric_point_defect(&nu, &kernel, x, 0.5)?;
        println!(
            "point {i:>4} at ({:>8.4}, {:>8.4}): max defect {:.3e}",
            x[0], x[1], rep.max_defect
        );
    }
    let off = [0.1, 0.1];
    let rep = symmetric_point_defect(&nu, &kernel, &off, 0.5)?;
    println!(
        "off-support point {off:?}: max defect {:.3e}",
        rep.max_defect
    );
    Ok(())
}
