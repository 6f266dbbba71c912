//! Thin shells and the telescoping bound on geometrically decaying annuli.

use czo_lab::measures::make_cantor4_measure;
use czo_lab::scales::find_thin_shell;
use czo_lab::transforms::david_mattila_pair;
use czo_lab::Kernel;

fn main() -> czo_lab::Result<()> {
    let mu = make_cantor4_measure(6, 1.0)?;
    let x = mu.atoms()[0].position.clone();
    for m in [2, 4, 8, 16] {
        let shell = find_thin_shell(&mu, &x, 1e-5, m)?;
        println!(
            "M = {m:>2}: M' = {:>6} (j = {}), annulus mass {:.4e} ≤ {:.4e}",
            shell.m_prime, shell.j, shell.annulus_mass, shell.bound
        );
    }
    let kernel = Kernel::riesz(1.0, 2)?;
    for levels in 1..=4 {
        let dm = david_mattila_pair(&mu, &kernel, &x, 0.25, 4.0, levels)?;
        println!(
            "L = {levels}: |T_r − T_(r/4^L)| = {:.4}, bound {:.4}, density hypothesis {}",
            dm.lhs, dm.rhs, dm.hypothesis_holds
        );
    }
    Ok(())
}
