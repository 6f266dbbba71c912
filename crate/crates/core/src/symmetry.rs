//! Symmetric points, reflection symmetry in balls and the small-boundary constant.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry;
use crate::kernels::Kernel;
use crate::lipschitz_dual::lipschitz_dual_sup;
use crate::measures::{Ball, DiscreteMeasure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub max_defect: f64,
    /// `(ρ, |S(ρ⁺)|)` at every atom-distance breakpoint `ρ < r_max`; `S` is constant on
    /// `(ρ_j, ρ_{j+1}]`.
    pub defect_by_radius: Vec<(f64, f64)>,
}

impl SymmetryReport {
    pub fn admissible(&self, tol: f64) -> bool {
        self.max_defect <= tol
    }
}

/// `max_ρ |Σ_{|x − p| < ρ} w K(x − p)|x − p|^s|` over `ρ ≤ r_max`.
///
/// The sum only changes at atom distances, so scanning the breakpoints is exact. Distances
/// agreeing to a relative `1e-12` are one breakpoint, so that mirror-image atoms whose
/// computed distances differ in the last bit enter together.
pub fn symmetric_point_defect(
    nu: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r_max: f64,
) -> Result<SymmetryReport> {
    if kernel.dim() != nu.dim() || x.len() != nu.dim() {
        return Err(Error::input("kernel, measure and point dimensions differ"));
    }
    let mut order: Vec<(f64, usize)> = nu
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (geometry::dist(x, &a.position), i))
        .filter(|(d, _)| *d < r_max)
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut acc = vec![Complex64::new(0.0, 0.0); kernel.output_len()];
    let mut unit = acc.clone();
    let mut profile = Vec::new();
    let mut max_defect = 0.0_f64;
    let mut i = 0;
    while i < order.len() {
        let d0 = order[i].0;
        while i < order.len() && order[i].0 - d0 <= 1e-12 * d0.max(f64::MIN_POSITIVE) {
            let a = &nu.atoms()[order[i].1];
            kernel.angular_part(&geometry::sub(x, &a.position), &mut unit);
            for (s, u) in acc.iter_mut().zip(&unit) {
                *s += a.weight * u;
            }
            i += 1;
        }
        let defect = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        max_defect = max_defect.max(defect);
        profile.push((d0, defect));
    }
    Ok(SymmetryReport {
        max_defect,
        defect_by_radius: profile,
    })
}

/// Signed coefficients of `ν|_B − (reflection of ν through z)|_B`, weighted by `1/r^s`.
fn reflection_coefficients(
    nu: &DiscreteMeasure,
    z: &[f64],
    ball: &Ball,
) -> Vec<(Vec<f64>, Complex64)> {
    let scale = ball.radius.powf(nu.s());
    let mut coeffs = Vec::new();
    for a in nu.atoms() {
        if ball.contains(&a.position) {
            coeffs.push((a.position.clone(), a.weight / scale));
        }
        let q = geometry::reflect(&a.position, z);
        if ball.contains(&q) {
            coeffs.push((q, -a.weight / scale));
        }
    }
    coeffs
}

/// Lower bound on [`reflection_defect`] for non-negative measures: the test function
/// `min(dist(·, reflected atoms)/r, b)` is admissible and vanishes on the reflected atoms.
fn reflection_lower_bound(coeffs: &[(Vec<f64>, Complex64)], ball: &Ball) -> f64 {
    let r = ball.radius;
    let negatives: Vec<&Vec<f64>> = coeffs
        .iter()
        .filter(|(_, a)| a.re < 0.0)
        .map(|(p, _)| p)
        .collect();
    let mut total = 0.0;
    for (p, a) in coeffs.iter().filter(|(_, a)| a.re > 0.0) {
        let b = (4.0 * r - geometry::dist(p, &ball.center)).max(0.0) / r;
        let d = negatives
            .iter()
            .map(|q| geometry::dist(p, q))
            .fold(f64::INFINITY, f64::min)
            / r;
        total += a.re * d.min(b);
    }
    total
}

/// Lipschitz-dual distance between `ν` and its reflection through `z`, both restricted to
/// the open ball `B`. Zero exactly when the restricted atom sets match under reflection.
pub fn reflection_defect(nu: &DiscreteMeasure, z: &[f64], ball: &Ball) -> Result<f64> {
    if z.len() != nu.dim() || ball.center.len() != nu.dim() {
        return Err(Error::input(
            "reflection center, ball and measure dimensions differ",
        ));
    }
    let coeffs = reflection_coefficients(nu, z, ball);
    if coeffs.is_empty() {
        return Ok(0.0);
    }
    Ok(lipschitz_dual_sup(&coeffs, &ball.center, ball.radius)?.0)
}

/// Like [`reflection_defect`] but returns early with a cheap lower bound once that bound
/// already exceeds `tol`.
fn reflection_defect_below(nu: &DiscreteMeasure, z: &[f64], ball: &Ball, tol: f64) -> Result<f64> {
    let coeffs = reflection_coefficients(nu, z, ball);
    if coeffs.is_empty() {
        return Ok(0.0);
    }
    if nu.is_nonneg() {
        let lb = reflection_lower_bound(&coeffs, ball);
        if lb > tol {
            return Ok(lb);
        }
    }
    Ok(lipschitz_dual_sup(&coeffs, &ball.center, ball.radius)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryEstimate {
    /// `max annulus_mass / (τ · ball_mass)` over the valid samples.
    pub value: f64,
    pub used: usize,
    /// Indices of samples whose `B(x, r/2)` misses the support or whose parameters are out
    /// of range.
    pub skipped: Vec<usize>,
}

/// Empirical lower estimate of the small-boundary constant
/// `ν(B(x,(1+τ)r) \ B(x,r)) ≤ C τ ν(B(x,r))` from samples `(x, r, τ)`.
pub fn small_boundary_constant(
    nu: &DiscreteMeasure,
    samples: &[(Vec<f64>, f64, f64)],
) -> Result<BoundaryEstimate> {
    let mut value = 0.0_f64;
    let mut used = 0;
    let mut skipped = Vec::new();
    for (i, (x, r, tau)) in samples.iter().enumerate() {
        let valid = x.len() == nu.dim()
            && *tau > 0.0
            && *tau <= 1.0
            && *r >= 2.0 * nu.resolution()
            && nu
                .atoms()
                .iter()
                .any(|a| a.weight.norm() > 0.0 && geometry::dist(&a.position, x) < r / 2.0);
        if !valid {
            skipped.push(i);
            continue;
        }
        let inner = nu.ball_variation(&Ball::new(x.clone(), *r)?);
        let outer = nu.ball_variation(&Ball::new(x.clone(), (1.0 + tau) * r)?);
        value = value.max((outer - inner) / (tau * inner));
        used += 1;
    }
    if used == 0 {
        return Err(Error::input("no valid small-boundary sample"));
    }
    Ok(BoundaryEstimate {
        value,
        used,
        skipped,
    })
}

/// Outcome of [`nearest_reflection_point`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReflectionPoint {
    /// `ν` is reflection symmetric about `x` in `B(x, r)`.
    AtX {
        defect: f64,
    },
    /// `ν` is reflection symmetric about `point ∈ supp ν ∩ B(x, Θr)` in `B(point, factor·Θr)`.
    At {
        point: Vec<f64>,
        defect: f64,
    },
    None {
        defect_at_x: f64,
    },
}

/// Searches for a nearby point of reflection symmetry.
///
/// First tests `x` itself in `B(x, r)`; otherwise scans the support atoms of `B(x, Θr)` in
/// ascending distance (ties by atom index) and returns the first `x̃` with
/// `reflection_defect(ν, x̃, B(x̃, factor·Θ·r)) ≤ defect_tol`. `defect_tol` defaults to
/// `10·resolution/r`; `factor` is 64 in the standard statement.
pub fn nearest_reflection_point(
    nu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    theta: f64,
    defect_tol: Option<f64>,
    factor: f64,
) -> Result<ReflectionPoint> {
    if !(r > 0.0 && theta > 0.0 && factor > 0.0) {
        return Err(Error::input(
            "need r, Θ and the enlargement factor positive",
        ));
    }
    let tol = defect_tol.unwrap_or(10.0 * nu.resolution() / r);
    let at_x = reflection_defect_below(nu, x, &Ball::new(x.to_vec(), r)?, tol)?;
    if at_x <= tol {
        return Ok(ReflectionPoint::AtX { defect: at_x });
    }
    let mut candidates: Vec<(f64, usize)> = nu
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.weight.norm() > 0.0)
        .map(|(i, a)| (geometry::dist(x, &a.position), i))
        .filter(|(d, _)| *d < theta * r)
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let big = factor * theta * r;
    let tol_big = defect_tol.unwrap_or(10.0 * nu.resolution() / big);
    for (_, i) in candidates {
        let p = &nu.atoms()[i].position;
        let d = reflection_defect_below(nu, p, &Ball::new(p.clone(), big)?, tol_big)?;
        if d <= tol_big {
            return Ok(ReflectionPoint::At {
                point: p.clone(),
                defect: d,
            });
        }
    }
    Ok(ReflectionPoint::None { defect_at_x: at_x })
}

/// `Θ = 2 / sin(π/k)` for the Huovinen kernel `K_k`.
pub fn huovinen_theta(k: u32) -> Result<f64> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::input(format!("Θ is defined for odd k ≥ 3, got {k}")));
    }
    Ok(2.0 / (PI / k as f64).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_segment_measure, make_spike_measure, Atom, SpikeParams};

    #[test]
    fn paired_atoms_are_symmetric() {
        let nu = DiscreteMeasure::new(
            2,
            1.0,
            0.01,
            true,
            vec![
                Atom::new(vec![0.3, 0.1], 0.5),
                Atom::new(vec![-0.3, -0.1], 0.5),
            ],
        )
        .unwrap();
        let k = Kernel::huovinen(3).unwrap();
        let rep = symmetric_point_defect(&nu, &k, &[0.0, 0.0], 10.0).unwrap();
        assert!(rep.max_defect < 1e-15);
        assert_eq!(rep.defect_by_radius.len(), 1);
    }

    #[test]
    fn spike_vertex_is_symmetric() {
        let h = 0.01;
        let p = SpikeParams {
            k: 3,
            m: 3,
            angle: 0.0,
            vertex: [0.0, 0.0],
            scale: 1.0,
        };
        let nu = make_spike_measure(&p, 1.0, h).unwrap();
        let k = Kernel::huovinen(3).unwrap();
        let rep = symmetric_point_defect(&nu, &k, &[0.0, 0.0], 1.0).unwrap();
        assert!(rep.max_defect <= 12.0 * h, "{}", rep.max_defect);
        let b = Ball::new(vec![0.0, 0.0], 0.4).unwrap();
        assert!(reflection_defect(&nu, &[0.0, 0.0], &b).unwrap() <= 2.0 * h / 0.4);
    }

    #[test]
    fn lone_atom_is_not_reflection_symmetric() {
        let nu =
            DiscreteMeasure::new(2, 1.0, 0.01, true, vec![Atom::new(vec![0.5, 0.0], 1.0)]).unwrap();
        let b = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        // +1 at (0.5, 0), −1 at (−0.5, 0): the pair distance 1 binds before the box.
        let d = reflection_defect(&nu, &[0.0, 0.0], &b).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "{d}");
        let coeffs = reflection_coefficients(&nu, &[0.0, 0.0], &b);
        assert!(reflection_lower_bound(&coeffs, &b) <= d + 1e-12);
    }

    #[test]
    fn lines_reflect_at_x() {
        let nu = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 2.0, 0.01).unwrap();
        match nearest_reflection_point(&nu, &[0.3, 0.0], 0.2, 2.0, None, 64.0).unwrap() {
            ReflectionPoint::AtX { defect } => assert!(defect <= 10.0 * 0.01 / 0.2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_values() {
        assert!((huovinen_theta(3).unwrap() - 4.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((huovinen_theta(5).unwrap() - 3.4026032334081595).abs() < 1e-9);
        assert!(huovinen_theta(4).is_err());
    }
}
