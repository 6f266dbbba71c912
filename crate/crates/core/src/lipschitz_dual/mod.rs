//! Transportation numbers as exact Lipschitz-dual linear programs.
//!
//! For a ball `B(x, r)` and coefficients `a_i` at points `p_i` the quantity of interest is
//!
//! ```text
//! sup { |Σ a_i f(p_i)| : f ∈ Lip_0(B(x, 4r)), ‖f‖_Lip ≤ 1/r }.
//! ```
//!
//! The objective only reads `f` at the atoms, and any vector `f_i` with
//! `|f_i − f_j| ≤ |p_i − p_j|/r` and `|f_i| ≤ b_i = max(0, 4r − |p_i − x|)/r` extends to an
//! admissible function: `g(y) = min_i (f_i + |y − p_i|/r)` clamped to
//! `±dist(y, B(x,4r)^c)/r` keeps the atom values and the Lipschitz bound. So the finite LP
//! over the vector is the continuous supremum, not an approximation of it.
//!
//! That LP is solved through its transport dual. Add a boundary node `0` with `f_0 = 0`
//! and coefficient `a_0 = −Σ a_i`; the constraints become `f_i − f_j ≤ d_ij` on the
//! shortest-path metric
//!
//! ```text
//! d_ij = min(|p_i − p_j|/r, b_i + b_j),   d_i0 = b_i,
//! ```
//!
//! and the maximum equals the optimal cost of shipping the positive coefficients onto the
//! negative ones under `d`. Every `d_ij` is a path through the boundary node or a direct
//! hop, so this is a minimum-cost flow on the graph with arcs `i ↔ 0` and `i ↔ j`. The
//! pairwise arcs are generated lazily: start from nearest neighbours, solve, add the most
//! violated pair of every node, and repeat until no pair is violated. The optimal
//! potentials give the witness through the `d`-transform `f(q) = min_j (v_j + d(q, p_j))`
//! over sinks, which is feasible for every pair of points, including atoms whose
//! coefficient vanishes.

mod search;
mod transport;

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry;
use crate::kernels::Kernel;
use crate::measures::{bump, Ball, DiscreteMeasure, SpikeParams};

pub use search::{alpha_flat, alpha_spike, icosahedral_directions, SearchSpec};

const NONE_NODE: usize = usize::MAX;

/// Optimal Lipschitz function sampled at the atoms inside `B(x, 4r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzWitness {
    pub center: Vec<f64>,
    pub radius: f64,
    pub support_points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl LipschitzWitness {
    /// Largest violations `(pairwise, support box)` of the constraints, both in units of
    /// the function values.
    pub fn violations(&self) -> (f64, f64) {
        let r = self.radius;
        let mut pair = 0.0_f64;
        let mut bx = 0.0_f64;
        for (i, p) in self.support_points.iter().enumerate() {
            let b = (4.0 * r - geometry::dist(p, &self.center)).max(0.0) / r;
            bx = bx.max(self.values[i].abs() - b);
            for (j, q) in self.support_points.iter().enumerate().skip(i + 1) {
                pair = pair.max((self.values[i] - self.values[j]).abs() - geometry::dist(p, q) / r);
            }
        }
        (pair.max(0.0), bx.max(0.0))
    }

    /// Hex SHA-256 of the witness values, for compact identification in logs.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.values {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    fn zeros(center: &[f64], radius: f64, points: Vec<Vec<f64>>) -> Self {
        let n = points.len();
        Self {
            center: center.to_vec(),
            radius,
            support_points: points,
            values: vec![0.0; n],
        }
    }
}

/// The comparison measure behind an [`AlphaResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Comparison {
    /// A caller-supplied measure (its index in the family, when there is one).
    Fixed {
        index: Option<usize>,
    },
    /// The zero measure, `c = 0`.
    Zero,
    /// `H^s` on `x + span(basis)`.
    Plane {
        base: Vec<f64>,
        basis: Vec<Vec<f64>>,
    },
    Spike {
        params: SpikeParams,
        t: f64,
    },
}

impl Comparison {
    pub fn family(&self) -> &'static str {
        match self {
            Comparison::Fixed { .. } => "fixed",
            Comparison::Zero => "zero",
            Comparison::Plane { .. } => "plane",
            Comparison::Spike { .. } => "spike",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaResult {
    pub value: f64,
    pub witness: LipschitzWitness,
    pub comparison: Comparison,
    /// `c_{μ,ν} = I_μ / I_ν`, or 0 when `I_ν = 0`.
    pub c_coefficient: Complex64,
    /// Spacing of the discretised comparison measure, when it was generated here.
    pub quad_spacing: Option<f64>,
    /// Number of transport problems solved.
    pub lp_solves: usize,
    /// True for family searches: the value is the best found, an upper bound on the infimum.
    pub upper_bound: bool,
    /// A spike search whose best vertex sits on the `|t| = 4r` cap.
    pub boundary_binding: bool,
}

impl AlphaResult {
    /// `{value, family, params, c, quad_spacing, witness_hash}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "family": self.comparison.family(),
            "params": self.comparison,
            "c": [self.c_coefficient.re, self.c_coefficient.im],
            "quad_spacing": self.quad_spacing,
            "witness_hash": self.witness.hash(),
            "lp_solves": self.lp_solves,
            "upper_bound": self.upper_bound,
            "boundary_binding": self.boundary_binding,
        })
    }
}

/// Points inside `B(x, 4r)` with coincident positions merged.
struct Prepared {
    points: Vec<Vec<f64>>,
    coeffs: Vec<Complex64>,
    /// Support bound `b_i`.
    bound: Vec<f64>,
    /// `|p_i − p_j|/r`, row major, when small enough to keep.
    dist: Option<Vec<f64>>,
    r: f64,
}

/// Distance matrices up to this many entries are materialised.
const DENSE_DIST_LIMIT: usize = 4_000_000;

impl Prepared {
    #[inline]
    fn e(&self, i: usize, j: usize) -> f64 {
        match &self.dist {
            Some(m) => m[i * self.points.len() + j],
            None => geometry::dist(&self.points[i], &self.points[j]) / self.r,
        }
    }
}

fn prepare(coeffs: &[(Vec<f64>, Complex64)], x: &[f64], r: f64) -> Prepared {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut out = Prepared {
        points: Vec::new(),
        coeffs: Vec::new(),
        bound: Vec::new(),
        dist: None,
        r,
    };
    for (p, a) in coeffs {
        let d = geometry::dist(p, x);
        if d >= 4.0 * r {
            continue;
        }
        let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
        match index.get(&key) {
            Some(&i) => out.coeffs[i] += a,
            None => {
                index.insert(key, out.points.len());
                out.points.push(p.clone());
                out.coeffs.push(*a);
                out.bound.push((4.0 * r - d) / r);
            }
        }
    }
    let n = out.points.len();
    if n * n <= DENSE_DIST_LIMIT {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let v = geometry::dist(&out.points[i], &out.points[j]) / r;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        out.dist = Some(m);
    }
    out
}

/// Nearest neighbours joined by initial pairwise arcs.
const INITIAL_NEIGHBOURS: usize = 8;
/// A pair counts as violated once `f_i − f_j` exceeds `|p_i − p_j|/r` by this much.
const VIOLATION_TOL: f64 = 1e-11;
const MAX_ROUNDS: usize = 200;
/// Violated pairs added per node and round.
const ARCS_PER_ROUND: usize = 4;

/// Maximises `Σ a_i f_i` over the feasible set; returns the value and the witness values.
fn solve_real(pr: &Prepared, a: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = pr.points.len();
    if a.iter().all(|&v| v == 0.0) {
        return Ok((0.0, vec![0.0; n]));
    }
    let hub = n;
    let mut supply = a.to_vec();
    supply.push(-a.iter().sum::<f64>());
    let max_b = pr.bound.iter().cloned().fold(0.0_f64, f64::max);
    let mut hub_cost = pr.bound.clone();
    hub_cost.push(0.0);
    let mut net = transport::FlowNetwork::with_hub(&supply, 2.0 * max_b + 1.0, hub, &hub_cost);

    let e = |i: usize, j: usize| pr.e(i, j);
    let mut present = vec![0u64; (n * n).div_ceil(64)];
    let mut insert = |u: usize, v: usize| -> bool {
        let (w, b) = ((u * n + v) / 64, (u * n + v) % 64);
        let fresh = present[w] >> b & 1 == 0;
        present[w] |= 1 << b;
        fresh
    };
    // Each node is joined to its nearest neighbours overall and to its nearest nodes of the
    // opposite sign, where the mass has to go.
    let mut row: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        for opposite in [false, true] {
            row.clear();
            row.extend(
                (0..n)
                    .filter(|&j| j != i && (!opposite || a[i] * a[j] < 0.0))
                    .map(|j| (e(i, j), j)),
            );
            let k = INITIAL_NEIGHBOURS.min(row.len());
            if k < row.len() {
                row.select_nth_unstable_by(k, |a, b| a.0.total_cmp(&b.0));
            }
            for &(c, j) in &row[..k] {
                for (u, v) in [(i, j), (j, i)] {
                    if insert(u, v) {
                        net.add_arc(u, v, c);
                    }
                }
            }
        }
    }

    let mut sol = net.solve()?;
    for round in 0.. {
        let y = &sol.potential;
        let mut added = 0;
        for i in 0..n {
            // The few most violated pairs of row i, most violated first.
            let mut worst = [(VIOLATION_TOL, NONE_NODE, 0.0); ARCS_PER_ROUND];
            for j in 0..n {
                let gap = y[i] - y[j];
                if gap <= worst[ARCS_PER_ROUND - 1].0 {
                    continue;
                }
                let c = e(i, j);
                let v = gap - c;
                if v > worst[ARCS_PER_ROUND - 1].0 {
                    let mut k = ARCS_PER_ROUND - 1;
                    while k > 0 && worst[k - 1].0 < v {
                        worst[k] = worst[k - 1];
                        k -= 1;
                    }
                    worst[k] = (v, j, c);
                }
            }
            for &(_, j, c) in worst.iter().take_while(|w| w.1 != NONE_NODE) {
                if insert(i, j) {
                    net.add_arc(i, j, c);
                    added += 1;
                }
            }
        }
        if added == 0 {
            break;
        }
        if round == MAX_ROUNDS {
            return Err(Error::Solver(format!(
                "constraint generation did not settle after {MAX_ROUNDS} rounds"
            )));
        }
        sol = net.solve()?;
    }

    let d = |p: usize, q: usize| -> f64 {
        match (p == hub, q == hub) {
            (true, true) => 0.0,
            (true, false) => pr.bound[q],
            (false, true) => pr.bound[p],
            (false, false) => e(p, q).min(pr.bound[p] + pr.bound[q]),
        }
    };
    let sinks: Vec<usize> = (0..=n).filter(|&j| supply[j] < 0.0).collect();
    let transform = |p: usize| -> f64 {
        sinks
            .iter()
            .map(|&j| sol.potential[j] + d(p, j))
            .fold(f64::INFINITY, f64::min)
    };
    let f0 = transform(hub);
    let f: Vec<f64> = (0..n).map(|i| transform(i) - f0).collect();
    let value: f64 = a.iter().zip(&f).map(|(a, f)| a * f).sum();
    let scale: f64 = a
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    if (value - sol.cost).abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::Solver(format!(
            "witness objective {value} differs from transport cost {} (residual {:e})",
            sol.cost,
            (value - sol.cost).abs()
        )));
    }
    Ok((value.max(0.0), f))
}

fn phase_objective(pr: &Prepared, theta: f64) -> Result<(f64, Vec<f64>)> {
    let rot = Complex64::from_polar(1.0, -theta);
    let a: Vec<f64> = pr.coeffs.iter().map(|c| (rot * c).re).collect();
    solve_real(pr, &a)
}

/// Golden-section maximisation of a fallible function on `[lo, hi]`.
pub(crate) fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Phase grid size for complex objectives.
const PHASE_GRID: usize = 64;

/// Value and witness of the Lipschitz-dual problem, with the number of LPs solved.
fn dual_sup(
    coeffs: &[(Vec<f64>, Complex64)],
    x: &[f64],
    r: f64,
) -> Result<(f64, LipschitzWitness, usize)> {
    if !(r > 0.0) {
        return Err(Error::input(format!("radius must be positive, got {r}")));
    }
    if let Some((p, _)) = coeffs.iter().find(|(p, a)| {
        p.len() != x.len() || !geometry::is_finite(p) || !(a.re.is_finite() && a.im.is_finite())
    }) {
        return Err(Error::input(format!("bad coefficient point {p:?}")));
    }
    let pr = prepare(coeffs, x, r);
    let mut witness = LipschitzWitness::zeros(x, r, pr.points.clone());
    if pr.coeffs.iter().all(|c| c.im == 0.0) {
        let a: Vec<f64> = pr.coeffs.iter().map(|c| c.re).collect();
        let (value, f) = solve_real(&pr, &a)?;
        witness.values = f;
        return Ok((value, witness, 1));
    }

    // g(θ) = LP(Re(e^{−iθ} a)) has period π; grid it, then refine around the best node.
    let mut solves = 0;
    let mut best = (f64::NEG_INFINITY, 0.0, Vec::new());
    let step = std::f64::consts::PI / PHASE_GRID as f64;
    for k in 0..PHASE_GRID {
        let theta = k as f64 * step;
        let (v, f) = phase_objective(&pr, theta)?;
        solves += 1;
        if v > best.0 {
            best = (v, theta, f);
        }
    }
    let centre = best.1;
    let mut refined: Option<(f64, f64, Vec<f64>)> = None;
    golden_max(
        |t| {
            let (v, f) = phase_objective(&pr, t)?;
            solves += 1;
            if refined.as_ref().map_or(true, |b| v > b.0) {
                refined = Some((v, t, f));
            }
            Ok(v)
        },
        centre - step,
        centre + step,
        1e-6,
    )?;
    if let Some(rf) = refined {
        if rf.0 > best.0 {
            best = rf;
        }
    }
    let f = best.2;
    let value = pr
        .coeffs
        .iter()
        .zip(&f)
        .map(|(a, f)| a * f)
        .sum::<Complex64>()
        .norm();
    witness.values = f;
    Ok((value, witness, solves))
}

/// `sup |Σ a_i f(p_i)|` over `f ∈ Lip_0(B(x, 4r))` with `‖f‖_Lip ≤ 1/r`.
///
/// Points outside `B(x, 4r)` are dropped (the support constraint forces `f = 0` there) and
/// coincident points are merged. Complex coefficients are handled by maximising over the
/// phase `θ` of `Re(e^{−iθ} Σ a_i f_i)`.
pub fn lipschitz_dual_sup(
    coeffs: &[(Vec<f64>, Complex64)],
    x: &[f64],
    r: f64,
) -> Result<(f64, LipschitzWitness)> {
    dual_sup(coeffs, x, r).map(|(v, w, _)| (v, w))
}

/// The μ side of `α_{μ,·}(B)`: bump-weighted coefficients inside `B(x, 4r)` and `I_μ(B)`.
pub(crate) struct Window<'a> {
    ball: &'a Ball,
    s: f64,
    terms: Vec<(Vec<f64>, Complex64)>,
    i_mu: Complex64,
    resolution: f64,
}

impl<'a> Window<'a> {
    pub(crate) fn new(mu: &DiscreteMeasure, ball: &'a Ball) -> Result<Self> {
        if ball.center.len() != mu.dim() {
            return Err(Error::input("ball and measure dimensions differ"));
        }
        let r = ball.radius;
        let scale = r.powf(mu.s());
        let mut terms = Vec::new();
        let mut i_mu = Complex64::new(0.0, 0.0);
        for a in mu.atoms() {
            let phi = bump(geometry::dist(&a.position, &ball.center) / r);
            if phi > 0.0 {
                i_mu += a.weight * phi;
                terms.push((a.position.clone(), a.weight * (phi / scale)));
            }
        }
        Ok(Self {
            ball,
            s: mu.s(),
            terms,
            i_mu,
            resolution: mu.resolution(),
        })
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.norm() == 0.0)
    }

    /// Coefficients of `r^{−s} φ (μ − c ν)` and `c`.
    fn coefficients(
        &self,
        nu: &DiscreteMeasure,
    ) -> Result<(Vec<(Vec<f64>, Complex64)>, Complex64)> {
        let r = self.ball.radius;
        if nu.dim() != self.ball.center.len() {
            return Err(Error::input("comparison measure has the wrong dimension"));
        }
        let floor = 2.0 * self.resolution.max(nu.resolution());
        if r < floor {
            return Err(Error::input(format!(
                "radius {r} is below twice the resolution ({floor})"
            )));
        }
        let scale = r.powf(self.s);
        let mut nu_terms = Vec::new();
        let mut i_nu = Complex64::new(0.0, 0.0);
        for a in nu.atoms() {
            let phi = bump(geometry::dist(&a.position, &self.ball.center) / r);
            if phi > 0.0 {
                i_nu += a.weight * phi;
                nu_terms.push((a.position.clone(), a.weight * (phi / scale)));
            }
        }
        let c = if i_nu.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.i_mu / i_nu
        };
        let mut coeffs = self.terms.clone();
        coeffs.extend(nu_terms.into_iter().map(|(p, w)| (p, -c * w)));
        Ok((coeffs, c))
    }

    /// `(α, witness, c, LP count)` against ν.
    pub(crate) fn against(
        &self,
        nu: &DiscreteMeasure,
    ) -> Result<(f64, LipschitzWitness, Complex64, usize)> {
        let (coeffs, c) = self.coefficients(nu)?;
        let (value, witness, solves) = dual_sup(&coeffs, &self.ball.center, self.ball.radius)?;
        Ok((value, witness, c, solves))
    }

    /// A lower bound on `α` against ν from the feasible test function
    /// `min(dist(·, S)/r, b)`, where `S ⊇ supp ν` is described by `dist_to_support`.
    pub(crate) fn lower_bound(
        &self,
        nu: &DiscreteMeasure,
        dist_to_support: &dyn Fn(&[f64]) -> f64,
    ) -> Result<f64> {
        let (coeffs, _) = self.coefficients(nu)?;
        let (x, r) = (&self.ball.center, self.ball.radius);
        let total: Complex64 = coeffs
            .iter()
            .map(|(p, a)| {
                let b = (4.0 * r - geometry::dist(p, x)).max(0.0) / r;
                a * (dist_to_support(p) / r).min(b)
            })
            .sum();
        Ok(total.norm())
    }
}

/// `α_{μ,ν}(B(x, r)) = sup_f |r^{−s} ∫ φ(|x − y|/r) f d(μ − c_{μ,ν} ν)|`.
pub fn alpha_mu_nu(mu: &DiscreteMeasure, nu: &DiscreteMeasure, ball: &Ball) -> Result<AlphaResult> {
    let window = Window::new(mu, ball)?;
    let (value, witness, c, lp_solves) = window.against(nu)?;
    Ok(AlphaResult {
        value,
        witness,
        comparison: Comparison::Fixed { index: None },
        c_coefficient: c,
        quad_spacing: None,
        lp_solves,
        upper_bound: false,
        boundary_binding: false,
    })
}

/// A candidate rejected by [`alpha_general`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneralAlpha {
    pub best: AlphaResult,
    pub index: usize,
    pub skipped: Vec<Skipped>,
    /// Symmetric-point tolerance used, relative to `r^s`.
    pub tolerance: f64,
}

/// `α_{μ,S}(B) = inf α_{μ,ν}(B)` over the admissible members of `family`.
///
/// A nonzero candidate is admissible when its support meets `B(x, r/8)` and `x` is a
/// symmetric point of it for `kernel` up to `r^s·tol` on radii below `4r`. `tol` defaults to
/// `10·h_ν/r`. The zero measure is always admissible.
pub fn alpha_general(
    mu: &DiscreteMeasure,
    ball: &Ball,
    family: &[DiscreteMeasure],
    kernel: &Kernel,
    tol: Option<f64>,
) -> Result<GeneralAlpha> {
    let window = Window::new(mu, ball)?;
    let r = ball.radius;
    let x = &ball.center;
    let inner = Ball::new(x.clone(), r / 8.0)?;
    let mut skipped = Vec::new();
    let mut best: Option<(AlphaResult, usize)> = None;
    let mut used_tol = tol.unwrap_or(0.0);
    for (index, nu) in family.iter().enumerate() {
        let is_zero = nu.atoms().iter().all(|a| a.weight.norm() == 0.0);
        if !is_zero {
            if !nu
                .atoms()
                .iter()
                .any(|a| a.weight.norm() > 0.0 && inner.contains(&a.position))
            {
                skipped.push(Skipped {
                    index,
                    reason: "support misses B(x, r/8)".into(),
                });
                continue;
            }
            let t = tol.unwrap_or(10.0 * nu.resolution() / r);
            used_tol = used_tol.max(t);
            let report = crate::symmetry::symmetric_point_defect(nu, kernel, x, 4.0 * r)?;
            let rel = report.max_defect / r.powf(nu.s());
            if rel > t {
                skipped.push(Skipped {
                    index,
                    reason: format!("x is not a symmetric point: defect {rel:e} > {t:e}"),
                });
                continue;
            }
        }
        let (value, witness, c, lp_solves) = window.against(nu)?;
        let res = AlphaResult {
            value,
            witness,
            comparison: if is_zero {
                Comparison::Zero
            } else {
                Comparison::Fixed { index: Some(index) }
            },
            c_coefficient: c,
            quad_spacing: None,
            lp_solves,
            upper_bound: false,
            boundary_binding: false,
        };
        if best.as_ref().map_or(true, |b| res.value < b.0.value) {
            best = Some((res, index));
        }
    }
    match best {
        Some((best, index)) => Ok(GeneralAlpha {
            best,
            index,
            skipped,
            tolerance: used_tol,
        }),
        None => Err(Error::NoAdmissibleCandidate(format!(
            "all {} candidates rejected: {}",
            family.len(),
            skipped
                .iter()
                .map(|s| format!("#{} ({})", s.index, s.reason))
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// Comparison family used along a decay curve.
#[derive(Debug, Clone)]
pub enum FamilySelector {
    Flat(SearchSpec),
    Spike { k: u32, search: SearchSpec },
    Fixed(DiscreteMeasure),
    Zero,
}

/// `α(B(x, r))` for each radius of `r_grid`, in the given order.
pub fn alpha_decay_curve(
    mu: &DiscreteMeasure,
    x: &[f64],
    r_grid: &[f64],
    family: &FamilySelector,
) -> Result<Vec<(f64, AlphaResult)>> {
    let mut out = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if r < 2.0 * mu.resolution() {
            return Err(Error::input(format!(
                "radius {r} is below twice the resolution {}",
                mu.resolution()
            )));
        }
        let ball = Ball::new(x.to_vec(), r)?;
        let res = match family {
            FamilySelector::Flat(spec) => alpha_flat(mu, &ball, spec)?,
            FamilySelector::Spike { k, search } => alpha_spike(mu, &ball, *k, search)?,
            FamilySelector::Fixed(nu) => alpha_mu_nu(mu, nu, &ball)?,
            FamilySelector::Zero => {
                let empty = DiscreteMeasure::empty(mu.dim(), mu.s(), mu.resolution())?;
                let mut res = alpha_mu_nu(mu, &empty, &ball)?;
                res.comparison = Comparison::Zero;
                res
            }
        };
        out.push((r, res));
    }
    Ok(out)
}

/// CSV `r,alpha,family,c_re,c_im,lp_solves,params` for a decay curve.
pub fn decay_curve_csv(curve: &[(f64, AlphaResult)]) -> String {
    let mut out = String::from("r,alpha,family,c_re,c_im,lp_solves,params\n");
    for (r, a) in curve {
        let params = serde_json::to_string(&a.comparison)
            .unwrap_or_default()
            .replace('"', "'");
        out.push_str(&format!(
            "{r},{},{},{},{},{},\"{params}\"\n",
            a.value,
            a.comparison.family(),
            a.c_coefficient.re,
            a.c_coefficient.im,
            a.lp_solves
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_segment_measure, Atom};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_coefficients() {
        let (v, w) = lipschitz_dual_sup(&[(vec![0.1, 0.0], c(0.0))], &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(w.values, vec![0.0]);
    }

    #[test]
    fn single_coefficient_hits_support_bound() {
        let (v, w) = lipschitz_dual_sup(&[(vec![2.0, 0.0], c(-1.5))], &[0.0, 0.0], 1.0).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!((w.values[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn dipole_hits_pairwise_bound() {
        let pts = [(vec![0.1, 0.0], c(0.7)), (vec![0.4, 0.4], c(-0.7))];
        let (v, w) = lipschitz_dual_sup(&pts, &[0.0, 0.0], 1.0).unwrap();
        assert!((v - 0.7 * 0.5).abs() < 1e-12);
        let (pair, bx) = w.violations();
        assert!(pair < 1e-12 && bx < 1e-12);
    }

    #[test]
    fn points_outside_window_are_dropped() {
        let pts = [(vec![5.0, 0.0], c(1.0)), (vec![0.0, 0.0], c(1.0))];
        let (v, w) = lipschitz_dual_sup(&pts, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(w.support_points.len(), 1);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn complex_phase_is_found() {
        // A single coefficient i: value |i|·b.
        let (v, _) = lipschitz_dual_sup(
            &[(vec![1.0, 0.0], Complex64::new(0.0, 2.0))],
            &[0.0, 0.0],
            1.0,
        )
        .unwrap();
        assert!((v - 6.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn witness_feasible_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let pts: Vec<(Vec<f64>, Complex64)> = (0..n)
                .map(|_| {
                    (
                        vec![rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)],
                        c(rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let (v, w) = lipschitz_dual_sup(&pts, &[0.0, 0.0], 1.0).unwrap();
            let (pair, bx) = w.violations();
            assert!(pair < 1e-9 && bx < 1e-9);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn self_distance_vanishes() {
        let mu = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, 0.01).unwrap();
        let ball = Ball::new(vec![0.1, 0.0], 0.1).unwrap();
        let a = alpha_mu_nu(&mu, &mu, &ball).unwrap();
        assert!(a.value.abs() < 1e-10);
        assert_eq!(a.c_coefficient, c(1.0));
    }

    #[test]
    fn empty_comparison_uses_zero_coefficient() {
        let mu =
            DiscreteMeasure::new(2, 1.0, 0.01, true, vec![Atom::new(vec![0.0, 0.0], 1.0)]).unwrap();
        let empty = DiscreteMeasure::empty(2, 1.0, 0.01).unwrap();
        let ball = Ball::new(vec![0.0, 0.0], 0.5).unwrap();
        let a = alpha_mu_nu(&mu, &empty, &ball).unwrap();
        assert_eq!(a.c_coefficient, c(0.0));
        // one atom of weight 1/r at the center: f = 4.
        assert!((a.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn no_admissible_candidate_is_an_error() {
        let mu = make_segment_measure(&[0.0, 0.0], &[1.0, 0.0], 1.0, 0.01).unwrap();
        let far = make_segment_measure(&[0.0, 5.0], &[1.0, 0.0], 1.0, 0.01).unwrap();
        let ball = Ball::new(vec![0.0, 0.0], 0.1).unwrap();
        let k = Kernel::riesz(1.0, 2).unwrap();
        assert!(matches!(
            alpha_general(&mu, &ball, &[far], &k, None),
            Err(Error::NoAdmissibleCandidate(_))
        ));
    }
}
