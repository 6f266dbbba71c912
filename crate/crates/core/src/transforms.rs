//! Truncated Calderón-Zygmund transforms of atomic measures.
//!
//! `T_r(σ)(x) = Σ_{|x − y| ≥ r} w·K(x − y)`: the open ball `B(x, r)` is excluded, so an
//! atom sitting at `x` never contributes. Values are [`KernelValue`]s, so Riesz (vector)
//! and Huovinen (complex scalar) outputs share the same arithmetic.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry;
use crate::kernels::{Kernel, KernelValue};
use crate::measures::{Ball, DiscreteMeasure};

fn check_dims(sigma: &DiscreteMeasure, kernel: &Kernel, x: &[f64]) -> Result<()> {
    if kernel.dim() != sigma.dim() || x.len() != sigma.dim() {
        return Err(Error::input(format!(
            "dimension mismatch: measure in R^{}, kernel in R^{}, point in R^{}",
            sigma.dim(),
            kernel.dim(),
            x.len()
        )));
    }
    Ok(())
}

/// Distances within this relative amount of `r` count as lying on the sphere `|x − y| = r`,
/// so mirror-image atoms whose computed distances differ in the last bit are kept together.
const SPHERE_RTOL: f64 = 1e-12;

fn outside(d: f64, r: f64) -> bool {
    d >= r * (1.0 - SPHERE_RTOL)
}

/// `T_r(σ)(x)`.
pub fn truncated_transform(
    sigma: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r: f64,
) -> Result<KernelValue> {
    check_dims(sigma, kernel, x)?;
    if !(r > 0.0) {
        return Err(Error::input(format!(
            "truncation radius must be positive, got {r}"
        )));
    }
    let mut acc = KernelValue::zeros(kernel.output_len());
    let mut diff = vec![0.0; x.len()];
    for a in sigma.atoms() {
        for ((d, xi), p) in diff.iter_mut().zip(x).zip(&a.position) {
            *d = xi - p;
        }
        if outside(geometry::norm(&diff), r) {
            kernel.accumulate(&diff, a.weight, &mut acc.0);
        }
    }
    Ok(acc)
}

/// Radial ramp `η_{κ,r}`: 1 on `[0, r]`, linear down to 0 on `[r, (1+κ)r]`, 0 beyond.
/// Its Lipschitz constant is `1/(κr)`.
pub fn eta(dist: f64, r: f64, kappa: f64) -> f64 {
    if dist <= r {
        1.0
    } else if dist >= (1.0 + kappa) * r {
        0.0
    } else {
        1.0 - (dist - r) / (kappa * r)
    }
}

/// `T([1 − η_{κ,r,x}] σ)(x)`.
pub fn smooth_truncated_transform(
    sigma: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r: f64,
    kappa: f64,
) -> Result<KernelValue> {
    check_dims(sigma, kernel, x)?;
    if !(r > 0.0) || !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::input(format!(
            "need r > 0 and 0 < κ ≤ 1, got r = {r}, κ = {kappa}"
        )));
    }
    let mut acc = KernelValue::zeros(kernel.output_len());
    for a in sigma.atoms() {
        let diff = geometry::sub(x, &a.position);
        let cut = 1.0 - eta(geometry::norm(&diff), r, kappa);
        if cut > 0.0 {
            kernel.accumulate(&diff, a.weight * cut, &mut acc.0);
        }
    }
    Ok(acc)
}

/// Sampled check of the bounded-cutoff estimate: for `ψ = 1 − η_{κ,r}`, which vanishes on
/// `B(0, r)`, the function `y ↦ K(x − y)ψ(|x − y|)` is bounded by `C_K‖ψ‖_∞ / r^s`.
/// Returns `(observed sup, bound)` over `samples` radii in `[r, (1+κ)r + r]`.
pub fn smooth_cutoff_sup(
    kernel: &Kernel,
    r: f64,
    kappa: f64,
    samples: usize,
) -> Result<(f64, f64)> {
    if !(r > 0.0) || !(kappa > 0.0 && kappa <= 1.0) || samples < 2 {
        return Err(Error::input(
            "need r > 0, 0 < κ ≤ 1 and at least two samples",
        ));
    }
    let mut observed = 0.0_f64;
    let mut dir = vec![0.0; kernel.dim()];
    dir[0] = 1.0;
    let hi = (2.0 + kappa) * r;
    for i in 0..samples {
        let t = r + (hi - r) * i as f64 / (samples - 1) as f64;
        let y: Vec<f64> = dir.iter().map(|d| d * t).collect();
        let v = kernel.eval(&y)?.norm() * (1.0 - eta(t, r, kappa));
        observed = observed.max(v);
    }
    Ok((observed, kernel.size_constant() / r.powf(kernel.s())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Converged { limit: KernelValue },
    Oscillating,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformTrace {
    pub x: Vec<f64>,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub values: Vec<KernelValue>,
    /// Largest pairwise distance among the last `tail_window` values.
    pub tail_oscillation: f64,
    /// Entry `j`: largest pairwise distance among `values[j..]`.
    pub cumulative_oscillation: Vec<f64>,
    pub verdict: Verdict,
    #[serde(skip)]
    kernel: Option<Kernel>,
}

fn max_pairwise(values: &[KernelValue]) -> f64 {
    let mut m = 0.0_f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            m = m.max(a.dist(b));
        }
    }
    m
}

impl TransformTrace {
    /// CSV with columns `r`, the value components and `cumulative_oscillation`.
    /// Huovinen values are written as `value_re,value_im`; Riesz values as
    /// `value_x1..value_xd`, split into `_re`/`_im` pairs when any component is complex.
    pub fn to_csv(&self) -> String {
        let len = self.values.first().map_or(0, |v| v.len());
        let complex = self.values.iter().any(|v| !v.is_real());
        let huovinen = matches!(self.kernel, Some(Kernel::Huovinen { .. }));
        let mut header = vec!["r".to_string()];
        if huovinen {
            header.push("value_re".into());
            header.push("value_im".into());
        } else {
            for c in 1..=len {
                if complex {
                    header.push(format!("value_x{c}_re"));
                    header.push(format!("value_x{c}_im"));
                } else {
                    header.push(format!("value_x{c}"));
                }
            }
        }
        header.push("cumulative_oscillation".into());
        let mut out = header.join(",");
        out.push('\n');
        for ((r, v), osc) in self
            .radii
            .iter()
            .zip(&self.values)
            .zip(&self.cumulative_oscillation)
        {
            let mut row = vec![format!("{r}")];
            for z in &v.0 {
                row.push(format!("{}", z.re));
                if huovinen || complex {
                    row.push(format!("{}", z.im));
                }
            }
            row.push(format!("{osc}"));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Principal-value trace `r_j = r_max·ρ^j`, continued while `r_j ≥ 2·resolution`.
///
/// The verdict is `converged` when the tail oscillation is below `tol`, `oscillating` when it
/// exceeds `10·tol` and consecutive tail increments reverse direction at least
/// `tail_window/2` times, and `indeterminate` otherwise.
pub fn transform_trace(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r_max: f64,
    ratio: f64,
    tail_window: usize,
    tol: f64,
) -> Result<TransformTrace> {
    check_dims(mu, kernel, x)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::input(format!(
            "ratio must lie in (0, 1), got {ratio}"
        )));
    }
    if tail_window < 2 {
        return Err(Error::input("tail_window must be at least 2"));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tol must be positive"));
    }
    let floor = 2.0 * mu.resolution();
    let mut radii = Vec::new();
    let mut r = r_max;
    while r >= floor {
        radii.push(r);
        r *= ratio;
    }
    if radii.len() < tail_window {
        return Err(Error::input(format!(
            "trace has {} radii above 2·resolution, fewer than tail_window = {tail_window}",
            radii.len()
        )));
    }

    // Atoms by decreasing distance; each radius adds the atoms with distance ≥ r.
    let mut order: Vec<(f64, usize)> = mu
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (geometry::dist(x, &a.position), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut acc = KernelValue::zeros(kernel.output_len());
    let mut next = 0;
    let mut values = Vec::with_capacity(radii.len());
    for &r in &radii {
        while next < order.len() && outside(order[next].0, r) {
            let a = &mu.atoms()[order[next].1];
            kernel.accumulate(&geometry::sub(x, &a.position), a.weight, &mut acc.0);
            next += 1;
        }
        values.push(acc.clone());
    }

    let n = values.len();
    let mut cumulative = vec![0.0; n];
    for j in (0..n).rev() {
        let here = values[j + 1..]
            .iter()
            .map(|v| v.dist(&values[j]))
            .fold(0.0, f64::max);
        cumulative[j] = if j + 1 < n {
            here.max(cumulative[j + 1])
        } else {
            0.0
        };
    }
    let tail = &values[n - tail_window..];
    let tail_oscillation = max_pairwise(tail);
    let increments: Vec<KernelValue> = tail
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .collect();
    let reversals = increments
        .windows(2)
        .filter(|w| w[0].real_dot(&w[1]) < 0.0)
        .count();
    let verdict = if tail_oscillation < tol {
        Verdict::Converged {
            limit: values[n - 1].clone(),
        }
    } else if tail_oscillation > 10.0 * tol && 2 * reversals >= tail_window {
        Verdict::Oscillating
    } else {
        Verdict::Indeterminate
    };
    Ok(TransformTrace {
        x: x.to_vec(),
        radii,
        values,
        tail_oscillation,
        cumulative_oscillation: cumulative,
        verdict,
        kernel: Some(*kernel),
    })
}

/// `(1/μ(B)) Σ_{y_i ∈ B} w_i Σ_{y_j ∉ B} w_j K(y_i − y_j)`.
pub fn ball_average_transform(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    ball: &Ball,
) -> Result<KernelValue> {
    check_dims(mu, kernel, &ball.center)?;
    let (inside, outside): (Vec<_>, Vec<_>) =
        mu.atoms().iter().partition(|a| ball.contains(&a.position));
    let mass: Complex64 = inside.iter().map(|a| a.weight).sum();
    if mass.norm() == 0.0 {
        return Err(Error::UndefinedAverage(format!(
            "μ(B) = 0 for the ball of radius {} at {:?}",
            ball.radius, ball.center
        )));
    }
    let mut acc = KernelValue::zeros(kernel.output_len());
    for a in &inside {
        for b in &outside {
            kernel.accumulate(
                &geometry::sub(&a.position, &b.position),
                a.weight * b.weight,
                &mut acc.0,
            );
        }
    }
    Ok(acc * (1.0 / mass))
}

/// Number of midpoint nodes on `Q ∈ [4, 8]` used by [`double_average`].
pub const DOUBLE_AVERAGE_NODES: usize = 33;

/// `(1/σ) ∫_4^8 ∫_{B(x̃, QRr₀)} T(χ_{B^c} μ) dμ dQ` with `σ = ∫_4^8 μ(B(x̃, QRr₀)) dQ`, both
/// integrals by the same midpoint rule.
pub fn double_average(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    x_tilde: &[f64],
    big_r: f64,
    r0: f64,
) -> Result<KernelValue> {
    check_dims(mu, kernel, x_tilde)?;
    if r0 < 2.0 * mu.resolution() {
        return Err(Error::input(format!(
            "r0 = {r0} is below twice the resolution {}",
            mu.resolution()
        )));
    }
    if !(big_r > 0.0) {
        return Err(Error::input("R must be positive"));
    }
    let base = big_r * r0;
    let mut num = KernelValue::zeros(kernel.output_len());
    let mut sigma = Complex64::new(0.0, 0.0);
    let step = 4.0 / DOUBLE_AVERAGE_NODES as f64;
    for k in 0..DOUBLE_AVERAGE_NODES {
        let q = 4.0 + (k as f64 + 0.5) * step;
        let ball = Ball::new(x_tilde.to_vec(), q * base)?;
        let (inside, outside): (Vec<_>, Vec<_>) =
            mu.atoms().iter().partition(|a| ball.contains(&a.position));
        let mass: Complex64 = inside.iter().map(|a| a.weight).sum();
        sigma += mass * step;
        let mut inner = KernelValue::zeros(kernel.output_len());
        for a in &inside {
            for b in &outside {
                kernel.accumulate(
                    &geometry::sub(&a.position, &b.position),
                    a.weight * b.weight,
                    &mut inner.0,
                );
            }
        }
        num += &(inner * step);
    }
    if sigma.norm() == 0.0 {
        return Err(Error::UndefinedAverage(format!(
            "σ = 0: no mass within {} of {:?}",
            8.0 * base,
            x_tilde
        )));
    }
    Ok(num * (1.0 / sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DavidMattila {
    /// `|T_r(μ)(x) − T_{A^{−L} r}(μ)(x)|`
    pub lhs: f64,
    /// `C_K Σ_{k=1}^{L} |μ|(B(x, A^{−(k−1)} r)) / (A^{−k} r)^s`
    pub rhs: f64,
    /// Whether `D(B(x, A^{−(ℓ+1)} r)) ≤ D(B(x, A^{−ℓ} r))/A` held for `ℓ = 0..L−2`.
    pub hypothesis_holds: bool,
}

/// Telescoping bound over `L` geometric annuli of ratio `A`.
pub fn david_mattila_pair(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r: f64,
    a: f64,
    levels: u32,
) -> Result<DavidMattila> {
    check_dims(mu, kernel, x)?;
    if !(a > 1.0) || levels == 0 || !(r > 0.0) {
        return Err(Error::input("need A > 1, L ≥ 1 and r > 0"));
    }
    let s = mu.s();
    let radius = |l: u32| r * a.powi(-(l as i32));
    let density = |l: u32| -> Result<f64> {
        let b = Ball::new(x.to_vec(), radius(l))?;
        Ok(mu.ball_variation(&b) / radius(l).powf(s))
    };
    let mut hypothesis_holds = true;
    for l in 0..levels.saturating_sub(1) {
        if density(l + 1)? > density(l)? / a {
            hypothesis_holds = false;
        }
    }
    let lhs = truncated_transform(mu, kernel, x, r)?.dist(&truncated_transform(
        mu,
        kernel,
        x,
        radius(levels),
    )?);
    let mut rhs = 0.0;
    for k in 1..=levels {
        let b = Ball::new(x.to_vec(), radius(k - 1))?;
        rhs += mu.ball_variation(&b) / radius(k).powf(s);
    }
    Ok(DavidMattila {
        lhs,
        rhs: kernel.size_constant() * rhs,
        hypothesis_holds,
    })
}

/// `max |T_r(μ)(x)|` for `r` between the smallest and largest entry of `r_grid`.
///
/// `T_r` only changes where `r` crosses an atom distance, so the grid is refined with every
/// breakpoint in range and the maximum is exact.
pub fn maximal_transform(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    r_grid: &[f64],
) -> Result<f64> {
    check_dims(mu, kernel, x)?;
    let lo = r_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r_grid.iter().cloned().fold(0.0_f64, f64::max);
    if r_grid.is_empty() || !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::input(
            "r_grid must be a non-empty list of positive radii",
        ));
    }
    let mut order: Vec<(f64, usize)> = mu
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (geometry::dist(x, &a.position), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut acc = KernelValue::zeros(kernel.output_len());
    let mut best = 0.0_f64;
    let mut i = 0;
    // Atoms at distance ≥ hi are present at every radius in range.
    while i < order.len() && order[i].0 >= hi {
        let a = &mu.atoms()[order[i].1];
        kernel.accumulate(&geometry::sub(x, &a.position), a.weight, &mut acc.0);
        i += 1;
    }
    best = best.max(acc.norm());
    while i < order.len() && order[i].0 >= lo {
        let d = order[i].0;
        while i < order.len() && order[i].0 == d {
            let a = &mu.atoms()[order[i].1];
            kernel.accumulate(&geometry::sub(x, &a.position), a.weight, &mut acc.0);
            i += 1;
        }
        best = best.max(acc.norm());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when `iters` ran out before the relative change dropped below `1e-8`.
    pub converged: bool,
}

/// Power-iteration estimate of the norm of `f ↦ T_ε(fμ)` on `L²(μ)`.
///
/// Works with `G_c[i,j] = √w_i K_c(p_i − p_j) 1{|p_i − p_j| > ε} √w_j` for each kernel
/// component `c`, iterating `v ↦ Σ_c G_c^H G_c v` from a seeded random start.
pub fn l2_operator_norm(
    mu: &DiscreteMeasure,
    kernel: &Kernel,
    eps: f64,
    iters: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if kernel.dim() != mu.dim() {
        return Err(Error::input("kernel and measure dimensions differ"));
    }
    if !mu.is_nonneg() {
        return Err(Error::input("the L² norm needs a non-negative measure"));
    }
    if eps < 2.0 * mu.resolution() {
        return Err(Error::input(format!(
            "ε = {eps} is below twice the resolution {}",
            mu.resolution()
        )));
    }
    let atoms: Vec<_> = mu.atoms().iter().filter(|a| a.weight.re > 0.0).collect();
    let n = atoms.len();
    if n == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let comps = kernel.output_len();
    let sqrt_w: Vec<f64> = atoms.iter().map(|a| a.weight.re.sqrt()).collect();
    let entry = |i: usize, j: usize, out: &mut [Complex64]| {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let diff = geometry::sub(&atoms[i].position, &atoms[j].position);
        if geometry::norm(&diff) > eps {
            kernel.accumulate(&diff, Complex64::new(sqrt_w[i] * sqrt_w[j], 0.0), out);
        }
    };
    let dense: Option<Vec<Complex64>> = if n * n * comps <= 4_000_000 {
        let mut m = vec![Complex64::new(0.0, 0.0); n * n * comps];
        for i in 0..n {
            for j in 0..n {
                entry(i, j, &mut m[(i * n + j) * comps..(i * n + j + 1) * comps]);
            }
        }
        Some(m)
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    let normalize = |v: &mut Vec<Complex64>| -> f64 {
        let l = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if l > 0.0 {
            v.iter_mut().for_each(|z| *z /= l);
        }
        l
    };
    normalize(&mut v);

    let mut gv = vec![Complex64::new(0.0, 0.0); n * comps];
    let mut buf = vec![Complex64::new(0.0, 0.0); comps];
    let mut lambda = 0.0;
    for it in 1..=iters {
        // gv[c][i] = Σ_j G_c[i,j] v_j
        gv.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                let e: &[Complex64] = match &dense {
                    Some(m) => &m[(i * n + j) * comps..(i * n + j + 1) * comps],
                    None => {
                        entry(i, j, &mut buf);
                        &buf
                    }
                };
                for c in 0..comps {
                    gv[c * n + i] += e[c] * v[j];
                }
            }
        }
        // w_j = Σ_c Σ_i conj(G_c[i,j]) gv[c][i]
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                let e: &[Complex64] = match &dense {
                    Some(m) => &m[(i * n + j) * comps..(i * n + j + 1) * comps],
                    None => {
                        entry(i, j, &mut buf);
                        &buf
                    }
                };
                for c in 0..comps {
                    w[j] += e[c].conj() * gv[c * n + i];
                }
            }
        }
        let next = normalize(&mut w);
        v = w;
        if next == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        if it > 1 && (next - lambda).abs() <= 1e-8 * next {
            return Ok(NormEstimate {
                value: next.sqrt(),
                iterations: it,
                converged: true,
            });
        }
        lambda = next;
    }
    Ok(NormEstimate {
        value: lambda.sqrt(),
        iterations: iters,
        converged: false,
    })
}

/// Off-support continuity estimate: returns `(|T(σ)(x) − T(σ)(x′)|, Σ_i C_smooth |w_i| |x − x′| / |x − y_i|^{s+1})`.
/// Requires `|x − x′| ≤ dist(x, supp σ)/2`.
pub fn point_comparison(
    sigma: &DiscreteMeasure,
    kernel: &Kernel,
    x: &[f64],
    x_prime: &[f64],
) -> Result<(f64, f64)> {
    check_dims(sigma, kernel, x)?;
    if x_prime.len() != x.len() {
        return Err(Error::input("x and x′ have different dimensions"));
    }
    let delta = geometry::dist(x, x_prime);
    let support_dist = sigma
        .atoms()
        .iter()
        .filter(|a| a.weight.norm() > 0.0)
        .map(|a| geometry::dist(x, &a.position))
        .fold(f64::INFINITY, f64::min);
    if delta > 0.5 * support_dist {
        return Err(Error::input(format!(
            "|x − x′| = {delta} exceeds half the distance {support_dist} from x to the support"
        )));
    }
    let mut diff = KernelValue::zeros(kernel.output_len());
    let mut rhs = 0.0;
    let s = kernel.s();
    for a in sigma.atoms() {
        if a.weight.norm() == 0.0 {
            continue;
        }
        kernel.accumulate(&geometry::sub(x, &a.position), a.weight, &mut diff.0);
        kernel.accumulate(&geometry::sub(x_prime, &a.position), -a.weight, &mut diff.0);
        rhs += a.weight.norm() * delta / geometry::dist(x, &a.position).powf(s + 1.0);
    }
    Ok((diff.norm(), kernel.smooth_constant() * rhs))
}
