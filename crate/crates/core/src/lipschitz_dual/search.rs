//! Minimisation of `α_{μ,ν}` over lines, planes and spikes through the center.
//!
//! Every search is a deterministic grid followed by local refinement, so the result is the
//! best value found: an upper bound on the infimum, flagged as such.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{golden_max, AlphaResult, Comparison, LipschitzWitness, Window};
use crate::error::{Error, Result};
use crate::geometry;
use crate::measures::{
    make_plane_measure, make_segment_measure, make_spike_measure, Ball, DiscreteMeasure,
    SpikeParams,
};
use num_complex::Complex64;

/// Grid sizes and tolerances of the family searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpec {
    /// Angles on `[0, π)` for lines in the plane.
    pub theta_grid: usize,
    /// Final bracket width of the golden-section refinement, in radians.
    pub theta_tol: f64,
    /// Comparison lines are discretised with spacing `r / nu_divisor`.
    pub nu_divisor: f64,
    /// Spacing divisor for 2-planes in R³, which carry quadratically many atoms.
    pub nu_divisor_plane: f64,
    /// Subdivision frequency of the icosahedral direction grid (`10 f² + 2` vertices).
    pub sphere_frequency: usize,
    /// Nelder-Mead stops when the simplex is smaller than this, in radians.
    pub nm_tol: f64,
    pub nm_max_iter: usize,
    /// Spike search grid in the line angle and in the vertex offset `t ∈ [−4r, 4r]`.
    pub spike_theta_grid: usize,
    pub spike_t_grid: usize,
    /// Coordinate-descent rounds after the spike grid.
    pub spike_rounds: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            theta_grid: 180,
            theta_tol: 1e-4,
            nu_divisor: 64.0,
            nu_divisor_plane: 8.0,
            sphere_frequency: 8,
            nm_tol: 1e-4,
            nm_max_iter: 80,
            spike_theta_grid: 32,
            spike_t_grid: 17,
            spike_rounds: 3,
        }
    }
}

impl SearchSpec {
    /// A small grid for quick looks and tests.
    pub fn coarse() -> Self {
        Self {
            theta_grid: 36,
            theta_tol: 1e-3,
            nu_divisor: 32.0,
            nu_divisor_plane: 6.0,
            sphere_frequency: 3,
            nm_tol: 1e-3,
            nm_max_iter: 40,
            spike_theta_grid: 12,
            spike_t_grid: 9,
            spike_rounds: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.theta_grid < 3
            || self.spike_theta_grid < 1
            || self.spike_t_grid < 2
            || self.sphere_frequency < 1
        {
            return Err(Error::input("search grids are too small"));
        }
        if !(self.nu_divisor >= 1.0 && self.nu_divisor_plane >= 1.0) {
            return Err(Error::input("spacing divisors must be at least 1"));
        }
        if !(self.theta_tol > 0.0 && self.nm_tol > 0.0) {
            return Err(Error::input("search tolerances must be positive"));
        }
        Ok(())
    }
}

/// Best candidate so far; ties keep the earlier one.
struct Best<P> {
    value: f64,
    witness: Option<LipschitzWitness>,
    c: Complex64,
    params: Option<P>,
    solves: usize,
}

impl<P: Clone> Best<P> {
    fn new() -> Self {
        Self {
            value: f64::INFINITY,
            witness: None,
            c: Complex64::new(0.0, 0.0),
            params: None,
            solves: 0,
        }
    }

    /// Skips the LP when `lower_bound` already exceeds the best value and returns the bound.
    fn offer_bounded(
        &mut self,
        window: &Window,
        nu: &DiscreteMeasure,
        params: P,
        lower_bound: f64,
    ) -> Result<f64> {
        if lower_bound > self.value {
            return Ok(lower_bound);
        }
        self.offer(window, nu, params)
    }

    fn offer(&mut self, window: &Window, nu: &DiscreteMeasure, params: P) -> Result<f64> {
        let (value, witness, c, solves) = window.against(nu)?;
        self.solves += solves;
        if value < self.value {
            self.value = value;
            self.witness = Some(witness);
            self.c = c;
            self.params = Some(params);
        }
        Ok(value)
    }
}

/// Distance from `p` to the patch `base + Σ c_k e_k`, `|c_k| ≤ extent`, for orthonormal `e_k`.
fn dist_to_patch(p: &[f64], base: &[f64], basis: &[Vec<f64>], extent: f64) -> f64 {
    let q = geometry::sub(p, base);
    let mut foot = base.to_vec();
    for e in basis {
        let c = geometry::dot(&q, e).clamp(-extent, extent);
        foot = geometry::axpy(&foot, c, e);
    }
    geometry::dist(p, &foot)
}

/// Grid indices ordered by lower bound, ties by index, so that good candidates are solved
/// first and the rest can be skipped.
fn by_bound(bounds: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..bounds.len()).collect();
    order.sort_by(|&a, &b| bounds[a].total_cmp(&bounds[b]).then(a.cmp(&b)));
    order
}

fn line_measure(x: &[f64], dir: &[f64], r: f64, h: f64) -> Result<DiscreteMeasure> {
    make_segment_measure(x, dir, 4.0 * r + h, h)
}

fn check_floor(mu: &DiscreteMeasure, ball: &Ball, h_nu: f64) -> Result<()> {
    let floor = 2.0 * mu.resolution().max(h_nu);
    if ball.radius < floor {
        return Err(Error::input(format!(
            "radius {} is below twice the resolution ({floor})",
            ball.radius
        )));
    }
    Ok(())
}

/// Lines through the center of a planar ball: angle grid, then golden section.
fn flat_lines_2d(mu: &DiscreteMeasure, ball: &Ball, spec: &SearchSpec) -> Result<(Best<f64>, f64)> {
    let r = ball.radius;
    let h = r / spec.nu_divisor;
    check_floor(mu, ball, h)?;
    let window = Window::new(mu, ball)?;
    let x = &ball.center;
    let mut best = Best::new();
    let ext = 4.0 * r + h;
    let bound = |theta: f64, nu: &DiscreteMeasure| -> Result<f64> {
        let e = vec![geometry::unit2(theta).to_vec()];
        window.lower_bound(nu, &|p| dist_to_patch(p, x, &e, ext))
    };
    let eval = |best: &mut Best<f64>, theta: f64| -> Result<f64> {
        let nu = line_measure(x, &geometry::unit2(theta), r, h)?;
        let lb = bound(theta, &nu)?;
        best.offer_bounded(&window, &nu, theta, lb)
    };
    if window.is_trivial() {
        let nu = line_measure(x, &[1.0, 0.0], r, h)?;
        best.offer(&window, &nu, 0.0)?;
        return Ok((best, h));
    }
    let step = PI / spec.theta_grid as f64;
    let thetas: Vec<f64> = (0..spec.theta_grid).map(|i| i as f64 * step).collect();
    let bounds = thetas
        .iter()
        .map(|&t| bound(t, &line_measure(x, &geometry::unit2(t), r, h)?))
        .collect::<Result<Vec<f64>>>()?;
    for i in by_bound(&bounds) {
        let nu = line_measure(x, &geometry::unit2(thetas[i]), r, h)?;
        best.offer_bounded(&window, &nu, thetas[i], bounds[i])?;
    }
    let centre = best.params.unwrap_or(0.0);
    golden_max(
        |t| eval(&mut best, t).map(|v| -v),
        centre - step,
        centre + step,
        spec.theta_tol,
    )?;
    Ok((best, h))
}

fn plane_result(best: Best<Vec<Vec<f64>>>, x: &[f64], h: f64) -> AlphaResult {
    AlphaResult {
        value: best.value,
        witness: best.witness.expect("at least one candidate evaluated"),
        comparison: Comparison::Plane {
            base: x.to_vec(),
            basis: best.params.expect("at least one candidate evaluated"),
        },
        c_coefficient: best.c,
        quad_spacing: Some(h),
        lp_solves: best.solves,
        upper_bound: true,
        boundary_binding: false,
    }
}

/// Directions of an icosahedral geodesic grid of frequency `f`, one per antipodal pair.
///
/// Vertices of the subdivided icosahedron are projected to the sphere; there are
/// `10 f² + 2` of them, so `5 f² + 1` directions are returned, in a fixed order.
pub fn icosahedral_directions(frequency: usize) -> Vec<[f64; 3]> {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let verts: [[f64; 3]; 12] = [
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let faces: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let f = frequency.max(1);
    let mut points: Vec<[f64; 3]> = Vec::new();
    for face in faces {
        let [a, b, c] = face.map(|i| verts[i]);
        for i in 0..=f {
            for j in 0..=(f - i) {
                let k = f - i - j;
                let (u, v, w) = (
                    i as f64 / f as f64,
                    j as f64 / f as f64,
                    k as f64 / f as f64,
                );
                let p = [
                    u * a[0] + v * b[0] + w * c[0],
                    u * a[1] + v * b[1] + w * c[1],
                    u * a[2] + v * b[2] + w * c[2],
                ];
                let n = geometry::norm(&p);
                let mut q = [p[0] / n, p[1] / n, p[2] / n];
                // Canonical representative of ±q: first nonzero coordinate positive.
                let lead = q.iter().find(|v| v.abs() > 1e-12).copied().unwrap_or(1.0);
                if lead < 0.0 {
                    q = q.map(|v| -v);
                }
                if !points.iter().any(|e| geometry::dist(e, &q) < 1e-9) {
                    points.push(q);
                }
            }
        }
    }
    points
}

/// Nelder-Mead on a function of two variables.
fn nelder_mead<F>(mut f: F, start: [f64; 2], step: f64, tol: f64, max_iter: usize) -> Result<()>
where
    F: FnMut([f64; 2]) -> Result<f64>,
{
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = [f(simplex[0])?, f(simplex[1])?, f(simplex[2])?];
    for _ in 0..max_iter {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);
        let size =
            geometry::dist(&simplex[0], &simplex[1]).max(geometry::dist(&simplex[0], &simplex[2]));
        if size < tol {
            break;
        }
        let centroid = [
            (simplex[0][0] + simplex[1][0]) / 2.0,
            (simplex[0][1] + simplex[1][1]) / 2.0,
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr)?;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(xe)?;
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let xc = along(0.5);
            let fc = f(xc)?;
            if fc < values[2] {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        (simplex[0][0] + simplex[i][0]) / 2.0,
                        (simplex[0][1] + simplex[i][1]) / 2.0,
                    ];
                    values[i] = f(simplex[i])?;
                }
            }
        }
    }
    Ok(())
}

/// Lines (`s = 1`) or planes (`s = 2`) through the center of a ball in R³.
fn flat_3d(
    mu: &DiscreteMeasure,
    ball: &Ball,
    spec: &SearchSpec,
    planes: bool,
) -> Result<AlphaResult> {
    let r = ball.radius;
    let h = if planes {
        r / spec.nu_divisor_plane
    } else {
        r / spec.nu_divisor
    };
    check_floor(mu, ball, h)?;
    let window = Window::new(mu, ball)?;
    let x = &ball.center;
    let mut best: Best<Vec<Vec<f64>>> = Best::new();
    let ext = 4.0 * r + h;
    let candidate = |dir: [f64; 3]| -> Result<(Vec<Vec<f64>>, DiscreteMeasure, f64)> {
        let n = geometry::norm(&dir);
        let dir = dir.map(|v| v / n);
        let basis: Vec<Vec<f64>> = if planes {
            geometry::orthonormal_complement3(&dir)
                .iter()
                .map(|v| v.to_vec())
                .collect()
        } else {
            vec![dir.to_vec()]
        };
        let nu = make_plane_measure(x, &basis, ext, h)?;
        let lb = window.lower_bound(&nu, &|p| dist_to_patch(p, x, &basis, ext))?;
        Ok((basis, nu, lb))
    };
    let eval = |best: &mut Best<Vec<Vec<f64>>>, dir: [f64; 3]| -> Result<f64> {
        let (basis, nu, lb) = candidate(dir)?;
        best.offer_bounded(&window, &nu, basis, lb)
    };
    let dirs = icosahedral_directions(spec.sphere_frequency);
    if window.is_trivial() {
        let (basis, nu, _) = candidate(dirs[0])?;
        best.offer(&window, &nu, basis)?;
        return Ok(plane_result(best, x, h));
    }
    let bounds = dirs
        .iter()
        .map(|d| Ok(candidate(*d)?.2))
        .collect::<Result<Vec<f64>>>()?;
    let mut best_dir = dirs[0];
    let mut best_val = f64::INFINITY;
    for i in by_bound(&bounds) {
        let (basis, nu, lb) = candidate(dirs[i])?;
        let v = best.offer_bounded(&window, &nu, basis, lb)?;
        if v < best_val {
            best_val = v;
            best_dir = dirs[i];
        }
    }
    // Local search in the tangent plane at the best grid direction.
    let [e1, e2] = geometry::orthonormal_complement3(&best_dir);
    let spacing = 1.2 / spec.sphere_frequency as f64;
    nelder_mead(
        |[a, b]| {
            let d = [
                best_dir[0] + a * e1[0] + b * e2[0],
                best_dir[1] + a * e1[1] + b * e2[1],
                best_dir[2] + a * e1[2] + b * e2[2],
            ];
            eval(&mut best, d)
        },
        [0.0, 0.0],
        spacing / 2.0,
        spec.nm_tol,
        spec.nm_max_iter,
    )?;
    Ok(plane_result(best, x, h))
}

/// `α^flat(B) = inf_L α_{μ, x+L}(B)` over affine `s`-planes through the center.
///
/// Supported: lines in R² and R³, planes in R³. The comparison plane is discretised by
/// [`make_plane_measure`] over `B(x, 4r + h_ν)`.
pub fn alpha_flat(mu: &DiscreteMeasure, ball: &Ball, spec: &SearchSpec) -> Result<AlphaResult> {
    spec.validate()?;
    let (d, s) = (mu.dim(), mu.s());
    match (d, s) {
        (2, s) if s == 1.0 => {
            let (best, h) = flat_lines_2d(mu, ball, spec)?;
            let theta = best.params.expect("at least one candidate evaluated");
            Ok(AlphaResult {
                value: best.value,
                witness: best.witness.expect("at least one candidate evaluated"),
                comparison: Comparison::Plane {
                    base: ball.center.clone(),
                    basis: vec![geometry::unit2(theta).to_vec()],
                },
                c_coefficient: best.c,
                quad_spacing: Some(h),
                lp_solves: best.solves,
                upper_bound: true,
                boundary_binding: false,
            })
        }
        (3, s) if s == 1.0 => flat_3d(mu, ball, spec, false),
        (3, s) if s == 2.0 => flat_3d(mu, ball, spec, true),
        _ => Err(Error::input(format!(
            "flat families are available for (s, d) in {{(1, 2), (1, 3), (2, 3)}}, got ({s}, {d})"
        ))),
    }
}

fn divisors(k: u32) -> Vec<u32> {
    (1..=k).filter(|m| k % m == 0).collect()
}

/// Normalises `(θ, t)` so that `θ ∈ [0, π)`; `(θ + π, t)` and `(θ, −t)` give the same spike.
fn normalise(theta: f64, t: f64) -> (f64, f64) {
    let turns = (theta / PI).floor();
    let th = theta - turns * PI;
    let th = if th >= PI { 0.0 } else { th };
    if (turns as i64) % 2 == 0 {
        (th, t)
    } else {
        (th, -t)
    }
}

/// `α^Spike(B) = inf α_{μ,ν}(B)` over k-spikes `ν` whose support contains the center.
///
/// For each divisor `m` of `k` the spike has vertex `ω = x + t·e^{iθ}`, `|t| ≤ 4r`, and
/// lines at angles `θ + πn/m`, so line 0 passes through `x`. For `m = 1` the spike is the
/// line through `x` and the flat line search is reused, so `α^Spike ≤ α^flat` holds by
/// construction. For `m > 1` an angle × offset grid is refined by coordinate descent.
pub fn alpha_spike(
    mu: &DiscreteMeasure,
    ball: &Ball,
    k: u32,
    spec: &SearchSpec,
) -> Result<AlphaResult> {
    spec.validate()?;
    if k % 2 == 0 {
        return Err(Error::input(format!("spike order k = {k} must be odd")));
    }
    if mu.dim() != 2 || mu.s() != 1.0 {
        return Err(Error::input(
            "spike families need a planar measure with s = 1",
        ));
    }
    let r = ball.radius;
    let x = &ball.center;
    let (flat, h) = flat_lines_2d(mu, ball, spec)?;
    let theta = flat.params.expect("at least one candidate evaluated");
    let mut best: Best<(SpikeParams, f64)> = Best {
        value: flat.value,
        witness: flat.witness,
        c: flat.c,
        params: Some((
            SpikeParams {
                k,
                m: 1,
                angle: normalise(theta, 0.0).0,
                vertex: [x[0], x[1]],
                scale: 1.0,
            },
            0.0,
        )),
        solves: flat.solves,
    };

    let window = Window::new(mu, ball)?;
    if !window.is_trivial() {
        for m in divisors(k).into_iter().filter(|&m| m > 1) {
            let candidate =
                |theta: f64, t: f64| -> Result<(SpikeParams, f64, DiscreteMeasure, f64)> {
                    let t = t.clamp(-4.0 * r, 4.0 * r);
                    let (theta, t) = normalise(theta, t);
                    let e = geometry::unit2(theta);
                    let p = SpikeParams {
                        k,
                        m,
                        angle: theta,
                        vertex: [x[0] + t * e[0], x[1] + t * e[1]],
                        scale: 1.0,
                    };
                    let ext = t.abs() + 4.0 * r + h;
                    let nu = make_spike_measure(&p, ext, h)?;
                    let lines: Vec<Vec<f64>> = p
                        .line_angles()
                        .into_iter()
                        .map(|a| geometry::unit2(a).to_vec())
                        .collect();
                    let lb = window.lower_bound(&nu, &|q| {
                        lines
                            .iter()
                            .map(|e| dist_to_patch(q, &p.vertex, std::slice::from_ref(e), ext))
                            .fold(f64::INFINITY, f64::min)
                    })?;
                    Ok((p, t, nu, lb))
                };
            let d_theta = PI / spec.spike_theta_grid as f64;
            let d_t = 8.0 * r / (spec.spike_t_grid - 1) as f64;
            let mut local: Best<(f64, f64)> = Best::new();
            let track = |best: &mut Best<(SpikeParams, f64)>,
                         local: &mut Best<(f64, f64)>,
                         th: f64,
                         t: f64|
             -> Result<f64> {
                let (p, tc, nu, lb) = candidate(th, t)?;
                let v = best.offer_bounded(&window, &nu, (p, tc), lb)?;
                if v < local.value {
                    local.value = v;
                    local.params = Some((th, t));
                }
                Ok(v)
            };
            let grid: Vec<(f64, f64)> = (0..spec.spike_theta_grid)
                .flat_map(|i| {
                    (0..spec.spike_t_grid)
                        .map(move |j| (i as f64 * d_theta, -4.0 * r + j as f64 * d_t))
                })
                .collect();
            let bounds = grid
                .iter()
                .map(|&(th, t)| Ok(candidate(th, t)?.3))
                .collect::<Result<Vec<f64>>>()?;
            for i in by_bound(&bounds) {
                track(&mut best, &mut local, grid[i].0, grid[i].1)?;
            }
            for _ in 0..spec.spike_rounds {
                let before = local.value;
                let (th0, t0) = local.params.expect("grid evaluated");
                golden_max(
                    |th| track(&mut best, &mut local, th, t0).map(|v| -v),
                    th0 - d_theta,
                    th0 + d_theta,
                    spec.theta_tol,
                )?;
                let (th1, t1) = local.params.expect("grid evaluated");
                golden_max(
                    |t| track(&mut best, &mut local, th1, t).map(|v| -v),
                    (t1 - d_t).max(-4.0 * r),
                    (t1 + d_t).min(4.0 * r),
                    spec.theta_tol * r,
                )?;
                if before - local.value <= 1e-9 * before.max(1e-300) {
                    break;
                }
            }
        }
    }

    let (params, t) = best.params.expect("at least one candidate evaluated");
    Ok(AlphaResult {
        value: best.value,
        witness: best.witness.expect("at least one candidate evaluated"),
        comparison: Comparison::Spike { params, t },
        c_coefficient: best.c,
        quad_spacing: Some(h),
        lp_solves: best.solves,
        upper_bound: true,
        boundary_binding: params.m > 1 && t.abs() >= 4.0 * r * (1.0 - 1e-9),
    })
}
