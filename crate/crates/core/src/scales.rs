//! Scale selection: thin shells, reduction to doubling scales and the averaging scale.
//!
//! The numeric powers of two that fix radii in the classical statements (`2^10` shells,
//! `32·r0` reflection windows, `2^6·Θ` averaging scales, `2^50·Θ·r0` density windows) are
//! fields of [`ScaleParams`], so desk-scale runs can shrink them and record what they used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::measures::{Ball, DiscreteMeasure};
use crate::symmetry::{nearest_reflection_point, ReflectionPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleParams {
    /// Enlargement `M`, even and at least 4.
    pub m: u32,
    /// Descent ratio `A > 1`.
    pub a: f64,
    /// Density threshold `ε`.
    pub eps: f64,
    /// Transportation threshold.
    pub alpha_thresh: f64,
    /// Target accuracy `δ`.
    pub delta: f64,
    /// Reflection constant `Θ` (for `K_k`, `2/sin(π/k)`).
    pub theta: f64,
    /// Reflection search radius is `reflection_radius · r0`.
    pub reflection_radius: f64,
    /// Symmetry is checked in `B(x̃, reflection_factor · Θ · radius)`.
    pub reflection_factor: f64,
    /// `R = 2^theta_scale_pow · Θ` in the second reflection branch.
    pub theta_scale_pow: i32,
    /// Low-density window `B(x, 2^density_pow · Θ · r0)`.
    pub density_pow: i32,
    /// Low density means `D ≤ density_const · ε`.
    pub density_const: f64,
    /// Reflection defect tolerance; `None` means `10·resolution/radius`.
    #[serde(default)]
    pub defect_tol: Option<f64>,
}

impl ScaleParams {
    /// The constants of the classical argument: `A = 2^30·Θ`, windows `32·r0`, `64·Θ`,
    /// `2^6·Θ` and `2^50·Θ·r0`.
    pub fn classical(theta: f64) -> Self {
        Self {
            m: 1 << 12,
            a: 2f64.powi(30) * theta,
            eps: 1e-3,
            alpha_thresh: 1e-3,
            delta: 1e-2,
            theta,
            reflection_radius: 32.0,
            reflection_factor: 64.0,
            theta_scale_pow: 6,
            density_pow: 50,
            density_const: 1.0,
            defect_tol: None,
        }
    }

    /// Small constants for quick desk runs.
    pub fn coarse(theta: f64) -> Self {
        Self {
            m: 4,
            a: 4.0,
            eps: 0.1,
            alpha_thresh: 0.1,
            delta: 0.1,
            theta,
            reflection_radius: 2.0,
            reflection_factor: 2.0,
            theta_scale_pow: 1,
            density_pow: 2,
            density_const: 1.0,
            defect_tol: None,
        }
    }

    /// Intermediate constants that keep every window inside a unit-size support.
    pub fn fine(theta: f64) -> Self {
        Self {
            m: 8,
            a: 2.0,
            eps: 0.05,
            alpha_thresh: 0.05,
            delta: 0.05,
            theta,
            reflection_radius: 4.0,
            reflection_factor: 4.0,
            theta_scale_pow: 2,
            density_pow: 4,
            density_const: 1.0,
            defect_tol: None,
        }
    }

    /// `coarse`, `default` (the classical constants) or `fine`.
    pub fn preset(name: &str, theta: f64) -> Result<Self> {
        match name {
            "coarse" => Ok(Self::coarse(theta)),
            "default" => Ok(Self::classical(theta)),
            "fine" => Ok(Self::fine(theta)),
            other => Err(Error::input(format!(
                "unknown preset `{other}` (coarse, default, fine)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.m < 4 || self.m % 2 != 0 {
            bad.push(format!("m = {} must be even and at least 4", self.m));
        }
        if !(self.a > 1.0) {
            bad.push(format!("a = {} must exceed 1", self.a));
        }
        for (name, v) in [
            ("eps", self.eps),
            ("alpha_thresh", self.alpha_thresh),
            ("delta", self.delta),
        ] {
            if !(v > 0.0 && v < 1.0) {
                bad.push(format!("{name} = {v} must lie in (0, 1)"));
            }
        }
        if !(self.theta > 0.0
            && self.reflection_radius > 0.0
            && self.reflection_factor > 0.0
            && self.density_const > 0.0)
        {
            bad.push(
                "theta, reflection_radius, reflection_factor and density_const must be positive"
                    .into(),
            );
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }
}

/// `|μ|(B(x, ρ))` for many radii from one sorted distance table.
struct RadialMass {
    dists: Vec<f64>,
    prefix: Vec<f64>,
}

impl RadialMass {
    fn new(mu: &DiscreteMeasure, x: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = mu
            .atoms()
            .iter()
            .map(|a| (geometry::dist(&a.position, x), a.weight.norm()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = Vec::with_capacity(pairs.len() + 1);
        prefix.push(0.0);
        for p in &pairs {
            prefix.push(prefix.last().unwrap() + p.1);
        }
        Self {
            dists: pairs.into_iter().map(|p| p.0).collect(),
            prefix,
        }
    }

    /// Mass of the open ball.
    fn mass(&self, rho: f64) -> f64 {
        self.prefix[self.dists.partition_point(|&d| d < rho)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinShell {
    /// The even integer `M′`.
    pub m_prime: u64,
    pub j: u64,
    /// `|μ|(B(x, (M′+u)r) \ B(x, (M′−u)r))`.
    pub annulus_mass: f64,
    /// `(2/M)·|μ|(B(x, 2^11 M r))`.
    pub bound: f64,
}

/// Thin shell with the classical unit `u = 2^10`.
pub fn find_thin_shell(mu: &DiscreteMeasure, x: &[f64], r: f64, m: u32) -> Result<ThinShell> {
    find_thin_shell_with_unit(mu, x, r, m, 1024)
}

/// First `j ∈ 1..=M/2` whose annulus `B(x,(M + 2ju)r) \ B(x,(M + 2(j−1)u)r)` carries at most
/// `(2/M)|μ|(B(x, 2uMr))`; returns `M′ = M + (2j − 1)u`. The annuli are disjoint and lie
/// in the big ball, so one of them qualifies; if rounding defeats the scan the lightest
/// annulus is returned.
pub fn find_thin_shell_with_unit(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    m: u32,
    unit: u64,
) -> Result<ThinShell> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::input(format!(
            "M = {m} must be a positive even integer"
        )));
    }
    if !(r > 0.0) || unit == 0 {
        return Err(Error::input("need r > 0 and a positive shell unit"));
    }
    if x.len() != mu.dim() {
        return Err(Error::input("point and measure dimensions differ"));
    }
    let radial = RadialMass::new(mu, x);
    let (mf, u) = (m as f64, unit as f64);
    let bound = 2.0 / mf * radial.mass(2.0 * u * mf * r);
    let annulus = |j: u64| {
        let outer = (mf + 2.0 * j as f64 * u) * r;
        let inner = (mf + 2.0 * (j - 1) as f64 * u) * r;
        radial.mass(outer) - radial.mass(inner)
    };
    let mut lightest = (f64::INFINITY, 1);
    for j in 1..=(m as u64 / 2) {
        let mass = annulus(j);
        if mass <= bound {
            return Ok(ThinShell {
                m_prime: m as u64 + (2 * j - 1) * unit,
                j,
                annulus_mass: mass,
                bound,
            });
        }
        if mass < lightest.0 {
            lightest = (mass, j);
        }
    }
    let j = lightest.1;
    Ok(ThinShell {
        m_prime: m as u64 + (2 * j - 1) * unit,
        j,
        annulus_mass: lightest.0,
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublingCase {
    /// The descent stopped at a doubling scale.
    Case1Doubling,
    /// The density at the starting radius already exceeds `ε`.
    Case2Dense,
    /// Mass decayed geometrically down to the resolution floor (or vanished).
    AbsolutelyConvergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingOutcome {
    pub r0: f64,
    pub case: DoublingCase,
    /// Levels descended: the non-doubling inequality held for `ℓ = 0..levels`.
    pub levels: u32,
    /// Whether `D(B(x, A r0)) ≤ A·D(B(x, r0))` holds (up to `1e-12·D`).
    pub doubling_holds: bool,
    /// `D(B(x, r/A^ℓ))` for the levels examined.
    pub densities: Vec<f64>,
}

/// Descends `r, r/A, r/A², …` while `D(B(x, r/A^ℓ)) > A·D(B(x, r/A^{ℓ+1}))`.
///
/// Returns `r0 = r` when `D(B(x, r)) ≥ ε`. Otherwise the first level `L` where the strict
/// inequality fails gives `r0 = r/A^{L+1}`, which is doubling by construction. Reaching the
/// resolution floor, or a level with no mass, reports absolute convergence.
pub fn reduce_to_doubling(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    p: &ScaleParams,
) -> Result<DoublingOutcome> {
    p.validate()?;
    if x.len() != mu.dim() {
        return Err(Error::input("point and measure dimensions differ"));
    }
    if r < 2.0 * mu.resolution() * p.a {
        return Err(Error::input(format!(
            "r = {r} is below 2·resolution·A = {}",
            2.0 * mu.resolution() * p.a
        )));
    }
    let radial = RadialMass::new(mu, x);
    let s = mu.s();
    let density = |rho: f64| radial.mass(rho) / rho.powf(s);
    let doubling = |r0: f64| {
        let (big, small) = (density(p.a * r0), density(r0));
        big <= p.a * small + 1e-12 * big.max(small)
    };
    let d0 = density(r);
    let mut densities = vec![d0];
    if d0 >= p.eps {
        return Ok(DoublingOutcome {
            r0: r,
            case: DoublingCase::Case2Dense,
            levels: 0,
            doubling_holds: doubling(r),
            densities,
        });
    }
    let floor = 2.0 * mu.resolution();
    let mut level = 0u32;
    loop {
        let here = r / p.a.powi(level as i32);
        let next = here / p.a;
        if densities[level as usize] == 0.0 || next < floor {
            return Ok(DoublingOutcome {
                r0: here,
                case: DoublingCase::AbsolutelyConvergent,
                levels: level,
                doubling_holds: false,
                densities,
            });
        }
        let d_next = density(next);
        densities.push(d_next);
        if densities[level as usize] > p.a * d_next {
            level += 1;
            continue;
        }
        return Ok(DoublingOutcome {
            r0: next,
            case: DoublingCase::Case1Doubling,
            levels: level,
            doubling_holds: doubling(next),
            densities,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingBranch {
    ReflAtScale1,
    ReflAtThetaScale,
    LowDensity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragingChoice {
    pub x_tilde: Vec<f64>,
    /// Averaging scale factor `R`; the auxiliary `γ` equals `1/R`.
    pub big_r: f64,
    pub branch: AveragingBranch,
    /// Reflection defect used to decide the branch, if a reflection branch was taken.
    pub defect: Option<f64>,
    /// `D_μ(B(x, 2^density_pow Θ r0))`.
    pub density: f64,
    pub defect_tol: f64,
}

/// Chooses `(x̃, R)` from the reflection/low-density alternative.
///
/// The `ν` atom nearest to `x` within `r0` is tested for a nearby reflection point at
/// radius `reflection_radius·r0`: symmetry there gives `R = 1`; symmetry about a support
/// point within `Θ` times that radius gives `R = 2^theta_scale_pow·Θ`. Otherwise the
/// density of μ on `B(x, 2^density_pow·Θ·r0)` must be at most `density_const·ε`. The caller
/// is responsible for `ν` being a good transport comparison for μ near `x`.
pub fn choose_averaging_scale(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    x: &[f64],
    r0: f64,
    p: &ScaleParams,
) -> Result<AveragingChoice> {
    p.validate()?;
    if x.len() != mu.dim() || nu.dim() != mu.dim() {
        return Err(Error::input("point and measure dimensions differ"));
    }
    if !(r0 > 0.0) {
        return Err(Error::input("r0 must be positive"));
    }
    let window = Ball::new(x.to_vec(), 2f64.powi(p.density_pow) * p.theta * r0)?;
    let density = mu.ball_variation(&window) / window.radius.powf(mu.s());
    let small = p.reflection_radius * r0;
    let tol = p.defect_tol.unwrap_or(10.0 * nu.resolution() / small);

    let mut defect_at_scale_1 = f64::INFINITY;
    let support: Vec<_> = nu
        .atoms()
        .iter()
        .filter(|a| a.weight.norm() > 0.0)
        .collect();
    let nearest = support
        .iter()
        .map(|a| (geometry::dist(&a.position, x), &a.position))
        .filter(|(d, _)| *d < r0)
        .min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((_, z)) = nearest {
        match nearest_reflection_point(nu, z, small, p.theta, p.defect_tol, p.reflection_factor)? {
            ReflectionPoint::AtX { defect } => {
                return Ok(AveragingChoice {
                    x_tilde: z.clone(),
                    big_r: 1.0,
                    branch: AveragingBranch::ReflAtScale1,
                    defect: Some(defect),
                    density,
                    defect_tol: tol,
                })
            }
            ReflectionPoint::At { point, defect } => {
                return Ok(AveragingChoice {
                    x_tilde: point,
                    big_r: 2f64.powi(p.theta_scale_pow) * p.theta,
                    branch: AveragingBranch::ReflAtThetaScale,
                    defect: Some(defect),
                    density,
                    defect_tol: tol,
                })
            }
            ReflectionPoint::None { defect_at_x } => defect_at_scale_1 = defect_at_x,
        }
    }
    let density_bound = p.density_const * p.eps;
    if density <= density_bound {
        return Ok(AveragingChoice {
            x_tilde: x.to_vec(),
            big_r: 1.0,
            branch: AveragingBranch::LowDensity,
            defect: None,
            density,
            defect_tol: tol,
        });
    }
    Err(Error::AlternativeFailed {
        refl_scale_1: defect_at_scale_1,
        refl_theta: f64::INFINITY,
        density,
        defect_tol: tol,
        density_bound,
    })
}
