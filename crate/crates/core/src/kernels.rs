//! s-Riesz and Huovinen kernels, and sampled checks of the Calderón-Zygmund axioms.
//!
//! The axioms checked are, for every `x, x' ≠ 0`:
//!
//! 1. size: `|K(x)| ≤ C_K |x|^{−s}`;
//! 2. antisymmetry: `K(−x) = −K(x)`;
//! 3. smoothness: `|K(x) − K(x')| ≤ C_smooth |x − x'| / |x|^{s+1}` whenever `|x − x'| ≤ |x|/2`.
//!
//! Both families have `|K(x)| = |x|^{−s}` exactly, so `C_K = 1`. The smoothness constants
//! are explicit upper bounds; the sampled maxima sit well below them (see the tests).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;

/// A kernel value in `C^n`: `n = d` for Riesz, `n = 1` for Huovinen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValue(pub Vec<Complex64>);

impl KernelValue {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean norm in `C^n`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &KernelValue) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Re⟨self, other⟩`, the real inner product on `C^n = R^{2n}`.
    pub fn real_dot(&self, other: &KernelValue) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// True when every component has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im == 0.0)
    }
}

impl Add for KernelValue {
    type Output = KernelValue;
    fn add(mut self, rhs: KernelValue) -> KernelValue {
        self += &rhs;
        self
    }
}

impl AddAssign<&KernelValue> for KernelValue {
    fn add_assign(&mut self, rhs: &KernelValue) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Sub for KernelValue {
    type Output = KernelValue;
    fn sub(mut self, rhs: KernelValue) -> KernelValue {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Mul<Complex64> for KernelValue {
    type Output = KernelValue;
    fn mul(mut self, rhs: Complex64) -> KernelValue {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl Mul<f64> for KernelValue {
    type Output = KernelValue;
    fn mul(mut self, rhs: f64) -> KernelValue {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl Neg for KernelValue {
    type Output = KernelValue;
    fn neg(mut self) -> KernelValue {
        self.0.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

/// An s-dimensional Calderón-Zygmund kernel.
///
/// Serialises as `{"family": "riesz", "s": 1.0, "dim": 2}` or
/// `{"family": "huovinen", "k": 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum Kernel {
    /// `K(x) = x / |x|^{s+1}` on `R^d`.
    Riesz { s: f64, dim: usize },
    /// `K_k(z) = z^k / |z|^{k+1}` on the plane, `k` odd.
    Huovinen { k: u32 },
}

impl Kernel {
    pub fn riesz(s: f64, dim: usize) -> Result<Self> {
        let k = Kernel::Riesz { s, dim };
        k.validate()?;
        Ok(k)
    }

    pub fn huovinen(k: u32) -> Result<Self> {
        let kernel = Kernel::Huovinen { k };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Riesz { s, dim } => {
                if dim == 0 || !(s > 0.0 && s < dim as f64) {
                    return Err(Error::input(format!(
                        "Riesz kernel needs 0 < s < d, got s = {s}, d = {dim}"
                    )));
                }
            }
            Kernel::Huovinen { k } => {
                if k % 2 == 0 {
                    return Err(Error::input(format!(
                        "Huovinen kernel needs odd k, got {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The homogeneity `s`.
    pub fn s(&self) -> f64 {
        match *self {
            Kernel::Riesz { s, .. } => s,
            Kernel::Huovinen { .. } => 1.0,
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match *self {
            Kernel::Riesz { dim, .. } => dim,
            Kernel::Huovinen { .. } => 2,
        }
    }

    /// Number of complex components of a kernel value.
    pub fn output_len(&self) -> usize {
        match *self {
            Kernel::Riesz { dim, .. } => dim,
            Kernel::Huovinen { .. } => 1,
        }
    }

    /// Size-axiom constant `C_K`.
    pub fn size_constant(&self) -> f64 {
        1.0
    }

    /// Smoothness-axiom constant: `max(1, s)·2^{s+1}` for Riesz (the operator norm of the
    /// derivative is `max(1, s)/|ξ|^{s+1}` and `|ξ| ≥ |x|/2` on the segment), `2(k + 1)`
    /// for Huovinen.
    pub fn smooth_constant(&self) -> f64 {
        match *self {
            Kernel::Riesz { s, .. } => s.max(1.0) * 2f64.powf(s + 1.0),
            Kernel::Huovinen { k } => 2.0 * (k as f64 + 1.0),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Kernel::Riesz { s, dim } => format!("riesz(s={s},d={dim})"),
            Kernel::Huovinen { k } => format!("huovinen(k={k})"),
        }
    }

    /// `K(x)`. Fails at the origin.
    pub fn eval(&self, x: &[f64]) -> Result<KernelValue> {
        let mut out = KernelValue::zeros(self.output_len());
        if !self.accumulate(x, Complex64::new(1.0, 0.0), &mut out.0) {
            return Err(Error::KernelAtOrigin);
        }
        Ok(out)
    }

    /// `acc += weight · K(x)`. Returns false (leaving `acc` untouched) when `x = 0`.
    #[inline]
    pub fn accumulate(&self, x: &[f64], weight: Complex64, acc: &mut [Complex64]) -> bool {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return false;
        }
        match *self {
            Kernel::Riesz { s, .. } => {
                let scale = if s == 1.0 {
                    1.0 / r2
                } else {
                    r2.powf(-(s + 1.0) / 2.0)
                };
                for (a, xi) in acc.iter_mut().zip(x) {
                    *a += weight * (xi * scale);
                }
            }
            Kernel::Huovinen { k } => {
                let r = r2.sqrt();
                let u = Complex64::new(x[0] / r, x[1] / r);
                acc[0] += weight * u.powu(k) / r;
            }
        }
        true
    }

    /// `K(x)·|x|^s`, the unit-modulus part of the kernel. Zero at the origin.
    pub fn angular_part(&self, x: &[f64], out: &mut [Complex64]) {
        let r = geometry::norm(x);
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        if r == 0.0 {
            return;
        }
        match *self {
            Kernel::Riesz { .. } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = Complex64::new(xi / r, 0.0);
                }
            }
            Kernel::Huovinen { k } => {
                out[0] = Complex64::new(x[0] / r, x[1] / r).powu(k);
            }
        }
    }
}

/// Worst observed ratios from [`verify_axioms`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub kernel: Kernel,
    pub samples: usize,
    pub seed: u64,
    /// `max |K(x)|·|x|^s`.
    pub size_ratio: f64,
    pub size_witness: Vec<f64>,
    /// `max |K(−x) + K(x)|·|x|^s`.
    pub antisymmetry_defect: f64,
    pub antisymmetry_witness: Vec<f64>,
    /// `max |K(x) − K(x')|·|x|^{s+1}/|x − x'|` over pairs with `|x − x'| ≤ |x|/2`.
    pub smoothness_ratio: f64,
    pub smoothness_witness: (Vec<f64>, Vec<f64>),
    pub size_constant: f64,
    pub smooth_constant: f64,
}

impl AxiomReport {
    /// Size ratio within `1 + tol` of `C_K`, antisymmetry defect below `tol`, smoothness
    /// ratio at most the declared constant.
    pub fn holds(&self, tol: f64) -> bool {
        self.size_ratio <= self.size_constant * (1.0 + tol)
            && self.antisymmetry_defect <= tol
            && self.smoothness_ratio <= self.smooth_constant
    }
}

/// Samples `sample_count` points with `|x|` log-uniform in `radius_range` and uniformly
/// distributed directions, each paired with `x' = x + δ`, `|δ| ≤ |x|/2`. Deterministic in
/// `seed`.
pub fn verify_axioms(
    kernel: &Kernel,
    sample_count: usize,
    radius_range: (f64, f64),
    seed: u64,
) -> Result<AxiomReport> {
    kernel.validate()?;
    if sample_count == 0 {
        return Err(Error::input("verify_axioms needs at least one sample"));
    }
    let (lo, hi) = radius_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::input(format!("invalid radius range ({lo}, {hi})")));
    }
    let d = kernel.dim();
    let s = kernel.s();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        kernel: *kernel,
        samples: sample_count,
        seed,
        size_ratio: 0.0,
        size_witness: vec![],
        antisymmetry_defect: 0.0,
        antisymmetry_witness: vec![],
        smoothness_ratio: 0.0,
        smoothness_witness: (vec![], vec![]),
        size_constant: kernel.size_constant(),
        smooth_constant: kernel.smooth_constant(),
    };
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    for _ in 0..sample_count {
        let radius = (log_lo + (log_hi - log_lo) * rng.gen::<f64>()).exp();
        let x = random_direction(&mut rng, d)
            .into_iter()
            .map(|v| v * radius)
            .collect::<Vec<_>>();
        let step = 0.5 * radius * rng.gen::<f64>();
        let xp = geometry::axpy(&x, step, &random_direction(&mut rng, d));

        let kx = kernel.eval(&x)?;
        let size = kx.norm() * radius.powf(s);
        if size > report.size_ratio {
            report.size_ratio = size;
            report.size_witness = x.clone();
        }
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let anti = (kernel.eval(&neg)? + kx.clone()).norm() * radius.powf(s);
        if anti > report.antisymmetry_defect || report.antisymmetry_witness.is_empty() {
            report.antisymmetry_defect = anti;
            report.antisymmetry_witness = x.clone();
        }
        let sep = geometry::dist(&x, &xp);
        if sep > 0.0 {
            if let Ok(kxp) = kernel.eval(&xp) {
                let ratio = kx.dist(&kxp) * radius.powf(s + 1.0) / sep;
                if ratio > report.smoothness_ratio {
                    report.smoothness_ratio = ratio;
                    report.smoothness_witness = (x.clone(), xp);
                }
            }
        }
    }
    Ok(report)
}

fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        // Box-Muller gaussians give a rotation-invariant direction.
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let n = geometry::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}
