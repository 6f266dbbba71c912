//! Finite atomic measures and the canonical families used throughout the lab.
//!
//! A [`DiscreteMeasure`] stands in for a Borel measure in `R^d`. Besides its atoms it
//! carries the dimension parameter `s` used to normalise densities and a resolution `h`,
//! the spacing of the quadrature it came from. Scale-dependent quantities are only
//! meaningful for radii `r ≥ 2h`.
//!
//! Balls are open throughout: an atom at distance exactly `r` from the center is outside
//! `B(x, r)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;

/// Relative tolerance for unit-length and orthonormality checks on generator inputs.
const BASIS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub position: Vec<f64>,
    pub weight: Complex64,
}

impl Atom {
    pub fn new(position: Vec<f64>, weight: impl Into<Complex64>) -> Self {
        Self {
            position,
            weight: weight.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    s: f64,
    resolution: f64,
    nonneg: bool,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Builds a measure, checking the type invariants. `nonneg` is a tag: when set, every
    /// weight must be real and non-negative.
    pub fn new(
        dim: usize,
        s: f64,
        resolution: f64,
        nonneg: bool,
        atoms: Vec<Atom>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("ambient dimension must be at least 1"));
        }
        if !(s > 0.0 && s < dim as f64) {
            return Err(Error::input(format!(
                "dimension parameter s = {s} must lie in (0, {dim})"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::input(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atom.position.len() != dim {
                return Err(Error::input(format!(
                    "atom {i} has {} coordinates, expected {dim}",
                    atom.position.len()
                )));
            }
            if !geometry::is_finite(&atom.position) {
                return Err(Error::input(format!("atom {i} has a non-finite position")));
            }
            if !(atom.weight.re.is_finite() && atom.weight.im.is_finite()) {
                return Err(Error::input(format!("atom {i} has a non-finite weight")));
            }
            if nonneg && (atom.weight.im != 0.0 || atom.weight.re < 0.0) {
                return Err(Error::input(format!(
                    "atom {i} has weight {} but the measure is tagged non-negative",
                    atom.weight
                )));
            }
        }
        Ok(Self {
            dim,
            s,
            resolution,
            nonneg,
            atoms,
        })
    }

    /// The zero measure.
    pub fn empty(dim: usize, s: f64, resolution: f64) -> Result<Self> {
        Self::new(dim, s, resolution, true, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// True when every weight is real (imaginary part exactly zero).
    pub fn is_real(&self) -> bool {
        self.atoms.iter().all(|a| a.weight.im == 0.0)
    }

    pub fn total_mass(&self) -> Complex64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Same atoms with a different dimension parameter.
    pub fn with_s(mut self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s < self.dim as f64) {
            return Err(Error::input(format!(
                "dimension parameter s = {s} must lie in (0, {})",
                self.dim
            )));
        }
        self.s = s;
        Ok(self)
    }

    /// Multiplies every weight by `factor`. The non-negative tag survives only for real
    /// non-negative factors.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let nonneg = self.nonneg && factor.im == 0.0 && factor.re >= 0.0;
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.position.clone(), a.weight * factor))
                .collect(),
            nonneg,
            ..self.clone()
        }
    }

    /// Concatenation of the atom lists (the sum of the two measures). The resolution is the
    /// coarser of the two.
    pub fn sum(&self, other: &DiscreteMeasure) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::input(
                "cannot add measures of different ambient dimension",
            ));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Self::new(
            self.dim,
            self.s,
            self.resolution.max(other.resolution),
            self.nonneg && other.nonneg,
            atoms,
        )
    }

    /// Atoms inside the open ball.
    pub fn restrict(&self, ball: &Ball) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .filter(|a| ball.contains(&a.position))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// `μ(B(x, r))` for the open ball.
    pub fn ball_mass(&self, ball: &Ball) -> Complex64 {
        self.atoms
            .iter()
            .filter(|a| ball.contains(&a.position))
            .map(|a| a.weight)
            .sum()
    }

    /// `|μ|(B(x, r))`.
    pub fn ball_variation(&self, ball: &Ball) -> f64 {
        self.atoms
            .iter()
            .filter(|a| ball.contains(&a.position))
            .map(|a| a.weight.norm())
            .sum()
    }

    /// `D_μ(B(x, r)) = μ(B(x, r)) / r^s`.
    pub fn density(&self, ball: &Ball) -> Complex64 {
        self.ball_mass(ball) / ball.radius.powf(self.s)
    }

    /// `I_μ(B(x, r)) = Σ w φ(|x − p| / r)` with the fixed bump [`bump`].
    pub fn smoothed_mass(&self, ball: &Ball) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * bump(geometry::dist(&a.position, &ball.center) / ball.radius))
            .sum()
    }

    /// Largest value of `|μ|(B(x, r)) / r^s` over atom-centered balls with `r` in
    /// `[r_min, r_max]`.
    ///
    /// For a fixed center the ratio is piecewise `C / r^s` between consecutive atom
    /// distances, so the supremum is attained either at `r_min` or approached as `r`
    /// decreases to a breakpoint distance `d` from above, where the open ball already
    /// contains every atom at distance `d`. The returned witness ball has radius `r_min` or
    /// that breakpoint `d`; in the second case the value is the right limit at `d`.
    pub fn growth_ratio_sup(&self, r_min: f64, r_max: f64) -> Result<(f64, Ball)> {
        if r_min < self.resolution {
            return Err(Error::input(format!(
                "r_min = {r_min} is below the measure resolution {}",
                self.resolution
            )));
        }
        if !(r_max >= r_min) {
            return Err(Error::input(format!(
                "r_max = {r_max} must be at least r_min = {r_min}"
            )));
        }
        let mut best = (0.0_f64, Ball::new(vec![0.0; self.dim], r_min)?);
        let mut first = true;
        let mut dists: Vec<(f64, f64)> = Vec::with_capacity(self.atoms.len());
        for center in &self.atoms {
            dists.clear();
            dists.extend(self.atoms.iter().map(|a| {
                (
                    geometry::dist(&a.position, &center.position),
                    a.weight.norm(),
                )
            }));
            dists.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut consider = |value: f64, radius: f64| {
                if first || value > best.0 {
                    first = false;
                    best = (
                        value,
                        Ball {
                            center: center.position.clone(),
                            radius,
                        },
                    );
                }
            };

            let mut mass_open = 0.0;
            let mut i = 0;
            // Mass strictly inside r_min.
            while i < dists.len() && dists[i].0 < r_min {
                mass_open += dists[i].1;
                i += 1;
            }
            consider(mass_open / r_min.powf(self.s), r_min);
            let mut mass_closed = mass_open;
            while i < dists.len() && dists[i].0 < r_max {
                let d = dists[i].0;
                while i < dists.len() && dists[i].0 == d {
                    mass_closed += dists[i].1;
                    i += 1;
                }
                consider(mass_closed / d.powf(self.s), d);
            }
        }
        Ok(best)
    }

    /// `μ_{x,r} = μ(r · + x) / r^s`: positions map to `(p − x)/r`, weights to `w / r^s`.
    pub fn rescale(&self, x: &[f64], r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::input(format!(
                "rescale radius must be positive, got {r}"
            )));
        }
        if x.len() != self.dim {
            return Err(Error::input("rescale center has the wrong dimension"));
        }
        let factor = r.powf(self.s);
        Ok(Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| {
                    Atom::new(
                        a.position.iter().zip(x).map(|(p, c)| (p - c) / r).collect(),
                        a.weight / factor,
                    )
                })
                .collect(),
            resolution: self.resolution / r,
            ..self.clone()
        })
    }

    /// Image under the point reflection `p ↦ 2z − p`.
    pub fn reflected(&self, z: &[f64]) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(geometry::reflect(&a.position, z), a.weight))
                .collect(),
            ..self.clone()
        }
    }

    /// Index of the atom closest to `x` (ties resolved by lowest index).
    pub fn nearest_atom(&self, x: &[f64]) -> Option<(usize, f64)> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (i, geometry::dist(&a.position, x)))
            .fold(None, |best, cur| match best {
                Some(b) if b.1 <= cur.1 => Some(b),
                _ => Some(cur),
            })
    }
}

/// Open ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::input(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if !geometry::is_finite(&center) {
            return Err(Error::input("ball center must be finite"));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        geometry::dist(p, &self.center) < self.radius
    }

    /// Same center, radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            center: self.center.clone(),
            radius: self.radius * factor,
        }
    }
}

/// Parameters of a k-spike `c · Σ_{n<m} H¹ on ω + e^{i(θ + πn/m)} R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeParams {
    pub k: u32,
    pub m: u32,
    pub angle: f64,
    pub vertex: [f64; 2],
    pub scale: f64,
}

impl SpikeParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k % 2 == 0 {
            return Err(Error::input(format!(
                "spike order k = {} must be odd",
                self.k
            )));
        }
        if self.m == 0 || self.k % self.m != 0 {
            return Err(Error::input(format!(
                "m = {} must divide k = {}",
                self.m, self.k
            )));
        }
        if !(0.0..PI).contains(&self.angle) {
            return Err(Error::input(format!(
                "spike angle {} must lie in [0, π)",
                self.angle
            )));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::input(format!(
                "spike scale {} must be non-negative",
                self.scale
            )));
        }
        if !(self.vertex[0].is_finite() && self.vertex[1].is_finite()) {
            return Err(Error::input("spike vertex must be finite"));
        }
        Ok(())
    }

    /// Angles of the m lines.
    pub fn line_angles(&self) -> Vec<f64> {
        (0..self.m)
            .map(|n| self.angle + PI * n as f64 / self.m as f64)
            .collect()
    }
}

/// The bump `φ`: 1 on `[0, 3]`, the quintic smoothstep `q(4 − t)` on `(3, 4)` with
/// `q(u) = 6u⁵ − 15u⁴ + 10u³`, and 0 from 4 on. It is C², takes values in `[0, 1]` and has
/// Lipschitz constant 15/8.
pub fn bump(t: f64) -> f64 {
    if t <= 3.0 {
        1.0
    } else if t < 4.0 {
        let u = 4.0 - t;
        u * u * u * (10.0 + u * (6.0 * u - 15.0))
    } else {
        0.0
    }
}

/// Lipschitz constant of [`bump`].
pub const BUMP_LIPSCHITZ: f64 = 15.0 / 8.0;

fn grid_half_count(extent: f64, h: f64) -> i64 {
    // Tolerate floating error when extent is an exact multiple of h.
    (extent / h + 1e-9).floor() as i64
}

fn check_unit(v: &[f64], what: &str) -> Result<()> {
    let n = geometry::norm(v);
    if (n - 1.0).abs() > BASIS_TOL {
        return Err(Error::input(format!(
            "{what} must have unit length, |v| = {n}"
        )));
    }
    Ok(())
}

/// Quadrature of `H¹` restricted to the segment `center + t·direction`, `|t| ≤ half_length`:
/// atoms at `t = k h`, each of weight `h`.
pub fn make_segment_measure(
    center: &[f64],
    direction: &[f64],
    half_length: f64,
    h: f64,
) -> Result<DiscreteMeasure> {
    if !(h > 0.0) || !(half_length > 0.0) {
        return Err(Error::input("segment needs h > 0 and half_length > 0"));
    }
    if center.len() != direction.len() {
        return Err(Error::input(
            "segment center and direction differ in dimension",
        ));
    }
    check_unit(direction, "segment direction")?;
    let k = grid_half_count(half_length, h);
    let atoms = (-k..=k)
        .map(|i| Atom::new(geometry::axpy(center, i as f64 * h, direction), h))
        .collect();
    DiscreteMeasure::new(center.len(), 1.0, h, true, atoms)
}

/// Quadrature of `H^s` on the affine plane `base + span(basis)` over the cube
/// `[−extent, extent]^s` in basis coordinates, grid spacing `h`, weights `h^s`.
pub fn make_plane_measure(
    base: &[f64],
    basis: &[Vec<f64>],
    extent: f64,
    h: f64,
) -> Result<DiscreteMeasure> {
    let s = basis.len();
    if !(1..=2).contains(&s) {
        return Err(Error::input(format!(
            "plane dimension must be 1 or 2, got {s}"
        )));
    }
    if !(h > 0.0) || !(extent > 0.0) {
        return Err(Error::input("plane needs h > 0 and extent > 0"));
    }
    for (i, b) in basis.iter().enumerate() {
        if b.len() != base.len() {
            return Err(Error::input("plane basis vector has the wrong dimension"));
        }
        check_unit(b, "plane basis vector")?;
        for c in &basis[..i] {
            let d = geometry::dot(b, c);
            if d.abs() > BASIS_TOL {
                return Err(Error::input(format!(
                    "plane basis is not orthogonal (dot = {d})"
                )));
            }
        }
    }
    if s == 1 {
        return make_segment_measure(base, &basis[0], extent, h);
    }
    let k = grid_half_count(extent, h);
    let mut atoms = Vec::with_capacity(((2 * k + 1) * (2 * k + 1)) as usize);
    for i in -k..=k {
        for j in -k..=k {
            let p = geometry::axpy(
                &geometry::axpy(base, i as f64 * h, &basis[0]),
                j as f64 * h,
                &basis[1],
            );
            atoms.push(Atom::new(p, h * h));
        }
    }
    DiscreteMeasure::new(base.len(), 2.0, h, true, atoms)
}

/// Quadrature of the spike `c Σ_n H¹` on lines through the vertex. Each line is a segment
/// of half-length `extent` around the vertex with spacing `h` and weights `c·h`; the atoms
/// within `h/2` of the vertex (one per line) are merged into a single atom.
pub fn make_spike_measure(p: &SpikeParams, extent: f64, h: f64) -> Result<DiscreteMeasure> {
    p.validate()?;
    if !(h > 0.0) || !(extent > 0.0) {
        return Err(Error::input("spike needs h > 0 and extent > 0"));
    }
    let k = grid_half_count(extent, h);
    let w = p.scale * h;
    let mut atoms = Vec::with_capacity((p.m as usize) * (2 * k as usize + 1));
    let mut vertex_weight = 0.0;
    for angle in p.line_angles() {
        let dir = geometry::unit2(angle);
        for i in -k..=k {
            let pos = geometry::axpy(&p.vertex, i as f64 * h, &dir);
            if geometry::dist(&pos, &p.vertex) < h / 2.0 {
                vertex_weight += w;
            } else {
                atoms.push(Atom::new(pos, w));
            }
        }
    }
    atoms.push(Atom::new(p.vertex.to_vec(), vertex_weight));
    DiscreteMeasure::new(2, 1.0, h, true, atoms)
}

/// Four-corner Cantor set in `[0, side]²`: at every level each square keeps its four corner
/// sub-squares of a quarter of the side. Atoms sit at the centers of the level squares.
pub fn make_cantor4_measure(level: u32, side: f64) -> Result<DiscreteMeasure> {
    if !(1..=10).contains(&level) {
        return Err(Error::input(format!("Cantor level {level} outside 1..=10")));
    }
    if !(side > 0.0) {
        return Err(Error::input("Cantor side must be positive"));
    }
    let mut corners: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut cell = side;
    for _ in 0..level {
        let sub = cell / 4.0;
        let offset = cell - sub;
        corners = corners
            .iter()
            .flat_map(|c| {
                [
                    [c[0], c[1]],
                    [c[0] + offset, c[1]],
                    [c[0], c[1] + offset],
                    [c[0] + offset, c[1] + offset],
                ]
            })
            .collect();
        cell = sub;
    }
    let weight = side * 4f64.powi(-(level as i32));
    let atoms = corners
        .into_iter()
        .map(|c| Atom::new(vec![c[0] + cell / 2.0, c[1] + cell / 2.0], weight))
        .collect();
    DiscreteMeasure::new(2, 1.0, cell, true, atoms)
}

/// Planar segment of half-length `half_length` along `e₁` through `center`, each atom
/// displaced along `e₂` by `amplitude · sin(2π t / wavelength)`.
pub fn make_perturbed_segment(
    center: &[f64; 2],
    half_length: f64,
    h: f64,
    amplitude: f64,
    wavelength: f64,
) -> Result<DiscreteMeasure> {
    if !(wavelength > 0.0) {
        return Err(Error::input("perturbation wavelength must be positive"));
    }
    let flat = make_segment_measure(center, &[1.0, 0.0], half_length, h)?;
    if amplitude == 0.0 {
        return Ok(flat);
    }
    let atoms = flat
        .atoms()
        .iter()
        .map(|a| {
            let t = a.position[0] - center[0];
            let dy = amplitude * (2.0 * PI * t / wavelength).sin();
            Atom::new(vec![a.position[0], a.position[1] + dy], a.weight)
        })
        .collect();
    DiscreteMeasure::new(2, 1.0, h, true, atoms)
}
