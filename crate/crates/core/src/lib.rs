//! Numerical laboratory for s-dimensional Calderón-Zygmund operators acting on finite
//! atomic approximations of Borel measures.
//!
//! The crate is organised around the objects that appear when one asks whether a singular
//! integral exists in the sense of principal value:
//!
//! * [`measures`] builds atomic measures (segments, planes, spikes, the four-corner Cantor
//!   set) and evaluates ball masses, densities and bump-smoothed masses.
//! * [`kernels`] implements the s-Riesz and Huovinen kernels and checks the size,
//!   antisymmetry and smoothness axioms with explicit constants.
//! * [`transforms`] evaluates truncated and smoothly truncated transforms, principal value
//!   traces, ball averages and the operator norm on `L²(μ)`.
//! * [`lipschitz_dual`] computes transportation numbers exactly as Lipschitz-dual linear
//!   programs and minimises them over lines, planes and spikes.
//! * [`symmetry`] checks symmetric points, reflection symmetry and the small-boundary
//!   constant.
//! * [`scales`] holds the thin-shell, doubling-scale and averaging-scale selection.
//! * [`lab`] runs JSON scenarios and writes CSV/JSON artifacts.

pub mod error;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod lab;
pub mod lipschitz_dual;
pub mod measures;
pub mod scales;
pub mod symmetry;
pub mod transforms;

pub use error::{Error, Result};
pub use kernels::{Kernel, KernelValue};
pub use lipschitz_dual::{AlphaResult, Comparison, LipschitzWitness, SearchSpec};
pub use measures::{Atom, Ball, DiscreteMeasure, SpikeParams};
pub use num_complex::Complex64;
