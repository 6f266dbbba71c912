use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments does not hold.
    #[error("invalid input: {0}")]
    Input(String),

    /// The kernel was evaluated at the origin.
    #[error("kernel undefined at the origin")]
    KernelAtOrigin,

    /// An average over a set of zero mass was requested.
    #[error("undefined average: {0}")]
    UndefinedAverage(String),

    #[error("parse error in {path} at line {line}, column {column} (field `{field}`): {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },

    #[error("transport solver failed: {0}")]
    Solver(String),

    /// The comparison family had no admissible member, so the infimum is +inf.
    #[error("no admissible comparison measure: {0}")]
    NoAdmissibleCandidate(String),

    /// None of the three branches of the density/reflection alternative could be verified.
    #[error(
        "alternative failed: reflection defect at scale 1 = {refl_scale_1:.3e}, \
         at Θ scale = {refl_theta:.3e}, density = {density:.3e} (tolerances {defect_tol:.3e} / {density_bound:.3e})"
    )]
    AlternativeFailed {
        refl_scale_1: f64,
        refl_theta: f64,
        density: f64,
        defect_tol: f64,
        density_bound: f64,
    },

    #[error("invalid scenario: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command line front end: 2 for configuration and
    /// input problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Config(_) | Error::Io { .. } => 2,
            Error::KernelAtOrigin
            | Error::UndefinedAverage(_)
            | Error::Solver(_)
            | Error::NoAdmissibleCandidate(_)
            | Error::AlternativeFailed { .. } => 3,
        }
    }
}
