//! Numerical laboratory for weighted sup-norm deviations of kernel density
//! estimators.
//!
//! The crate computes the normalized statistic
//!
//! ```text
//! T_n = sqrt(n h^d / (2 |log h^d|)) · sup_t Ψ(t) |f_n(t) - E f_n(t)|
//! ```
//!
//! for compactly supported kernels, analytic density models and weights of
//! the form `Ψ = s · f^{-β}`, together with the competing max term
//! `M_n = ‖K‖_∞ max_i Ψ(X_i) / sqrt(2 n h^d |log h^d|)` and the central
//! constant `‖K‖₂ ‖Ψ f^{1/2}‖_∞`.  A condition checker evaluates the tail
//! and integral criteria that decide stochastic boundedness and the almost
//! sure dichotomy (constant limit versus unbounded limsup, or zero versus
//! unbounded under faster normings), and a seeded Monte Carlo harness
//! verifies the predicted regimes at desk scale.
//!
//! Module map:
//!
//! - [`kernels`]: compactly supported kernels and their exact norms.
//! - [`densities`]: analytic density models, samplers, weight tails.
//! - [`bandwidths`]: bandwidth sequences, normings, regular-variation checks.
//! - [`estimator`]: the estimator, exact expectations, sup-deviation scans.
//! - [`conditions`]: tail/integral condition evaluation and regime verdicts.
//! - [`harness`]: reproducible experiment runner, theory comparison, CSV I/O.

pub mod bandwidths;
pub mod conditions;
pub mod densities;
pub mod estimator;
pub mod exec;
pub mod harness;
pub mod kernels;
pub mod quad;
mod special;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature did not reach tolerance {tol:.3e} on [{lo}, {hi}] (worst interval error {err:.3e})")]
    QuadratureNonConvergence { lo: f64, hi: f64, tol: f64, err: f64 },

    #[error("invalid regime: bandwidth {h} at t = {t} is not in (0, 1)")]
    InvalidBandwidth { t: f64, h: f64 },

    #[error("invalid norming: {0}")]
    InvalidNorming(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for configuration
    /// and validation problems, 3 for runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidParameter(_) | Error::InvalidNorming(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
