//! Crate error type.

use thiserror::Error;

/// Errors produced by the simulation and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (non-finite, out of range, wrong length).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A mode index addressed a mode the state does not have.
    #[error("mode index {index} out of range for {n_modes} mode(s)")]
    ModeIndex { index: usize, n_modes: usize },

    /// A two-mode operation was given the same mode twice.
    #[error("two-mode operation requires distinct modes, got {0} twice")]
    EqualModes(usize),

    /// Covariance matrix too ill-conditioned to evaluate a density.
    #[error("degenerate state: covariance condition number {cond:.3e} exceeds {limit:.1e}")]
    DegenerateState { cond: f64, limit: f64 },

    /// A root search found no half-sensitivity crossing.
    #[error("unbounded bandwidth: sensitivity never falls to half its peak below omega = {searched_up_to:.3e}")]
    UnboundedBandwidth { searched_up_to: f64 },

    /// Adaptive quadrature failed to converge to the requested tolerance.
    #[error(
        "quadrature did not converge: achieved tolerance {achieved:.3e}, requested {requested:.3e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// The scan-rate profile was not unimodal on the search grid.
    #[error(
        "scan rate not unimodal over kappa_m; {n_maxima} local maxima on the grid: {grid_dump}"
    )]
    NonUnimodal { n_maxima: usize, grid_dump: String },

    /// Not enough data to run an estimator.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Configuration file problem (parse error or failed validation).
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem problem while emitting artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A statistical acceptance check failed (measured spectrum out of tolerance).
    #[error("statistical acceptance failure: {0}")]
    StatisticalFailure(String),
}

/// Shorthand used across modules for parameter validation failures.
pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
