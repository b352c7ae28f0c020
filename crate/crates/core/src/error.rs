//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by constructors and scan operations.
///
/// All variants indicate a violated precondition; the numerical routines
/// themselves are total once their inputs are validated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scan grid is too coarse.
    #[error("scan needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    /// A scan range is degenerate, reversed, or too short.
    #[error("invalid range [{lo}, {hi}]: {reason}")]
    InvalidRange { lo: f64, hi: f64, reason: String },

    /// A one-photon state failed the normalization check.
    #[error("state is not normalized: |alpha|^2 + |beta|^2 deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },

    /// A mode vector failed the unit-norm check.
    #[error("vector is not unit length: norm deviates from 1 by {deviation:e}")]
    NotUnit { deviation: f64 },

    /// A matrix failed the POVM-element validity checks.
    #[error("not a valid POVM element: {0}")]
    InvalidPovm(String),

    /// The requested integrator step violates the stability bound.
    #[error("time step {dt} exceeds stability bound {bound} (= 0.1/Gamma)")]
    UnstableStep { dt: f64, bound: f64 },

    /// A sampler configuration is inconsistent.
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    /// Column lengths in a scan table disagree.
    #[error("column {name} has {got} rows, table has {expected}")]
    ColumnLength {
        name: String,
        got: usize,
        expected: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
