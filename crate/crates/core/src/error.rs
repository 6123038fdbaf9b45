//! Error type shared by all solver and diagnostics modules.

use thiserror::Error;

/// Errors raised by parameter validation, the solver, and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    /// The u-v mapping requires 0 <= gamma < 1.
    #[error("mapping theorem hypothesis violated: gamma = {0} is outside [0, 1)")]
    GammaOutOfRange(f64),

    /// A parameter failed its domain check.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A field value that must be nonnegative was negative (solver undershoot).
    #[error("negative field value {value:e} at cell {index}")]
    NegativeValue { index: usize, value: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    /// Picard iteration did not converge within the allowed iterations.
    #[error("implicit step failed to converge: residual {residual:e} after {iters} iterations")]
    StepFailure { residual: f64, iters: usize },

    /// The adaptive time step shrank below the abort floor.
    #[error("time step underflow at t = {t}: dt = {dt:e} below floor {floor:e}")]
    DtUnderflow { t: f64, dt: f64, floor: f64 },

    /// The solution reached the boundary guard band, so the Neumann
    /// boundaries would start to influence the run.
    #[error("solution reached the boundary guard at t = {t}: v = {value:e} within {cells} cells of x = {side}")]
    BoundaryContact {
        t: f64,
        value: f64,
        cells: usize,
        side: f64,
    },

    /// A diagnostic was asked for data the trajectory does not contain.
    #[error("diagnostic input error: {0}")]
    DiagnosticInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A report file failed to parse back.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
