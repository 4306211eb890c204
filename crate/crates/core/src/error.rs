use thiserror::Error;

use crate::constants::ThresholdReport;

/// Errors raised anywhere in the library.
///
/// The variants are grouped by how a caller is expected to react; see
/// [`Error::exit_code`] for the mapping used by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parameters outside the admissible regime: {reason}")]
    Regime {
        reason: String,
        thresholds: Option<Box<ThresholdReport>>,
    },

    #[error("grid mismatch: fields live on different radial grids")]
    GridMismatch,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("iterate pinned at the gradient cap |∇u|₂ = {rho0} for {steps} steps")]
    BoundaryTrap { rho0: f64, steps: usize },

    #[error("line search stagnated at iteration {iteration} (residual {residual:.3e})")]
    Stagnation { iteration: usize, residual: f64 },

    #[error("descent left the mountain-pass branch: level {level:.6e} < 0")]
    BranchCapture { level: f64 },

    #[error("shooting bracket for Q(0) not found for t = {t} (last bracket [{lo}, {hi}])")]
    Bracket { t: f64, lo: f64, hi: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn regime(reason: impl Into<String>) -> Self {
        Error::Regime {
            reason: reason.into(),
            thresholds: None,
        }
    }

    /// Process exit code: 2 parameter/regime, 3 solver failure, 4 numeric, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Regime { .. } | Error::GridMismatch => 2,
            Error::Solver(_)
            | Error::BoundaryTrap { .. }
            | Error::Stagnation { .. }
            | Error::BranchCapture { .. }
            | Error::Bracket { .. } => 3,
            Error::NonFinite(_) => 4,
            Error::Io(_) | Error::Serde(_) | Error::Format(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
