use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("step size underflow at t = {t:.12e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget exhausted at t = {t:.12e}")]
    MaxSteps { t: f64 },

    #[error("integration aborted at t = {t:.12e}: {reason}")]
    Aborted { t: f64, reason: String },

    #[error("quadrature did not reach tolerance on [{a}, {b}] (estimated error {error:.3e})")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("tail integral does not converge (fitted decay exponent {exponent:.4} <= 1)")]
    DivergentTail { exponent: f64 },

    #[error("finite-difference check failed: Richardson disagreement {disagreement:.3e}")]
    FiniteDifference { disagreement: f64 },

    #[error("limit estimate has not converged (tail bound {tail_bound:.3e})")]
    NotConverged { tail_bound: f64 },

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { line: usize, key: String, message: String },

    #[error("unknown descriptor `{0}`")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    /// True for failures of the numerical machinery itself (as opposed to bad
    /// input or a failed certification).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LabError::StepUnderflow { .. }
                | LabError::MaxSteps { .. }
                | LabError::Aborted { .. }
                | LabError::Quadrature { .. }
                | LabError::DivergentTail { .. }
                | LabError::FiniteDifference { .. }
                | LabError::NotConverged { .. }
        )
    }
}
