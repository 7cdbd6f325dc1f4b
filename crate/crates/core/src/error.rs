use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("model evaluation produced a non-finite value in {0}")]
    ModelEvaluation(&'static str),

    #[error("inner Newton solve failed to converge at step {step} (residual {residual:e})")]
    StepFailure { step: usize, residual: f64 },

    #[error("state blew up at step {step}")]
    BlowUp { step: usize },

    #[error("linear solve failed at step {step}: {reason}")]
    LinearSolve { step: usize, reason: String },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("objective became non-finite at {phase} iteration {iteration}")]
    NonFiniteObjective { phase: &'static str, iteration: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attaches a time step to a linear-solve failure raised by a
    /// factorisation that does not know its step.
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Error::LinearSolve { reason, .. } => Error::LinearSolve { step, reason },
            other => Error::LinearSolve {
                step,
                reason: other.to_string(),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
