use thiserror::Error;

/// Errors raised by the estimation and detection routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A correlation coefficient fell outside `[-1, 1]` by more than the clamp band.
    #[error("arcsine argument {0} outside [-1, 1]")]
    Domain(f64),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A closed form or estimator was used outside the pilot structure it requires.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// The pilot correlation matrix could not be factored even after regularization.
    #[error("pilot correlation matrix is numerically singular (condition number {condition:.3e})")]
    SingularCorrelation { condition: f64 },

    #[error("internal numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
