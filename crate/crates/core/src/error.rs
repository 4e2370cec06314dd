use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size mismatch: {what} has length {got}, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("singular matrix: zero pivot in column {0}")]
    Singular(usize),

    #[error("newton iteration did not converge after {iterations} iterations (merit {merit:.3e})")]
    NewtonFailed { iterations: usize, merit: f64 },

    #[error("time step underflow at t = {t:.6e} s (dt = {dt:.3e} s)")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("outer iteration did not converge after {iterations} iterations (last update {update:.3e} V)")]
    OuterIterationFailed { iterations: usize, update: f64 },

    #[error("invalid history: {0}")]
    History(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("not converged to steady state: {0}")]
    NotStationary(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}
