use thiserror::Error;

/// Errors produced by grid construction, norm evaluation, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A stated hypothesis failed; the message names the violated inequality.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("field contains non-finite values")]
    NonFinite,

    /// The admissible parameter window is empty; endpoints are reported.
    #[error("empty parameter window: {0}")]
    EmptyWindow(String),

    #[error("exponential overflow in nonlinearity evaluation")]
    Overflow,

    #[error("solution diverged at t = {t}")]
    Diverged { t: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
