use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (tail estimate {tail:e})")]
    NonConvergence { terms: usize, tail: f64 },

    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),

    #[error("finite-difference step {step:e} does not fit inside the ball at |x| = {radius}")]
    Step { step: f64, radius: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("point {index} is not strictly inside the unit ball")]
    OutOfBall { index: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
