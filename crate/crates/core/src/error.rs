use thiserror::Error;

/// Direction of a divergent quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Positive => f64::INFINITY,
            Sign::Negative => f64::NEG_INFINITY,
        }
    }
}

/// Error type shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("{what} out of domain: {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Input data violates a structural invariant (normalization, lengths, ordering).
    #[error("validation failed: {0}")]
    Validation(String),

    /// The quantity diverges; not a domain violation but an asymptote.
    #[error("{what} diverges to {sign:?} infinity")]
    Divergent { what: &'static str, sign: Sign },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn domain(what: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        reason,
    }
}
