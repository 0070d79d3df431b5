use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: String },

    #[error("{func}: argument outside the supported region ({detail})")]
    Region { func: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("table size {requested} exceeds the configured budget {budget}")]
    Capacity { requested: u64, budget: u64 },

    #[error("contour quadrature did not converge: tail estimate {tail:e} exceeds {tol:e}")]
    Convergence { tail: f64, tol: f64 },

    #[error("quadrature failed to reach {target:e} (estimated error {achieved:e})")]
    Quadrature { target: f64, achieved: f64 },

    #[error("series truncation {needed} exceeds cap {cap}")]
    Truncation { needed: u64, cap: u64 },

    #[error("accuracy fault: {0}")]
    Accuracy(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
