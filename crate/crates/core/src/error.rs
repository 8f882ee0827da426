use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("n = {n} exceeds the exact oracle bound {bound}")]
    OracleBound { n: u64, bound: u64 },

    #[error("residue of {k}!*S({n},{k}) is zero modulo 2^{bits}; raise the precision ceiling")]
    PrecisionExceeded { n: u64, k: u32, bits: u32 },

    #[error("no 2-adic zero extends to modulus 2^{bits}")]
    NoRoot { bits: u32 },

    #[error("2-adic zero is not unique at modulus 2^{bits}")]
    NonUnique { bits: u32 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's arguments rather than by the
    /// limits of a computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::NotPrime(_) | Error::InvalidArgument(_) | Error::OracleBound { .. } | Error::Parse(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
