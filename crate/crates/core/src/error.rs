use std::fmt;

/// Errors produced by construction, evaluation and integration routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix argument has the wrong length/shape.
    Dimension { expected: usize, got: usize },

    /// The scale matrix is not symmetric positive definite (Cholesky failed).
    NotPositiveDefinite,

    /// A parameter violates a construction invariant; the message names it.
    InvalidParameter(String),

    /// The requested operation is only defined for a restricted configuration.
    UnsupportedCase(String),

    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance.
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// A parameter file could not be parsed.
    Parse(String),

    /// I/O failure while reading or writing an interface file.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotPositiveDefinite => {
                write!(f, "scale matrix is not symmetric positive definite")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnsupportedCase(msg) => write!(f, "unsupported case: {msg}"),
            Error::QuadratureNonConvergence { achieved, requested } => write!(
                f,
                "quadrature failed to converge: error estimate {achieved:e} > tolerance {requested:e}"
            ),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
