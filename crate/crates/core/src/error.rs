use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain (for example `m > n`).
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// Two objects that must describe the same number of parties do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An exhaustive computation was requested beyond its size guard.
    #[error("size guard: {what} supports at most {limit}, requested {requested}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    /// A serialized document could not be read back.
    #[error("malformed input: {0}")]
    Parse(String),

    /// The state does not violate the inequality even without noise, so no
    /// visibility threshold exists.
    #[error("no violation at p=1 (max LHS {max_lhs:.3e}); threshold undefined")]
    NoViolation { max_lhs: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
