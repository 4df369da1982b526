use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported constellation order {0} (expected 4 or 16)")]
    UnsupportedOrder(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for {what} of size {size}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("channel matrix is {rows}x{cols}; need at least as many rows as columns")]
    BadShape { rows: usize, cols: usize },

    #[error("channel matrix is rank deficient (|R_kk| = {diag:e} at column {column})")]
    RankDeficient { column: usize, diag: f64 },

    #[error("exhaustive search over {0} candidates exceeds the oracle size guard")]
    OracleTooLarge(u128),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected, actual })
        }
    }
}
