use std::path::PathBuf;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not PSD: min eigenvalue {min_eig:e} below threshold {threshold:e}")]
    NotPsd { min_eig: f64, threshold: f64 },

    #[error("rank-deficient ensemble: {0}")]
    RankDeficient(String),

    #[error("ill-posed affine projection: Gram condition estimate {cond_estimate:e} exceeds 1e12")]
    IllPosedProjection { cond_estimate: f64 },

    #[error("eigensolver failed to converge: {0}")]
    EigFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("line search failed to find an acceptable step after {0} iterations")]
    LineSearchFailure(usize),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code used by the CLI: 1 for domain/usage errors, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::Domain(_)
            | Error::Io { .. }
            | Error::Parse { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
