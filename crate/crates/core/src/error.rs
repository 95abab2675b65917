use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A sampled function does not decay at the ends of its grid.
    #[error("truncation: |f| = {value:e} at the grid boundary exceeds tolerance {tol:e}")]
    Truncation { value: f64, tol: f64 },

    #[error("under-resolved: {0}")]
    Resolution(String),

    #[error("{what} did not converge after {iterations} steps (last increment {last_increment:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        last_increment: f64,
    },

    #[error("outside the domain of definition: {0}")]
    Domain(String),

    /// Newton iteration for an eigenvalue diverged; `trace` holds the iterates.
    #[error("eigenvalue solve failed at xi = {xi}: {reason}")]
    Eigen {
        xi: Complex64,
        reason: String,
        trace: Vec<Complex64>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// A row of an experiment failed; `h` identifies it.
    #[error("h = {h}: {source}")]
    AtScale {
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn at_scale(self, h: f64) -> Self {
        Error::AtScale {
            h,
            source: Box::new(self),
        }
    }
}
