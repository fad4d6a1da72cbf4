use num_complex::Complex64;

/// Crate-wide error type. The CLI maps variants onto exit codes:
/// usage/argument problems → 2, resource/precision limits → 3,
/// verification failures → 1 (reported, not raised).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("construction failed at block {block} (x_k = {x_k}): {reason}")]
    Construction { block: usize, x_k: f64, reason: String },

    #[error("evaluation point within {dist:e} of the singularity at {rho}")]
    PoleProximity { rho: Complex64, dist: f64 },

    #[error("precision: {0}")]
    Precision(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI contract (0 = all-pass is decided by the caller).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Parse { .. } => 2,
            Error::Resource(_) | Error::Precision(_) | Error::Io(_) => 3,
            Error::Construction { .. } | Error::PoleProximity { .. } | Error::Inconclusive(_) => 1,
        }
    }
}
