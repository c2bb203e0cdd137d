use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dynamics diverged (non-finite state) at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("nudged solve {index} failed: {source}")]
    PathSolve {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("continuous sweep diverged at period {period}, point {point}")]
    SweepDiverged { period: usize, point: usize },

    #[error("fixed point did not converge (residual {residual:.3e} after {iterations} steps)")]
    NotConverged { residual: f64, iterations: usize },

    #[error("epoch {epoch}, batch {batch}: {source}")]
    Training {
        epoch: usize,
        batch: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is singular (zero pivot at column {column})")]
    Singular { column: usize },

    #[error("matrix is ill-conditioned (1-norm condition estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },

    #[error("state size {size} exceeds dense limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("idx format: {0}")]
    Idx(String),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in the file system.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::PathSolve { source, .. } | Error::Training { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
