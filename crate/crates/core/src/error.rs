use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid bounds for {param}: {reason}")]
    InvalidBounds { param: &'static str, reason: String },

    #[error("invalid initialization strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate susceptibility (denominator {denominator:e})")]
    DegenerateSusceptibility { denominator: f64 },

    #[error("simulation failed at step {step}: {reason}")]
    SimulationFailed { step: usize, reason: String },

    #[error("all {count} samples are identical ({value})")]
    DegenerateSample { count: usize, value: f64 },

    #[error("not enough samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: expected at least 3 data rows, found {rows}")]
    EmptyData { path: PathBuf, rows: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by input data or files rather than by numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::EmptyData { .. }
                | Error::Io { .. }
                | Error::Format { .. }
                | Error::InvalidCurve(_)
                | Error::InvalidParams(_)
                | Error::InvalidBounds { .. }
                | Error::InvalidStrategy(_)
                | Error::InvalidConfig(_)
        )
    }
}
