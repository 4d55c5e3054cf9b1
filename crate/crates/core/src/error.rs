use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad IDX magic: expected {expected:#010x}, found {found:#010x}")]
    Format { expected: u32, found: u32 },

    #[error("IDX stream too short: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },

    #[error("IDX stream has {extra} trailing bytes after the payload")]
    TrailingBytes { extra: usize },

    #[error("unexpected image geometry {rows}x{cols}, expected 28x28")]
    Geometry { rows: usize, cols: usize },

    #[error("label {value} at index {index} is outside 0..=9")]
    LabelRange { index: usize, value: u8 },

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("non-finite value: {0}")]
    Numeric(String),

    #[error("training setup: {0}")]
    TrainingSetup(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate score pool: all {0} values are equal")]
    Degenerate(usize),

    #[error("rate not attained for gamma = {gamma}: threshold is at or beyond the support [{min}, {max}]")]
    Unattainable { gamma: f64, min: f64, max: f64 },

    #[error("prefactor undefined: zero tilt (gamma sits at the mean)")]
    PrefactorUndefined,

    #[error("pools are not separated: mu0 = {mu0} >= mu1 = {mu1}")]
    Separation { mu0: f64, mu1: f64 },

    #[error("invalid simulation plan: {0}")]
    Plan(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
