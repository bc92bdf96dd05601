use std::path::PathBuf;

/// Errors produced across the encoding, assembly, sampling and driver layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bit vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },

    #[error("value {value} is outside the representable range [0, {max}]")]
    Range { value: f64, max: f64 },

    #[error("invalid bit value {0}; bits must be 0 or 1")]
    InvalidBit(u8),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero pivot at row {row}; system is singular")]
    Singular { row: usize },

    #[error(
        "exhaustive enumeration of {vars} variables exceeds the cap of {cap}; \
         use the annealing sampler instead"
    )]
    Capacity { vars: usize, cap: usize },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
