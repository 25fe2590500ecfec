//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transform length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("oversampling factor {factor} is invalid for a frame of {len} subcarriers")]
    InvalidOversample { factor: usize, len: usize },
    #[error("PAPR is undefined for an all-zero signal")]
    ZeroSignal,
    #[error("bit stream length {len} is odd; QPSK consumes two bits per symbol")]
    OddBitCount { len: usize },
    #[error("expected {expected} data symbols, got {got}")]
    DataLengthMismatch { expected: usize, got: usize },
    #[error("invalid pilot layout: {0}")]
    InvalidLayout(String),
    #[error("subcarrier position {position} is out of range or duplicated (frame length {len})")]
    InvalidPosition { position: usize, len: usize },
    #[error("index {value} is outside [1, {max}] for wrap-around arithmetic")]
    IndexOutOfRange { value: usize, max: usize },
    #[error("candidate set holds {found} locations, need at least {needed}")]
    InsufficientCandidates { found: usize, needed: usize },
    #[error("invalid detection config: {0}")]
    InvalidDetectionConfig(String),
    #[error("invalid experiment config: {0}")]
    InvalidExperiment(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    ConfigFile { path: PathBuf, message: String },
}
