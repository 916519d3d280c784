use std::path::PathBuf;

/// Errors produced anywhere in the estimation chain.
#[derive(Debug, thiserror::Error)]
pub enum EnfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("signal too short: need more than {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },

    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("failed to read audio from {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("covariance is not positive definite (prediction error {alpha:e} at order {order})")]
    NotPositiveDefinite { order: usize, alpha: f64 },

    #[error("Capon denominator is not positive at grid bin {bin} (value {value:e})")]
    DegenerateDenominator { bin: usize, value: f64 },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("no frames: signal of {samples} samples is shorter than one frame of {frame_len}")]
    NoFrames { samples: usize, frame_len: usize },
}

pub type Result<T, E = EnfError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> EnfError {
    EnfError::InvalidArgument(msg.into())
}
