use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed audio file: {0}")]
    Format(String),

    #[error("unsupported audio encoding: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A grid point lies in no covering interval.
    #[error("covering gap at grid point {location}")]
    CoveringGap { location: usize },

    #[error("weight centers not separated: {0}")]
    Separation(String),

    #[error("hop {hop} does not divide signal length {length}")]
    Tiling { hop: usize, length: usize },

    #[error("window {index}: length {length} exceeds channel count {channels}")]
    PainlessViolation {
        index: usize,
        length: usize,
        channels: usize,
    },

    /// The frame diagonal vanishes somewhere, so no dual exists.
    #[error("system is not a frame: {0}")]
    NotAFrame(String),

    #[error("synthesis output is not real: imaginary residue {residue:e} relative")]
    SymmetryViolation { residue: f64 },

    #[error("cannot schedule gap {gap_index} ({start}..{end}): {reason}")]
    Scheduling {
        gap_index: usize,
        start: usize,
        end: usize,
        reason: String,
    },

    #[error("power-law fit failed: {0}")]
    Fit(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<hound::Error> for Error {
    fn from(err: hound::Error) -> Self {
        match err {
            hound::Error::IoError(e) => Error::Io(e),
            hound::Error::FormatError(msg) => Error::Format(msg.to_string()),
            hound::Error::Unsupported => Error::Unsupported("codec not supported".into()),
            hound::Error::TooWide => Error::Unsupported("sample width too large".into()),
            other => Error::Format(other.to_string()),
        }
    }
}
