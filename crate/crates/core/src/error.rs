use std::path::PathBuf;

use thiserror::Error;

use crate::model::ImageSize;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    InvalidSize { width: usize, height: usize },

    #[error("pixel ({x}, {y}) lies outside a {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("expected {expected} pixels, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("score {value} at pixel {index} is outside [0, 1]")]
    ScoreOutOfRange { index: usize, value: f64 },

    #[error("L channel {value} at pixel {index} is outside [0, 100]")]
    LightnessOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: ImageSize, right: ImageSize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid seed at ({x}, {y}): {reason}")]
    InvalidSeed {
        x: usize,
        y: usize,
        reason: &'static str,
    },

    #[error("no high-confidence pixels to sample seeds from")]
    NoHighConfidenceRegion,

    #[error("failed to read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {}: {reason}", path.display())]
    Decode { path: PathBuf, reason: String },

    #[error("unsupported bit depth in {}: {detail}", path.display())]
    UnsupportedDepth { path: PathBuf, detail: String },
}
