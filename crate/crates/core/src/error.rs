use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frame dimensions must be nonzero")]
    EmptyFrame,

    #[error("pixel data length {len} does not match {width}x{height}")]
    BadPixelCount {
        len: usize,
        width: usize,
        height: usize,
    },

    #[error("mask labels must be 0 or 255, found {0}")]
    BadLabel(u8),

    #[error(
        "dimension mismatch: got {got_width}x{got_height}, expected {want_width}x{want_height}"
    )]
    DimensionMismatch {
        got_width: usize,
        got_height: usize,
        want_width: usize,
        want_height: usize,
    },

    #[error("buffer length {buffer} does not match state pixel count {state}")]
    BufferLength { buffer: usize, state: usize },

    #[error("worker lanes must be a power of two (got {0}); unroll widths other than 2^n waste resources")]
    BadLaneCount(usize),

    #[error("filter size {size} must be odd, >= 1 and <= min({width}, {height})")]
    BadFilterSize {
        size: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("no timing samples to aggregate")]
    EmptyTimings,

    #[error("no metrics for method `{method}` in category `{category}`")]
    MissingRankEntry { method: String, category: String },

    #[error("no input frames in {0}")]
    EmptySequence(PathBuf),

    #[error("{path}: {source}")]
    ImageFile {
        path: PathBuf,
        source: image::ImageError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid_config(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
