use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt or undecodable PNG {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported bit depth {bits} in {path}: only 8-bit (or lower) PNGs are accepted")]
    UnsupportedBitDepth { path: PathBuf, bits: u8 },

    #[error("PNG encoding failed for {path}: {message}")]
    Encode { path: PathBuf, message: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error(
        "dimension mismatch: {what} is {found_w}x{found_h}, expected {expected_w}x{expected_h}"
    )]
    DimensionMismatch {
        what: String,
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("invalid k-means parameters: {0}")]
    KMeans(String),

    #[error("invalid pattern: {0}")]
    Pattern(String),

    #[error("no statistics for region label {0}")]
    MissingStats(u32),

    #[error("invalid command template: {0}")]
    Template(String),

    #[error("generator failed: `{command}` exited with {status}\n{stderr}")]
    GeneratorFailed {
        command: String,
        status: String,
        stderr: String,
    },

    #[error("generator could not be started: `{command}`: {source}")]
    GeneratorSpawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("generator produced no output file at {0}")]
    MissingOutput(PathBuf),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True when the error stems from configuration rather than a processing stage.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

pub(crate) fn dims_match(
    what: &str,
    expected: (usize, usize),
    found: (usize, usize),
) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: what.to_string(),
            expected_w: expected.0,
            expected_h: expected.1,
            found_w: found.0,
            found_h: found.1,
        })
    }
}
