//! Pipeline error type.

use std::path::PathBuf;

use percept_core::{AudioError, FeatureError, MidiError, RegressError, StatsError};

/// Everything that can stop a pipeline run.
#[derive(Debug, thiserror::Error)]
pub enum PerceptError {
    /// Bad configuration or command line; maps to exit status 2.
    #[error("{0}")]
    Usage(String),
    /// File could not be read or written.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Header, row shape or cell content does not match the file schema.
    #[error("{path}:{line}: {message}")]
    Schema {
        /// File involved.
        path: PathBuf,
        /// 1-based line number.
        line: u64,
        /// What is wrong.
        message: String,
    },
    /// Rating outside the configured scale.
    #[error("{path}:{line}: rating {value} outside [{min}, {max}]")]
    OutOfScale {
        /// File involved.
        path: PathBuf,
        /// 1-based line number.
        line: u64,
        /// Offending value.
        value: f64,
        /// Lower scale bound.
        min: f64,
        /// Upper scale bound.
        max: f64,
    },
    /// MIDI parsing or annotation failure.
    #[error("{context}: {source}")]
    Midi {
        /// File or song involved.
        context: String,
        /// Underlying error.
        source: MidiError,
    },
    /// Calibration table failure.
    #[error("{context}: {source}")]
    Feature {
        /// File involved.
        context: String,
        /// Underlying error.
        source: FeatureError,
    },
    /// WAV decoding or spectral analysis failure.
    #[error("{context}: {source}")]
    Audio {
        /// File involved.
        context: String,
        /// Underlying error.
        source: AudioError,
    },
    /// Statistics failure.
    #[error("{context}: {source}")]
    Stats {
        /// Data set involved.
        context: String,
        /// Underlying error.
        source: StatsError,
    },
    /// Model fitting failure.
    #[error("{context}: {source}")]
    Regress {
        /// Model involved.
        context: String,
        /// Underlying error.
        source: RegressError,
    },
    /// Any other data problem.
    #[error("{0}")]
    Data(String),
}

impl PerceptError {
    /// Process exit status: 2 for usage errors, 1 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Self::Schema {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

/// Result alias for the pipeline.
pub type Result<T, E = PerceptError> = std::result::Result<T, E>;
