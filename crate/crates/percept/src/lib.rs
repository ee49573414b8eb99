//! File formats, batch processing and the `percept` command-line front-end
//! for [`percept_core`].
//!
//! Each pipeline stage reads its inputs, computes everything in memory and
//! only then writes comma-separated machine files (full precision) and an
//! aligned plain-text report (two decimals) into the output directory.

#![warn(missing_docs)]

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use config::StudyConfig;
pub use error::{PerceptError, Result};
pub use formats::{load_ratings, FeatureTable};
pub use pipeline::{run_pipeline, Command, Outputs};
pub use report::ReportTable;
