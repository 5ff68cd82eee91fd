//! File formats, configs, reports and the command line for the `cindex-core`
//! composite-index engine.

pub mod app;
pub mod config;
pub mod dataset;
mod error;
pub mod report;

pub use config::{load_config, EvaluationConfig};
pub use dataset::{load_dataset, write_dataset};
pub use error::{CliError, Result};
