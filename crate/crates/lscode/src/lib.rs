//! Std companion to `lscode-core`: run configuration, artifact formats and
//! the `lscode` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod kv;

pub use config::{load_config, parse_config, RunConfig};
pub use error::{CliError, CliResult, ConfigError};
