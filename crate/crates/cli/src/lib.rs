//! Config files, CSV traces and the `viscofix` subcommands on top of
//! `viscofix-core`.

pub mod commands;
pub mod config;
pub mod trace_csv;

pub use commands::CliError;
pub use config::{parse_config, ExperimentConfig};
