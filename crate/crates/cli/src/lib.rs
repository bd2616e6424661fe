//! Command-line front end for `dephaselab-core`: configuration records,
//! figure presets, and the subcommands that turn them into CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod table;

pub use commands::{apply_grid, run, Command, Output, Report};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
