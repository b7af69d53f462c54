//! Command-line front end for `realbeam`.
//!
//! The binary is a thin wrapper around [`commands::run`]; the studies behind
//! each subcommand are exposed in [`studies`] so they can be exercised
//! without touching the filesystem.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod studies;

pub use cli::Cli;
pub use error::{CliError, CliResult};
