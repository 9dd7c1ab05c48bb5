//! Configuration, subcommands and file output for the `spinjump` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;

pub use config::{ConfigBuilder, RunConfig};
pub use error::{CliError, Result};
