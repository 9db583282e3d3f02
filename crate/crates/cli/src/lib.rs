//! Command-line front end: argument parsing, the subcommands and their output formats.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, CliError, Outcome, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use config::{Cli, Command, GammaSpec, OutputFormat, RunConfig};
