//! Library side of the `arl` command: tower files, commands and reports.

pub mod commands;
pub mod error;
pub mod file;

pub use error::CliError;
