//! File formats, reports and command implementations for the `orbicone` binary.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

pub use error::CliError;
