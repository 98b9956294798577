//! File formats and command implementations behind the `leakline` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod telemetry;
pub mod units;

pub use error::CliError;
