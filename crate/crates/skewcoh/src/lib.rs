//! File formats, reports, the parallel verify runner and the command
//! implementations behind the `skewcoh` binary.

pub mod commands;
pub mod error;
pub mod formats;
pub mod observable_spec;
pub mod verify;

pub use error::CliError;
