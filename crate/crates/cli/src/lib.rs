//! Std companion to `eigenbundle`: scenario configs, the `EBF1` field file
//! format, key-value reports and the `ebundle` subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod fieldfile;
pub mod report;

pub use error::{CliError, ExitCode};
