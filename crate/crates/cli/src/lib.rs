//! Library half of the `gtp` binary: experiment configuration, the
//! simulate/parse/analyze commands, and the verification suites. Kept as
//! a library so integration tests drive the exact code the binary runs.

pub mod commands;
pub mod config;
pub mod verify;

/// Boxed error for the CLI layer; core errors and message strings both
/// convert into it.
pub type CliError = Box<dyn std::error::Error>;
