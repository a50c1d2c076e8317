//! Command-line surface for the `polyadic` library.

pub mod commands;
pub mod formats;
pub mod render;

pub use commands::{run, CliError, Options, Verb};
