//! File formats and command dispatch for the `qsylv` binary.

pub mod app;
pub mod format;

pub use app::{run, Cli, Outcome};
