//! Command-line driver for `memsq-core`: density-matrix and series file
//! formats, run manifests, and rayon-parallel sweeps whose output does not
//! depend on the worker count.

pub mod cli;
pub mod error;
pub mod format;
pub mod manifest;
pub mod parallel;

pub use cli::run;
pub use error::{CliError, Result};
