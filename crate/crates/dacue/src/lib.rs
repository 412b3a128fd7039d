//! File formats, experiment harness and command line for `dacue-core`.

pub mod cli;
pub mod error;
pub mod eval;
pub mod formats;

pub use error::{Error, Result};
