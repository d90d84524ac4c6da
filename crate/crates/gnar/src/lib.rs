//! File formats, parallel drivers and the `gnar` command-line tool built on
//! [`gnar_core`].

pub mod align;
pub mod cli;
pub mod error;
pub mod files;
pub mod numfmt;
pub mod parallel;

pub use error::{CliError, Result};
