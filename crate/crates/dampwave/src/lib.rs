//! File formats, reports and the command-line runner on top of
//! `dampwave-core`.
//!
//! Commands: `simulate` (backward Euler, trajectory CSV, report JSON, exit 2
//! on a violated certificate), `constants` and `check-decay`.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod segment;
pub mod table;

pub use error::{Error, Result};
