//! Batch front-end: JSON experiment configs in, CSV/JSON/SVG artifacts out.

pub mod cache;
pub mod config;
pub mod error;
pub mod plot;
pub mod run;

pub use error::{CliError, Result};
