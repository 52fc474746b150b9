//! JSON/CSV formats, the worked-example catalogue, reports and the CLI
//! on top of `graphext-core`.

pub mod catalogue;
pub mod cli;
pub mod error;
pub mod format;
pub mod report;

pub use error::{CliError, Result};
