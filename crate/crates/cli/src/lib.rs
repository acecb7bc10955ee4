//! File formats, reports, plotting and the command-line interface for
//! `snapkit`.

pub mod cli;
pub mod compare;
pub mod error;
pub mod io;
pub mod path_csv;
pub mod report;
pub mod svg;

pub use error::{CliError, CliResult};
