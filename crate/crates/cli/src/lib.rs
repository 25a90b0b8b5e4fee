//! File formats, the pipeline driver and the `trapchain` command line on top
//! of `trapchain-core`.

pub mod commands;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use error::CliError;
