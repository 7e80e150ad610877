//! Command-line front end for the jammer-mitigation simulator: config
//! loading, presets, parallel sweep execution, and file formats (results
//! CSV, metadata JSON, channel and transform dumps).

pub mod channel_io;
pub mod cli;
pub mod config;
mod error;
pub mod output;
pub mod run;
pub mod transform_io;

pub use cli::parse_and_validate;
pub use error::CliError;
pub use run::execute;
