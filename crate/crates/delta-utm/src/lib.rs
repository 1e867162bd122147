//! Configuration files, CSV and JSON formats, parallel evaluation and the
//! subcommands behind the `delta-utm` binary.

pub mod commands;
pub mod config;
pub mod io;
pub mod parallel;

pub use config::RunConfig;
