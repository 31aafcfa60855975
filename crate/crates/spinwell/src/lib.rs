//! Configuration, file formats, parallel ensembles and the command line of
//! the `spinwell` simulator. The numerics live in `spinwell-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod snapshot;

pub use config::SimConfig;
pub use error::{ConfigError, Error, Result, SnapshotError};
