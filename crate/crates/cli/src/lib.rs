//! Command-line frontend for `qgbound`: configuration, scenarios and table
//! output.

pub mod config;
pub mod emit;
pub mod scenarios;

pub use config::{ConfigError, ConfigFile, ScenarioConfig};
