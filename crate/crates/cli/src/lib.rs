//! Command-line front end for the EIT library: JSON scenario configs in,
//! CSV tables and a `summary.json` out.

pub mod config;
pub mod driver;
pub mod error;
pub mod output;
pub mod scenarios;

pub use config::{load_config, parse_config, ScenarioConfig, ScenarioKind};
pub use error::CliError;
