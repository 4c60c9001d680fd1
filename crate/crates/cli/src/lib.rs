//! Scenario runner behind the `lambda-mb` binary: config parsing, canned
//! scenarios, and the analytic / dressing / numeric pipelines with their
//! checks and on-disk artifacts.

pub mod config;
pub mod run;
pub mod scenarios;

pub use config::{parse_config, ConfigError, Engine, ScenarioConfig};
pub use run::{execute, run_scenario, RunOptions, RunOutcome};
