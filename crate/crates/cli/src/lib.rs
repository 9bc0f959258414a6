//! Command-line harness around [`vrm_core`]: TOML run configurations, energy
//! sweeps with an optional independent reference column, CSV/plot-data export,
//! reproduction of the embedded reference tables, and the acceptance suite
//! shared between the `check` subcommand and the integration tests.

pub mod acceptance;
pub mod config;
pub mod export;
pub mod runner;
pub mod tables;
