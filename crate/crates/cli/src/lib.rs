//! Configuration, orchestration and file output for the `dfs` command-line
//! runner.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{load_config, parse_config, to_toml, ConfigError, ExperimentConfig, ProtocolKind};
pub use output::{timeseries_csv, write_timeseries, FinalStateReport, SummaryRow, TableReport, TIMESERIES_HEADER};
pub use runner::{dfs_structure, run_experiment, run_table, search, table_presets, CliError};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "DFS_WORKERS";
