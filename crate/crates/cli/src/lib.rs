//! Command-line front end: configuration files, subcommands and CSV artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_steady_state, cmd_sweep, SweepKind, SweepRequest};
pub use config::{load_config, parse_config, ConfigFile};
pub use error::{CliError, ExitStatus};
pub use output::{parse_sweep_csv, ParsedSweep};
