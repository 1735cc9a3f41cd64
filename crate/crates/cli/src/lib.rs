//! Configuration-driven runner for certification, simulation and parameter sweeps.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;

pub use commands::{cmd_certify, cmd_simulate, cmd_sweep};
pub use config::RunConfig;
pub use error::{exit, CliError};
