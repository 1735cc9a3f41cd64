use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use so3_synergy_cli::{cmd_certify, cmd_simulate, cmd_sweep, exit, presets, CliError, RunConfig};

/// Synergistic potential families on SO(3): certification, tracking simulation and sweeps.
///
/// Exit codes: 0 success, 1 configuration error, 2 certification failed,
/// 3 non-finite simulation state, 4 I/O error.
#[derive(Parser)]
#[command(name = "so3syn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every unwanted critical point and check the refined gap against the hysteresis.
    Certify(Common),
    /// Run the configured controllers and write per-run CSV logs and a summary.
    Simulate(Common),
    /// Tabulate the gap bound and the certified gap over a grid of gains.
    Sweep(Common),
    /// List presets, or print one as TOML.
    Presets {
        name: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (see `so3syn presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: the config's `output_dir`, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the simulation seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, PathBuf), CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                RunConfig::parse(&text).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                    other => other,
                })?
            }
            (None, Some(name)) => presets::get(name)?,
            (None, None) => unreachable!("clap requires --config or --preset"),
        };
        if let (Some(seed), Some(sim)) = (self.seed, cfg.simulation.as_mut()) {
            sim.seed = seed;
        }
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((cfg, out))
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Certify(c) => {
            let (cfg, out) = c.load()?;
            let report = cmd_certify(&cfg, &out)?;
            println!(
                "item {}: certified min refined gap {:.6} over {} critical points (delta_bar {:.6})",
                report.item,
                report.min_refined_gap,
                report.critical_points,
                report.delta_bar.iter().copied().fold(f64::INFINITY, f64::min)
            );
        }
        Command::Simulate(c) => {
            let (cfg, out) = c.load()?;
            let logs = cmd_simulate(&cfg, &out)?;
            print!("{}", so3_synergy_cli::commands::summary_table(&logs));
        }
        Command::Sweep(c) => {
            let (cfg, out) = c.load()?;
            let rows = cmd_sweep(&cfg, &out)?;
            println!("{} rows written to {}", rows.len(), out.join(so3_synergy_cli::commands::SWEEP_FILE).display());
        }
        Command::Presets { name: None } => {
            for n in presets::NAMES {
                println!("{n}");
            }
        }
        Command::Presets { name: Some(n) } => print!("{}", presets::get(&n)?.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
