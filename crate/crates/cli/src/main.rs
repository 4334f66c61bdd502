use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use magnon_cli::commands::threads_from_env;
use magnon_cli::{cmd_steady_state, cmd_sweep, ExitStatus, SweepKind, SweepRequest};

/// Steady-state magnon-magnon entanglement in squeezed-driven coupled cavities.
///
/// Exit codes: 0 success, 1 configuration or usage error, 2 unstable system,
/// 3 numerical failure. MAGNON_NUM_THREADS caps sweep parallelism.
#[derive(Parser)]
#[command(name = "magnon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML system configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Echo every resolved parameter to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SweepFlags {
    #[command(flatten)]
    common: Common,
    /// Grid points per axis (default 101 for planes, 201 for curves).
    #[arg(long)]
    points: Option<usize>,
    /// First axis as param:start:stop in file units (degrees for phases, mK for temperature).
    #[arg(long)]
    axis1: Option<String>,
    /// Second axis, same format.
    #[arg(long)]
    axis2: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and report stability, E_N and the covariance matrix.
    SteadyState(Common),
    /// E_N over cavity or magnon detunings (default: both cavity detunings over ±2J).
    SweepDetuning(SweepFlags),
    /// E_N over squeezing phases (default: every present drive over 0..360 deg).
    SweepPhase(SweepFlags),
    /// E_N over squeezing strengths (default: every present drive over 0..2).
    SweepSqueeze(SweepFlags),
    /// E_N over decay rates (default: both cavity decays over 0.05..5 κ_a1).
    SweepDecay(SweepFlags),
    /// E_N over bath temperature (default: 0..600 mK) plus the survival temperature.
    SweepTemperature(SweepFlags),
}

fn sweep(kind: SweepKind, flags: SweepFlags) -> ExitStatus {
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_status();
        }
    };
    let req = SweepRequest {
        config: flags.common.config,
        out: flags.common.out,
        points: flags.points,
        axis1: flags.axis1,
        axis2: flags.axis2,
        verbose: flags.common.verbose,
        threads,
    };
    cmd_sweep(kind, &req)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::ConfigError.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let status = match cli.command {
        Command::SteadyState(c) => cmd_steady_state(&c.config, c.out.as_deref(), c.verbose),
        Command::SweepDetuning(f) => sweep(SweepKind::Detuning, f),
        Command::SweepPhase(f) => sweep(SweepKind::Phase, f),
        Command::SweepSqueeze(f) => sweep(SweepKind::Squeeze, f),
        Command::SweepDecay(f) => sweep(SweepKind::Decay, f),
        Command::SweepTemperature(f) => sweep(SweepKind::Temperature, f),
    };
    ExitCode::from(status.code() as u8)
}
