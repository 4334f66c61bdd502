//! Subcommand implementations. Each `cmd_*` function returns the process exit
//! status and prints its human-readable summary to stdout.

use std::path::{Path, PathBuf};

use magnon_core::model::Channel;
use magnon_core::{
    analyze, find_optimum, run_sweep, survival_temperature, DriveConfiguration, Mode, Param, SweepAxis,
    SweepOptions, SweepResult, SystemConfig,
};

use crate::config::{describe, load_config, ConfigFile};
use crate::error::{CliError, ExitStatus, Result};
use crate::output::{fmt_f64, steady_state_report, sweep_csv, write_atomic, AxisMeta, SweepMeta};

/// Environment variable capping sweep parallelism; unset or 0 uses every core.
pub const THREADS_ENV: &str = "MAGNON_NUM_THREADS";

pub const DEFAULT_POINTS_2D: usize = 101;
pub const DEFAULT_POINTS_1D: usize = 201;

/// Resolution of the survival-temperature bisection, in kelvin.
const SURVIVAL_RESOLUTION: f64 = 1e-4;

pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Detuning,
    Phase,
    Squeeze,
    Decay,
    Temperature,
}

impl SweepKind {
    pub fn command(self) -> &'static str {
        match self {
            SweepKind::Detuning => "sweep-detuning",
            SweepKind::Phase => "sweep-phase",
            SweepKind::Squeeze => "sweep-squeeze",
            SweepKind::Decay => "sweep-decay",
            SweepKind::Temperature => "sweep-temperature",
        }
    }

    fn accepts(self, param: Param) -> bool {
        match self {
            SweepKind::Detuning => matches!(param, Param::Detuning(_)),
            SweepKind::Phase => matches!(param, Param::SqueezePhase(_)),
            SweepKind::Squeeze => matches!(param, Param::SqueezeStrength(_)),
            SweepKind::Decay => matches!(param, Param::Decay(_)),
            SweepKind::Temperature => matches!(param, Param::Temperature),
        }
    }

    /// Default axes as `(param, start, stop)` in file units.
    fn default_axes(self, file: &ConfigFile, system: &SystemConfig) -> Result<Vec<(Param, f64, f64)>> {
        let drives: Vec<Channel> = [Channel::First, Channel::Second]
            .into_iter()
            .filter(|&ch| system.drive(ch).is_some())
            .collect();
        Ok(match self {
            SweepKind::Detuning => {
                let j = file.coupling.j;
                if j == 0.0 {
                    return Err(CliError::Usage(
                        "default detuning range is ±2J; pass --axis1/--axis2 when J = 0".into(),
                    ));
                }
                vec![
                    (Param::Detuning(Mode::Cavity1), -2.0 * j, 2.0 * j),
                    (Param::Detuning(Mode::Cavity2), -2.0 * j, 2.0 * j),
                ]
            }
            SweepKind::Phase | SweepKind::Squeeze => {
                if system.configuration() == DriveConfiguration::Unsqueezed {
                    return Err(CliError::Usage(format!(
                        "{} needs at least one [driveN] section",
                        self.command()
                    )));
                }
                drives
                    .into_iter()
                    .map(|ch| match self {
                        SweepKind::Phase => (Param::SqueezePhase(ch), 0.0, 360.0),
                        _ => (Param::SqueezeStrength(ch), 0.0, 2.0),
                    })
                    .collect()
            }
            SweepKind::Decay => {
                let kappa = file.cavity1.decay;
                vec![
                    (Param::Decay(Mode::Cavity1), 0.05 * kappa, 5.0 * kappa),
                    (Param::Decay(Mode::Cavity2), 0.05 * kappa, 5.0 * kappa),
                ]
            }
            SweepKind::Temperature => vec![(Param::Temperature, 0.0, 600.0)],
        })
    }
}

/// File unit label and factor to internal units for a sweep parameter.
pub fn axis_unit(param: Param, file: &ConfigFile) -> Result<(String, f64)> {
    Ok(match param {
        p if p.is_rate() => (file.units.rate_unit.to_string(), file.rate_scale()?),
        Param::SqueezePhase(_) => ("deg".into(), std::f64::consts::PI / 180.0),
        Param::SqueezeStrength(_) => ("1".into(), 1.0),
        Param::Temperature => ("mK".into(), 1e-3),
        _ => unreachable!("every parameter is covered above"),
    })
}

/// Parses `param:start:stop`.
pub fn parse_axis_spec(spec: &str) -> Result<(Param, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [param, start, stop] = parts.as_slice() else {
        return Err(CliError::Usage(format!("axis must look like param:start:stop, got {spec:?}")));
    };
    let param: Param = param.trim().parse()?;
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad number {s:?} in axis {spec:?}")))
    };
    Ok((param, number(start)?, number(stop)?))
}

#[derive(Debug, Clone, Default)]
pub struct SweepRequest {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub points: Option<usize>,
    pub axis1: Option<String>,
    pub axis2: Option<String>,
    pub verbose: bool,
    pub threads: usize,
}

/// A completed sweep ready to be written.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub result: SweepResult,
    pub meta: SweepMeta,
    pub csv: String,
    pub summary: String,
}

/// Loads the configuration, runs the sweep and renders the CSV and summary.
pub fn prepare_sweep(kind: SweepKind, req: &SweepRequest) -> Result<SweepOutcome> {
    let (file, system) = load_config(&req.config)?;
    if req.verbose {
        eprint!("{}", describe(&system));
    }
    let specs = match (&req.axis1, &req.axis2) {
        (None, None) => kind.default_axes(&file, &system)?,
        (Some(a1), None) => vec![parse_axis_spec(a1)?],
        (Some(a1), Some(a2)) => vec![parse_axis_spec(a1)?, parse_axis_spec(a2)?],
        (None, Some(_)) => return Err(CliError::Usage("--axis2 requires --axis1".into())),
    };
    let points = req.points.unwrap_or(if specs.len() == 2 {
        DEFAULT_POINTS_2D
    } else {
        DEFAULT_POINTS_1D
    });

    let mut axes = Vec::with_capacity(specs.len());
    let mut metas = Vec::with_capacity(specs.len());
    for (param, start, stop) in specs {
        if !kind.accepts(param) {
            return Err(CliError::Usage(format!("{} cannot sweep {param}", kind.command())));
        }
        let (unit, scale) = axis_unit(param, &file)?;
        axes.push(SweepAxis::new(param, start * scale, stop * scale, points)?);
        metas.push(AxisMeta {
            param: param.to_string(),
            unit,
            start,
            stop,
            points,
        });
    }
    let meta = SweepMeta {
        command: kind.command().to_owned(),
        axes: metas,
    };

    let options = SweepOptions {
        threads: req.threads,
        track_physicality: false,
    };
    let result = run_sweep(&system, &axes, &options)?;
    let csv = sweep_csv(&result, &meta);
    let summary = summarize(kind, &result, &meta, &system)?;
    Ok(SweepOutcome {
        result,
        meta,
        csv,
        summary,
    })
}

fn summarize(kind: SweepKind, result: &SweepResult, meta: &SweepMeta, system: &SystemConfig) -> Result<String> {
    let opt = find_optimum(result)?;
    let location: Vec<String> = meta
        .axes
        .iter()
        .zip(&opt.indices)
        .map(|(axis, &i)| {
            let value = if i + 1 == axis.points {
                axis.stop
            } else {
                axis.start + (axis.stop - axis.start) * (i as f64 / (axis.points - 1) as f64)
            };
            format!("{} = {} {}", axis.param, value, axis.unit)
        })
        .collect();
    let unstable = result.stable.iter().filter(|s| !**s).count();
    let mut summary = format!(
        "optimum: E_N = {} at {} (grid index {:?})\nunstable points: {unstable} of {}\n",
        fmt_f64(opt.log_negativity),
        location.join(", "),
        opt.indices,
        result.len()
    );
    if kind == SweepKind::Temperature {
        let t_max = result.axes[0].start.max(result.axes[0].stop);
        if t_max > 0.0 {
            match survival_temperature(system, t_max, SURVIVAL_RESOLUTION) {
                Ok(t) => summary.push_str(&format!("survival temperature: {:.1} mK\n", t * 1e3)),
                Err(magnon_core::Error::Precondition(_)) => {
                    summary.push_str("survival temperature: not entangled at T = 0\n")
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(summary)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn report_error(err: &CliError) -> ExitStatus {
    eprintln!("error: {err}");
    err.exit_status()
}

/// Runs a sweep subcommand end to end. With `--out` the CSV goes to the file and
/// the summary to stdout; otherwise the CSV goes to stdout and the summary to stderr.
pub fn cmd_sweep(kind: SweepKind, req: &SweepRequest) -> ExitStatus {
    let outcome = match prepare_sweep(kind, req) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    if let Err(e) = emit(req.out.as_deref(), &outcome.csv) {
        return report_error(&e);
    }
    if req.out.is_some() {
        print!("{}", outcome.summary);
    } else {
        eprint!("{}", outcome.summary);
    }
    ExitStatus::Success
}

/// Analyses a single configuration and writes the steady-state report.
pub fn cmd_steady_state(config: &Path, out: Option<&Path>, verbose: bool) -> ExitStatus {
    let run = || -> Result<String> {
        let (_, system) = load_config(config)?;
        if verbose {
            eprint!("{}", describe(&system));
        }
        let state = analyze(&system)?;
        let nu_min = state.min_symplectic_eigenvalue()?;
        let report = steady_state_report(&system, &state, nu_min);
        emit(out, &report)?;
        Ok(format!(
            "stable: true (spectral abscissa {:e} rad/s)\nE_N = {}\neta_minus = {}\nmin symplectic eigenvalue = {}\n",
            state.stability.spectral_abscissa,
            fmt_f64(state.negativity.log_negativity),
            fmt_f64(state.negativity.eta_minus),
            fmt_f64(nu_min)
        ))
    };
    match run() {
        Ok(summary) => {
            if out.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            ExitStatus::Success
        }
        Err(e) => {
            if let CliError::Core(magnon_core::Error::Unstable { spectral_abscissa }) = &e {
                eprintln!("stable: false (spectral abscissa {spectral_abscissa:e} rad/s)");
            }
            report_error(&e)
        }
    }
}
