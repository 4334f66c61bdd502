//! CSV artifacts. Each file opens with a `#`-prefixed TOML preamble holding the
//! sweep description and the resolved configuration (rates in Hz), followed by a
//! single header row and one data row per grid point.

use std::io::Write;
use std::path::Path;

use magnon_core::{SteadyState, SweepResult, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::config::{parse_table, ConfigFile};
use crate::error::{CliError, Result};

/// Column header of the log-negativity.
pub const NEGATIVITY_COLUMN: &str = "E_N";
/// Column header of the stability flag.
pub const STABLE_COLUMN: &str = "stable";

const QUADRATURES: [&str; 8] = ["x_a1", "y_a1", "x_a2", "y_a2", "x_m1", "y_m1", "x_m2", "y_m2"];

/// 17 significant digits, exponent form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_owned()
    } else {
        format!("{v:.16e}")
    }
}

/// One axis as the user specified it, in file units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMeta {
    pub param: String,
    pub unit: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub command: String,
    pub axes: Vec<AxisMeta>,
}

#[derive(Serialize)]
struct Preamble<'a> {
    sweep: &'a SweepMeta,
    #[serde(flatten)]
    config: ConfigFile,
}

fn commented(text: &str) -> String {
    text.lines().map(|l| format!("# {l}\n").replace("# \n", "#\n")).collect()
}

/// Renders a sweep as CSV. Axis columns are in the units recorded in `meta`.
pub fn sweep_csv(result: &SweepResult, meta: &SweepMeta) -> String {
    let preamble = Preamble {
        sweep: meta,
        config: ConfigFile::from_system(&result.base),
    };
    let mut out = commented(&toml::to_string(&preamble).expect("preamble always serialises"));
    let header: Vec<&str> = meta
        .axes
        .iter()
        .map(|a| a.param.as_str())
        .chain([NEGATIVITY_COLUMN, STABLE_COLUMN])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');

    let display_axes: Vec<_> = meta
        .axes
        .iter()
        .map(|a| linspace_value_fn(a.start, a.stop, a.points))
        .collect();
    for flat in 0..result.len() {
        let mut row: Vec<String> = result
            .unravel(flat)
            .into_iter()
            .zip(&display_axes)
            .map(|(i, f)| fmt_f64(f(i)))
            .collect();
        row.push(fmt_f64(result.values[flat]));
        row.push(if result.stable[flat] { "1" } else { "0" }.to_owned());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn linspace_value_fn(start: f64, stop: f64, points: usize) -> impl Fn(usize) -> f64 {
    move |i| {
        if i + 1 == points {
            stop
        } else {
            start + (stop - start) * (i as f64 / (points - 1) as f64)
        }
    }
}

/// A sweep CSV read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSweep {
    pub meta: SweepMeta,
    pub config: SystemConfig,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Splits the `#` preamble from the CSV body and parses both.
pub fn parse_sweep_csv(text: &str) -> Result<ParsedSweep> {
    let mut preamble = String::new();
    let mut body = Vec::new();
    for line in text.lines() {
        match line.strip_prefix('#') {
            Some(rest) if body.is_empty() => {
                preamble.push_str(rest.strip_prefix(' ').unwrap_or(rest));
                preamble.push('\n');
            }
            _ => body.push(line),
        }
    }
    let mut table: toml::Table = preamble
        .parse()
        .map_err(|e: toml::de::Error| CliError::Parse(format!("metadata block: {e}")))?;
    let sweep = table
        .remove("sweep")
        .ok_or_else(|| CliError::Parse("metadata block has no [sweep] table".into()))?;
    let meta = SweepMeta::deserialize(sweep).map_err(|e| CliError::Parse(format!("[sweep]: {e}")))?;
    let config = parse_table(table)?.resolve()?;

    let (header, data) = body
        .split_first()
        .ok_or_else(|| CliError::Parse("missing CSV header".into()))?;
    let header: Vec<String> = header.split(',').map(str::to_owned).collect();
    let rows = data
        .iter()
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().map_err(|e| CliError::Parse(format!("cell {cell:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedSweep {
        meta,
        config,
        header,
        rows,
    })
}

/// Plain-text report of a single steady state followed by `V` as CSV.
pub fn steady_state_report(config: &SystemConfig, state: &SteadyState, min_symplectic: f64) -> String {
    let mut out = String::new();
    out.push_str("# [steady_state]\n");
    out.push_str(&format!("# stable = {}\n", state.stability.stable));
    out.push_str(&format!("# spectral_abscissa = {}\n", fmt_f64(state.stability.spectral_abscissa)));
    out.push_str(&format!("# log_negativity = {}\n", fmt_f64(state.negativity.log_negativity)));
    out.push_str(&format!("# eta_minus = {}\n", fmt_f64(state.negativity.eta_minus)));
    out.push_str(&format!("# entangled = {}\n", state.negativity.entangled));
    out.push_str(&format!("# min_symplectic_eigenvalue = {}\n", fmt_f64(min_symplectic)));
    out.push_str(&commented(&ConfigFile::from_system(config).to_toml()));
    out.push_str(&QUADRATURES.join(","));
    out.push('\n');
    let v = state.covariance.matrix();
    for r in 0..8 {
        let row: Vec<String> = (0..8).map(|c| fmt_f64(v[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes `contents` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let err = |source| CliError::Write {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
