//! TOML configuration files.
//!
//! ```toml
//! [units]
//! rate_unit = "kappa_a"   # or "Hz"; rates are given as ordinary frequencies (κ/2π)
//! kappa_a_Hz = 5e6        # required with rate_unit = "kappa_a"
//!
//! [cavity1]
//! detuning = -4
//! decay = 1
//! # [cavity2], [magnon1], [magnon2] alike
//!
//! [coupling]
//! g1 = 2
//! g2 = 2
//! J = 4
//!
//! [drive1]                # omit for a vacuum/thermal input
//! r = 0.9
//! theta_deg = 0
//!
//! [bath]                  # optional; defaults shown
//! temperature_mK = 0
//! carrier_frequency_GHz = 10
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use magnon_core::model::DEFAULT_CARRIER;
use magnon_core::{BathConfig, ModeParams, SqueezeDrive, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const MODE_KEYS: &[&str] = &["detuning", "decay"];
const SCHEMA: &[(&str, &[&str])] = &[
    ("units", &["rate_unit", "kappa_a_Hz"]),
    ("cavity1", MODE_KEYS),
    ("cavity2", MODE_KEYS),
    ("magnon1", MODE_KEYS),
    ("magnon2", MODE_KEYS),
    ("coupling", &["g1", "g2", "J"]),
    ("drive1", &["r", "theta_deg"]),
    ("drive2", &["r", "theta_deg"]),
    ("bath", &["temperature_mK", "carrier_frequency_GHz"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateUnit {
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "kappa_a")]
    KappaA,
}

impl fmt::Display for RateUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateUnit::Hz => "Hz",
            RateUnit::KappaA => "kappa_a",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub rate_unit: RateUnit,
    #[serde(rename = "kappa_a_Hz", default, skip_serializing_if = "Option::is_none")]
    pub kappa_a_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub detuning: f64,
    pub decay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub g1: f64,
    pub g2: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub r: f64,
    #[serde(default)]
    pub theta_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(rename = "temperature_mK", default)]
    pub temperature_mk: f64,
    #[serde(rename = "carrier_frequency_GHz", default = "default_carrier_ghz")]
    pub carrier_frequency_ghz: f64,
}

fn default_carrier_ghz() -> f64 {
    DEFAULT_CARRIER / (2.0 * PI * 1e9)
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            temperature_mk: 0.0,
            carrier_frequency_ghz: default_carrier_ghz(),
        }
    }
}

/// On-disk configuration document, in file units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Units,
    pub cavity1: ModeSection,
    pub cavity2: ModeSection,
    pub magnon1: ModeSection,
    pub magnon2: ModeSection,
    pub coupling: CouplingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive1: Option<DriveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive2: Option<DriveSection>,
    #[serde(default)]
    pub bath: BathSection,
}

impl ConfigFile {
    /// Angular frequency (rad/s) of one file rate unit.
    pub fn rate_scale(&self) -> Result<f64> {
        match (self.units.rate_unit, self.units.kappa_a_hz) {
            (RateUnit::Hz, None) => Ok(2.0 * PI),
            (RateUnit::Hz, Some(_)) => Err(CliError::Parse(
                "units.kappa_a_Hz is only meaningful with rate_unit = \"kappa_a\"".into(),
            )),
            (RateUnit::KappaA, Some(k)) if k.is_finite() && k > 0.0 => Ok(2.0 * PI * k),
            (RateUnit::KappaA, Some(k)) => Err(CliError::Parse(format!("units.kappa_a_Hz must be > 0, got {k}"))),
            (RateUnit::KappaA, None) => Err(CliError::Parse(
                "rate_unit = \"kappa_a\" requires units.kappa_a_Hz".into(),
            )),
        }
    }

    /// Converts to internal units (rad/s, radians, kelvin) and validates.
    pub fn resolve(&self) -> Result<SystemConfig> {
        let scale = self.rate_scale()?;
        let mode = |m: &ModeSection| ModeParams::new(m.detuning * scale, m.decay * scale);
        let drive = |d: &DriveSection| SqueezeDrive {
            r: d.r,
            theta: d.theta_deg.to_radians(),
        };
        let config = SystemConfig {
            cavity1: mode(&self.cavity1),
            cavity2: mode(&self.cavity2),
            magnon1: mode(&self.magnon1),
            magnon2: mode(&self.magnon2),
            g1: self.coupling.g1 * scale,
            g2: self.coupling.g2 * scale,
            j: self.coupling.j * scale,
            drive1: self.drive1.as_ref().map(drive),
            drive2: self.drive2.as_ref().map(drive),
            bath: BathConfig {
                temperature: self.bath.temperature_mk * 1e-3,
                carrier_frequency: self.bath.carrier_frequency_ghz * 2.0 * PI * 1e9,
            },
        };
        config.validate()?;
        Ok(config)
    }

    /// File representation of `config` with rates in Hz.
    pub fn from_system(config: &SystemConfig) -> Self {
        let hz = |w: f64| w / (2.0 * PI);
        let mode = |m: &ModeParams| ModeSection {
            detuning: hz(m.detuning),
            decay: hz(m.decay),
        };
        let drive = |d: &SqueezeDrive| DriveSection {
            r: d.r,
            theta_deg: d.theta.to_degrees(),
        };
        Self {
            units: Units {
                rate_unit: RateUnit::Hz,
                kappa_a_hz: None,
            },
            cavity1: mode(&config.cavity1),
            cavity2: mode(&config.cavity2),
            magnon1: mode(&config.magnon1),
            magnon2: mode(&config.magnon2),
            coupling: CouplingSection {
                g1: hz(config.g1),
                g2: hz(config.g2),
                j: hz(config.j),
            },
            drive1: config.drive1.as_ref().map(drive),
            drive2: config.drive2.as_ref().map(drive),
            bath: BathSection {
                temperature_mk: config.bath.temperature * 1e3,
                carrier_frequency_ghz: config.bath.carrier_frequency / (2.0 * PI * 1e9),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration documents always serialise")
    }
}

/// Every key in `table` that the schema does not know, as dotted paths.
pub fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut unknown = Vec::new();
    for (section, value) in table {
        let Some((_, keys)) = SCHEMA.iter().find(|(name, _)| name == section) else {
            unknown.push(section.clone());
            continue;
        };
        if let Some(inner) = value.as_table() {
            unknown.extend(
                inner
                    .keys()
                    .filter(|k| !keys.contains(&k.as_str()))
                    .map(|k| format!("{section}.{k}")),
            );
        }
    }
    unknown
}

/// Parses a configuration table, rejecting unknown keys before anything else.
pub fn parse_table(table: toml::Table) -> Result<ConfigFile> {
    let unknown = unknown_keys(&table);
    if !unknown.is_empty() {
        return Err(CliError::UnknownKeys(unknown));
    }
    if !table.contains_key("units") {
        return Err(CliError::Parse("missing [units] section".into()));
    }
    ConfigFile::deserialize(table).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    parse_table(table)
}

/// Reads, converts and validates a configuration file.
pub fn load_config(path: &Path) -> Result<(ConfigFile, SystemConfig)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let file = parse_config(&text)?;
    let system = file.resolve()?;
    Ok((file, system))
}

/// Human-readable dump of every resolved value in internal units.
pub fn describe(config: &SystemConfig) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for mode in magnon_core::Mode::ALL {
        let p = config.mode(mode);
        let _ = writeln!(
            s,
            "{}: detuning = {:e} rad/s, decay = {:e} rad/s",
            mode.name(),
            p.detuning,
            p.decay
        );
    }
    let _ = writeln!(s, "coupling: g1 = {:e}, g2 = {:e}, J = {:e} rad/s", config.g1, config.g2, config.j);
    for (name, drive) in [("drive1", config.drive1), ("drive2", config.drive2)] {
        match drive {
            Some(d) => {
                let _ = writeln!(s, "{name}: r = {}, theta = {} rad", d.r, d.theta);
            }
            None => {
                let _ = writeln!(s, "{name}: vacuum/thermal input");
            }
        }
    }
    let _ = writeln!(
        s,
        "bath: T = {} K, carrier = {:e} rad/s",
        config.bath.temperature, config.bath.carrier_frequency
    );
    let _ = writeln!(s, "configuration: {:?}", config.configuration());
    s
}
