//! Grid sweeps of the magnon-magnon log-negativity over one or two parameters.
//!
//! Grid points are independent; they are evaluated on a rayon pool and written
//! back by index, so the result does not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::entanglement::{extract_magnon_block, log_negativity, symplectic_eigenvalues, NegativityResult};
use crate::error::{Error, Result};
use crate::lyapunov::{is_stable, solve_steady_state, CovarianceMatrix, StabilityReport};
use crate::model::{build_diffusion, build_drift, Channel, DiffusionMatrix, DriftMatrix, Mode, SystemConfig};

/// `E_N` above this counts as entangled when searching for the survival temperature.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-6;

/// Grid points used by the coarse temperature scan before bisection.
pub const TEMPERATURE_SCAN_POINTS: usize = 201;

/// A scalar field of [`SystemConfig`] that a sweep axis can vary, in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Detuning(Mode),
    Decay(Mode),
    G1,
    G2,
    J,
    SqueezeStrength(Channel),
    SqueezePhase(Channel),
    Temperature,
}

impl Param {
    pub fn apply(self, config: &mut SystemConfig, value: f64) -> Result<()> {
        match self {
            Param::Detuning(mode) => config.mode_mut(mode).detuning = value,
            Param::Decay(mode) => config.mode_mut(mode).decay = value,
            Param::G1 => config.g1 = value,
            Param::G2 => config.g2 = value,
            Param::J => config.j = value,
            Param::SqueezeStrength(ch) | Param::SqueezePhase(ch) => {
                let drive = config.drive_mut(ch).ok_or_else(|| {
                    Error::invalid(self.to_string(), "cannot sweep a drive that is absent from the configuration")
                })?;
                if matches!(self, Param::SqueezeStrength(_)) {
                    drive.r = value;
                } else {
                    drive.theta = value;
                }
            }
            Param::Temperature => config.bath.temperature = value,
        }
        Ok(())
    }

    pub fn get(self, config: &SystemConfig) -> Option<f64> {
        Some(match self {
            Param::Detuning(mode) => config.mode(mode).detuning,
            Param::Decay(mode) => config.mode(mode).decay,
            Param::G1 => config.g1,
            Param::G2 => config.g2,
            Param::J => config.j,
            Param::SqueezeStrength(ch) => config.drive(ch)?.r,
            Param::SqueezePhase(ch) => config.drive(ch)?.theta,
            Param::Temperature => config.bath.temperature,
        })
    }

    /// Whether the parameter is a rate (rad/s internally).
    pub fn is_rate(self) -> bool {
        matches!(self, Param::Detuning(_) | Param::Decay(_) | Param::G1 | Param::G2 | Param::J)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Detuning(m) => write!(f, "{}.detuning", m.name()),
            Param::Decay(m) => write!(f, "{}.decay", m.name()),
            Param::G1 => f.write_str("coupling.g1"),
            Param::G2 => f.write_str("coupling.g2"),
            Param::J => f.write_str("coupling.J"),
            Param::SqueezeStrength(ch) => write!(f, "drive{}.r", ch.index()),
            Param::SqueezePhase(ch) => write!(f, "drive{}.theta", ch.index()),
            Param::Temperature => f.write_str("bath.temperature"),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::invalid(s, "unknown sweep parameter path");
        let (section, field) = s.split_once('.').ok_or_else(unknown)?;
        let mode = match section {
            "cavity1" => Some(Mode::Cavity1),
            "cavity2" => Some(Mode::Cavity2),
            "magnon1" => Some(Mode::Magnon1),
            "magnon2" => Some(Mode::Magnon2),
            _ => None,
        };
        if let Some(mode) = mode {
            return match field {
                "detuning" => Ok(Param::Detuning(mode)),
                "decay" => Ok(Param::Decay(mode)),
                _ => Err(unknown()),
            };
        }
        let channel = match section {
            "drive1" => Some(Channel::First),
            "drive2" => Some(Channel::Second),
            _ => None,
        };
        match (section, field, channel) {
            (_, "r", Some(ch)) => Ok(Param::SqueezeStrength(ch)),
            (_, "theta", Some(ch)) => Ok(Param::SqueezePhase(ch)),
            ("coupling", "g1", _) => Ok(Param::G1),
            ("coupling", "g2", _) => Ok(Param::G2),
            ("coupling", "J", _) => Ok(Param::J),
            ("bath", "temperature", _) => Ok(Param::Temperature),
            _ => Err(unknown()),
        }
    }
}

/// Linearly spaced samples of one parameter, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn new(param: Param, start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::invalid(param.to_string(), format!("axis needs at least 2 points, got {points}")));
        }
        if !(start.is_finite() && stop.is_finite()) || start == stop {
            return Err(Error::invalid(
                param.to_string(),
                format!("axis range [{start}, {stop}] must be finite and non-degenerate"),
            ));
        }
        Ok(Self { param, start, stop, points })
    }

    pub fn value(&self, index: usize) -> f64 {
        if index + 1 == self.points {
            return self.stop;
        }
        let t = index as f64 / (self.points - 1) as f64;
        self.start + (self.stop - self.start) * t
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    /// Also record the smallest symplectic eigenvalue of every steady state.
    pub track_physicality: bool,
}

/// Full single-point pipeline output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub stability: StabilityReport,
    pub covariance: CovarianceMatrix,
    pub negativity: NegativityResult,
}

impl SteadyState {
    /// Smallest symplectic eigenvalue of the full 8×8 covariance.
    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        let v = DMatrix::from_column_slice(8, 8, self.covariance.0.as_slice());
        Ok(symplectic_eigenvalues(&v)?[0])
    }
}

/// Validates the configuration and runs drift, diffusion, stability, Lyapunov and
/// negativity in turn. An unstable drift matrix yields [`Error::Unstable`].
pub fn analyze(config: &SystemConfig) -> Result<SteadyState> {
    config.validate()?;
    let drift = build_drift(config);
    let diffusion = build_diffusion(config)?;
    let stability = is_stable(&drift)?;
    if !stability.stable {
        return Err(Error::Unstable {
            spectral_abscissa: stability.spectral_abscissa,
        });
    }
    let covariance = solve_steady_state(&drift, &diffusion)?;
    let negativity = log_negativity(&extract_magnon_block(&covariance))?;
    Ok(SteadyState {
        drift,
        diffusion,
        stability,
        covariance,
        negativity,
    })
}

/// Outcome of a sweep. Grids are flattened with the first axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    /// `E_N` per grid point; `NaN` where the system is unstable.
    pub values: Vec<f64>,
    pub stable: Vec<bool>,
    /// Smallest symplectic eigenvalue per point when requested (`NaN` if unstable).
    pub min_symplectic: Option<Vec<f64>>,
    pub base: SystemConfig,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-axis indices of a flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        self.axes
            .iter()
            .map(|axis| {
                let i = flat % axis.points;
                flat /= axis.points;
                i
            })
            .collect()
    }

    pub fn ravel(&self, indices: &[usize]) -> usize {
        indices
            .iter()
            .zip(&self.axes)
            .rev()
            .fold(0, |acc, (&i, axis)| acc * axis.points + i)
    }

    /// Parameter values of a flat index, in axis order.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .into_iter()
            .zip(&self.axes)
            .map(|(i, axis)| axis.value(i))
            .collect()
    }

    pub fn at(&self, indices: &[usize]) -> f64 {
        self.values[self.ravel(indices)]
    }

    /// Configuration evaluated at a flat index.
    pub fn config_at(&self, flat: usize) -> Result<SystemConfig> {
        let mut config = self.base;
        for (axis, value) in self.axes.iter().zip(self.coordinates(flat)) {
            axis.param.apply(&mut config, value)?;
        }
        Ok(config)
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

struct PointOutcome {
    value: f64,
    stable: bool,
    min_symplectic: f64,
}

fn evaluate_point(config: &SystemConfig, track_physicality: bool) -> Result<PointOutcome> {
    match analyze(config) {
        Ok(state) => Ok(PointOutcome {
            value: state.negativity.log_negativity,
            stable: true,
            min_symplectic: if track_physicality {
                state.min_symplectic_eigenvalue()?
            } else {
                f64::NAN
            },
        }),
        Err(Error::Unstable { .. }) => Ok(PointOutcome {
            value: f64::NAN,
            stable: false,
            min_symplectic: f64::NAN,
        }),
        Err(e) => Err(e),
    }
}

/// Evaluates `E_N` on the grid spanned by one or two axes around `base`.
///
/// Every grid configuration is built and validated before the first solve, so a
/// bad axis fails fast. Unstable points are recorded in the mask, not raised.
pub fn run_sweep(base: &SystemConfig, axes: &[SweepAxis], options: &SweepOptions) -> Result<SweepResult> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::Precondition(format!("a sweep takes 1 or 2 axes, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(Error::invalid(axes[0].param.to_string(), "both axes vary the same parameter"));
    }
    base.validate()?;
    let mut result = SweepResult {
        axes: axes.to_vec(),
        values: Vec::new(),
        stable: Vec::new(),
        min_symplectic: None,
        base: *base,
    };
    let total: usize = axes.iter().map(|a| a.points).product();
    let configs = (0..total)
        .map(|flat| {
            let config = result.config_at(flat)?;
            config.validate()?;
            Ok(config)
        })
        .collect::<Result<Vec<_>>>()?;

    let track = options.track_physicality;
    let outcomes = with_pool(options.threads, || {
        configs
            .par_iter()
            .map(|c| evaluate_point(c, track))
            .collect::<Result<Vec<_>>>()
    })??;

    result.values = outcomes.iter().map(|o| o.value).collect();
    result.stable = outcomes.iter().map(|o| o.stable).collect();
    if track {
        result.min_symplectic = Some(outcomes.iter().map(|o| o.min_symplectic).collect());
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub flat_index: usize,
    pub indices: Vec<usize>,
    pub params: Vec<f64>,
    pub log_negativity: f64,
}

/// Largest `E_N` over the stable grid points; exact ties go to the first point in
/// flattened order.
pub fn find_optimum(result: &SweepResult) -> Result<Optimum> {
    let mut best: Option<(usize, f64)> = None;
    for (flat, (&value, &stable)) in result.values.iter().zip(&result.stable).enumerate() {
        if !stable {
            continue;
        }
        if best.map_or(true, |(_, b)| value > b) {
            best = Some((flat, value));
        }
    }
    let (flat, value) = best.ok_or(Error::EmptyResult)?;
    Ok(Optimum {
        flat_index: flat,
        indices: result.unravel(flat),
        params: result.coordinates(flat),
        log_negativity: value,
    })
}

fn negativity_at(base: &SystemConfig, temperature: f64) -> Result<f64> {
    let mut config = *base;
    config.bath.temperature = temperature;
    Ok(analyze(&config)?.negativity.log_negativity)
}

/// Highest bath temperature in `[0, t_max]` at which `E_N` stays above
/// [`ENTANGLEMENT_THRESHOLD`], located to within `resolution` kelvin.
///
/// The whole range is scanned on a [`TEMPERATURE_SCAN_POINTS`] grid first; the
/// last entangled grid point and its successor then bracket a bisection. A
/// non-monotone tail therefore never hides a later entangled point.
pub fn survival_temperature(base: &SystemConfig, t_max: f64, resolution: f64) -> Result<f64> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Precondition(format!("t_max must be > 0, got {t_max}")));
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::Precondition(format!("resolution must be > 0, got {resolution}")));
    }
    if negativity_at(base, 0.0)? <= ENTANGLEMENT_THRESHOLD {
        return Err(Error::Precondition("no entanglement at zero temperature".into()));
    }
    let axis = SweepAxis::new(crate::Param::Temperature, 0.0, t_max, TEMPERATURE_SCAN_POINTS)?;
    let scan = run_sweep(base, &[axis], &SweepOptions::default())?;
    let entangled = |v: f64| v > ENTANGLEMENT_THRESHOLD;
    let last = scan
        .values
        .iter()
        .rposition(|&v| entangled(v))
        .expect("zero temperature is entangled");
    if last + 1 == axis.points {
        return Ok(t_max);
    }
    let (mut lo, mut hi) = (axis.value(last), axis.value(last + 1));
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if entangled(negativity_at(base, mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SqueezeDrive;
    use std::f64::consts::PI;

    #[test]
    fn param_paths_round_trip() {
        for path in [
            "cavity1.detuning",
            "magnon2.decay",
            "coupling.g1",
            "coupling.g2",
            "coupling.J",
            "drive1.r",
            "drive2.theta",
            "bath.temperature",
        ] {
            assert_eq!(path.parse::<Param>().unwrap().to_string(), path);
        }
        for bad in ["cavity3.detuning", "coupling.j", "drive1.phase", "temperature", ""] {
            assert!(bad.parse::<Param>().is_err(), "{bad}");
        }
    }

    #[test]
    fn axis_validation() {
        assert!(SweepAxis::new(Param::G1, 0.0, 1.0, 1).is_err());
        assert!(SweepAxis::new(Param::G1, 1.0, 1.0, 5).is_err());
        let axis = SweepAxis::new(Param::G1, -2.0, 2.0, 101).unwrap();
        assert_eq!(axis.value(0), -2.0);
        assert_eq!(axis.value(100), 2.0);
        assert!((axis.step() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn flat_indexing_first_axis_fastest() {
        let a1 = SweepAxis::new(Param::G1, 0.0, 1.0, 3).unwrap();
        let a2 = SweepAxis::new(Param::G2, 0.0, 1.0, 4).unwrap();
        let r = SweepResult {
            axes: vec![a1, a2],
            values: vec![0.0; 12],
            stable: vec![true; 12],
            min_symplectic: None,
            base: SystemConfig::baseline_double(),
        };
        assert_eq!(r.unravel(5), vec![2, 1]);
        assert_eq!(r.ravel(&[2, 1]), 5);
        assert_eq!(r.coordinates(1), vec![0.5, 0.0]);
    }

    #[test]
    fn absent_drive_cannot_be_swept() {
        let cfg = SystemConfig::baseline_single();
        let axis = SweepAxis::new(Param::SqueezePhase(Channel::Second), 0.0, PI, 3).unwrap();
        assert!(matches!(
            run_sweep(&cfg, &[axis], &SweepOptions::default()),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn invalid_grid_point_fails_before_solving() {
        let cfg = SystemConfig::baseline_double();
        let axis = SweepAxis::new(Param::Decay(Mode::Cavity2), -cfg.cavity2.decay, cfg.cavity2.decay, 3).unwrap();
        match run_sweep(&cfg, &[axis], &SweepOptions::default()) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "cavity2.decay"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsqueezed_sweep_is_identically_zero() {
        let mut cfg = SystemConfig::baseline_double();
        cfg.drive1 = Some(SqueezeDrive { r: 0.0, theta: 0.0 });
        cfg.drive2 = Some(SqueezeDrive { r: 0.0, theta: 0.0 });
        let j = cfg.j;
        let axes = [
            SweepAxis::new(Param::Detuning(Mode::Cavity1), -2.0 * j, 2.0 * j, 9).unwrap(),
            SweepAxis::new(Param::Detuning(Mode::Cavity2), -2.0 * j, 2.0 * j, 9).unwrap(),
        ];
        let res = run_sweep(&cfg, &axes, &SweepOptions::default()).unwrap();
        assert!(res.values.iter().all(|&v| v == 0.0), "{:?}", res.values);
        let opt = find_optimum(&res).unwrap();
        assert_eq!(opt.indices, vec![0, 0]);
        assert_eq!(opt.log_negativity, 0.0);
    }

    #[test]
    fn unstable_points_are_masked() {
        // Passive beam-splitter couplings with positive decay are always stable, so
        // the mask is exercised on a hand-built result.
        let cfg = SystemConfig::baseline_double();
        let axis = SweepAxis::new(Param::G1, 0.0, 1.0, 3).unwrap();
        let r = SweepResult {
            axes: vec![axis],
            values: vec![f64::NAN, 0.2, 0.1],
            stable: vec![false, true, true],
            min_symplectic: None,
            base: cfg,
        };
        let opt = find_optimum(&r).unwrap();
        assert_eq!(opt.flat_index, 1);
        let none = SweepResult {
            stable: vec![false; 3],
            values: vec![f64::NAN; 3],
            ..r
        };
        assert_eq!(find_optimum(&none), Err(Error::EmptyResult));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = SystemConfig::baseline_double();
        let axes = [
            SweepAxis::new(Param::SqueezePhase(Channel::First), 0.0, 2.0 * PI, 7).unwrap(),
            SweepAxis::new(Param::Detuning(Mode::Cavity2), -2.0 * cfg.j, 0.0, 5).unwrap(),
        ];
        let one = run_sweep(&cfg, &axes, &SweepOptions { threads: 1, track_physicality: true }).unwrap();
        let many = run_sweep(&cfg, &axes, &SweepOptions { threads: 4, track_physicality: true }).unwrap();
        let bits = |r: &SweepResult| r.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&one), bits(&many));
        assert!(one.min_symplectic.unwrap().iter().all(|&nu| nu >= 0.5 - 1e-9));
    }

    #[test]
    fn survival_returns_t_max_when_range_is_entangled() {
        let cfg = SystemConfig::baseline_double();
        assert_eq!(survival_temperature(&cfg, 0.05, 1e-4).unwrap(), 0.05);
    }

    #[test]
    fn survival_requires_zero_temperature_entanglement() {
        let mut cfg = SystemConfig::baseline_double();
        cfg.drive1 = None;
        cfg.drive2 = None;
        assert!(matches!(survival_temperature(&cfg, 0.5, 1e-3), Err(Error::Precondition(_))));
    }
}
