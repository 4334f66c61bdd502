//! Physical parameters and the drift/diffusion matrices of the linearised
//! quadrature dynamics `u̇ = A u + n`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Matrix8;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Default squeezed-field carrier ω_s: 2π × 10 GHz.
pub const DEFAULT_CARRIER: f64 = 2.0 * PI * 10.0e9;

/// The four bosonic modes, in the order their quadratures appear in `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Cavity1,
    Cavity2,
    Magnon1,
    Magnon2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Cavity1, Mode::Cavity2, Mode::Magnon1, Mode::Magnon2];

    /// Row/column of the mode's `x` quadrature; `y` follows at `offset() + 1`.
    pub fn offset(self) -> usize {
        match self {
            Mode::Cavity1 => 0,
            Mode::Cavity2 => 2,
            Mode::Magnon1 => 4,
            Mode::Magnon2 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Cavity1 => "cavity1",
            Mode::Cavity2 => "cavity2",
            Mode::Magnon1 => "magnon1",
            Mode::Magnon2 => "magnon2",
        }
    }

    /// The same mode with subsystem labels 1 and 2 exchanged.
    pub fn swapped(self) -> Mode {
        match self {
            Mode::Cavity1 => Mode::Cavity2,
            Mode::Cavity2 => Mode::Cavity1,
            Mode::Magnon1 => Mode::Magnon2,
            Mode::Magnon2 => Mode::Magnon1,
        }
    }
}

/// Subsystem label for per-cavity quantities (squeezed drives, cavity-magnon couplings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    First,
    Second,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::First => 1,
            Channel::Second => 2,
        }
    }
}

/// Detuning from the carrier and amplitude decay rate of one mode, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    pub detuning: f64,
    pub decay: f64,
}

impl ModeParams {
    pub fn new(detuning: f64, decay: f64) -> Self {
        Self { detuning, decay }
    }
}

/// Ideal squeezed-vacuum input: strength `r ≥ 0` and phase `theta` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeDrive {
    pub r: f64,
    pub theta: f64,
}

impl SqueezeDrive {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!("squeezing strength must be >= 0, got {r}")));
        }
        if !theta.is_finite() {
            return Err(Error::Domain(format!("squeezing phase must be finite, got {theta}")));
        }
        Ok(Self { r, theta })
    }
}

/// Bath temperature (K) and the lab-frame carrier ω_s (rad/s) against which
/// detunings are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    pub temperature: f64,
    pub carrier_frequency: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            carrier_frequency: DEFAULT_CARRIER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveConfiguration {
    /// No squeezed input on either cavity.
    Unsqueezed,
    SingleSqueezed,
    DoubleSqueezed,
}

/// Complete parameter set of the two-cavity, two-magnon system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub cavity1: ModeParams,
    pub cavity2: ModeParams,
    pub magnon1: ModeParams,
    pub magnon2: ModeParams,
    /// Cavity 1 – magnon 1 coupling.
    pub g1: f64,
    /// Cavity 2 – magnon 2 coupling.
    pub g2: f64,
    /// Intercavity coupling.
    pub j: f64,
    pub drive1: Option<SqueezeDrive>,
    pub drive2: Option<SqueezeDrive>,
    pub bath: BathConfig,
}

impl SystemConfig {
    /// Reference parameter set: κ_a/2π = 5 MHz, κ_m = κ_a/5, J = 4κ_a,
    /// g₁ = g₂ = 2κ_a, Δ_a1 = Δ_a2 = −J, Δ_m1 = −Δ_m2 = J/2, r₁ = r₂ = 0.9,
    /// θ₁ = θ₂ = 0, T = 0, with both cavities squeezed.
    pub fn baseline_double() -> Self {
        let kappa_a = 2.0 * PI * 5.0e6;
        let kappa_m = kappa_a / 5.0;
        let j = 4.0 * kappa_a;
        let g = 2.0 * kappa_a;
        let drive = SqueezeDrive { r: 0.9, theta: 0.0 };
        Self {
            cavity1: ModeParams::new(-j, kappa_a),
            cavity2: ModeParams::new(-j, kappa_a),
            magnon1: ModeParams::new(0.5 * j, kappa_m),
            magnon2: ModeParams::new(-0.5 * j, kappa_m),
            g1: g,
            g2: g,
            j,
            drive1: Some(drive),
            drive2: Some(drive),
            bath: BathConfig::default(),
        }
    }

    /// [`baseline_double`](Self::baseline_double) with the squeezed input on cavity 2
    /// replaced by vacuum/thermal noise.
    pub fn baseline_single() -> Self {
        Self {
            drive2: None,
            ..Self::baseline_double()
        }
    }

    pub fn mode(&self, mode: Mode) -> &ModeParams {
        match mode {
            Mode::Cavity1 => &self.cavity1,
            Mode::Cavity2 => &self.cavity2,
            Mode::Magnon1 => &self.magnon1,
            Mode::Magnon2 => &self.magnon2,
        }
    }

    pub fn mode_mut(&mut self, mode: Mode) -> &mut ModeParams {
        match mode {
            Mode::Cavity1 => &mut self.cavity1,
            Mode::Cavity2 => &mut self.cavity2,
            Mode::Magnon1 => &mut self.magnon1,
            Mode::Magnon2 => &mut self.magnon2,
        }
    }

    pub fn drive(&self, channel: Channel) -> Option<&SqueezeDrive> {
        match channel {
            Channel::First => self.drive1.as_ref(),
            Channel::Second => self.drive2.as_ref(),
        }
    }

    pub fn drive_mut(&mut self, channel: Channel) -> Option<&mut SqueezeDrive> {
        match channel {
            Channel::First => self.drive1.as_mut(),
            Channel::Second => self.drive2.as_mut(),
        }
    }

    pub fn configuration(&self) -> DriveConfiguration {
        match (self.drive1.is_some(), self.drive2.is_some()) {
            (false, false) => DriveConfiguration::Unsqueezed,
            (true, true) => DriveConfiguration::DoubleSqueezed,
            _ => DriveConfiguration::SingleSqueezed,
        }
    }

    /// The same physical system with every subsystem-1 and subsystem-2 label exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            cavity1: self.cavity2,
            cavity2: self.cavity1,
            magnon1: self.magnon2,
            magnon2: self.magnon1,
            g1: self.g2,
            g2: self.g1,
            j: self.j,
            drive1: self.drive2,
            drive2: self.drive1,
            bath: self.bath,
        }
    }

    /// Checks every field invariant, reporting the first violation with its dotted path.
    pub fn validate(&self) -> Result<()> {
        let bath = &self.bath;
        if !(bath.temperature.is_finite() && bath.temperature >= 0.0) {
            return Err(Error::invalid("bath.temperature", "must be finite and >= 0"));
        }
        if !(bath.carrier_frequency.is_finite() && bath.carrier_frequency > 0.0) {
            return Err(Error::invalid("bath.carrier_frequency", "must be finite and > 0"));
        }
        for mode in Mode::ALL {
            let p = self.mode(mode);
            if !p.detuning.is_finite() {
                return Err(Error::invalid(format!("{}.detuning", mode.name()), "must be finite"));
            }
            if bath.carrier_frequency + p.detuning <= 0.0 {
                return Err(Error::invalid(
                    format!("{}.detuning", mode.name()),
                    "lab-frame frequency carrier + detuning must be > 0",
                ));
            }
            if !(p.decay.is_finite() && p.decay > 0.0) {
                return Err(Error::invalid(
                    format!("{}.decay", mode.name()),
                    format!("must be finite and > 0, got {}", p.decay),
                ));
            }
        }
        for (field, value) in [("coupling.g1", self.g1), ("coupling.g2", self.g2), ("coupling.J", self.j)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        for channel in [Channel::First, Channel::Second] {
            if let Some(d) = self.drive(channel) {
                let section = format!("drive{}", channel.index());
                if !(d.r.is_finite() && d.r >= 0.0) {
                    return Err(Error::invalid(format!("{section}.r"), format!("must be >= 0, got {}", d.r)));
                }
                if !d.theta.is_finite() {
                    return Err(Error::invalid(format!("{section}.theta"), "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Lab-frame angular frequency ω_s + Δ of a mode.
    pub fn lab_frequency(&self, mode: Mode) -> f64 {
        self.bath.carrier_frequency + self.mode(mode).detuning
    }
}

/// Mean Bose occupation `1 / (exp(ħω / k_B T) − 1)`; exactly zero at `T = 0`.
pub fn thermal_occupation(frequency: f64, temperature: f64) -> Result<f64> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {frequency}")));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * frequency / (BOLTZMANN * temperature)).exp_m1())
}

/// `(N_s, M_s) = (sinh² r, e^{iθ} sinh r cosh r)`.
pub fn squeeze_occupations(drive: &SqueezeDrive) -> (f64, Complex64) {
    let (s, c) = (drive.r.sinh(), drive.r.cosh());
    (s * s, Complex64::from_polar(s * c, drive.theta))
}

const ROT: Matrix2<f64> = Matrix2::new(0.0, 1.0, -1.0, 0.0);

/// Drift matrix `A` of the quadrature equations of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix8);

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }
}

/// Symmetric, block-diagonal diffusion matrix `D` of the input noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Matrix8);

impl DiffusionMatrix {
    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    /// The 2×2 diagonal block belonging to `mode`.
    pub fn block(&self, mode: Mode) -> Matrix2<f64> {
        let o = mode.offset();
        self.0.fixed_view::<2, 2>(o, o).into_owned()
    }
}

fn set_block(m: &mut Matrix8, row: Mode, col: Mode, block: &Matrix2<f64>) {
    m.fixed_view_mut::<2, 2>(row.offset(), col.offset()).copy_from(block);
}

/// Builds `A`: each mode contributes `−κ I + Δ R` on its diagonal block and each
/// beam-splitter coupling `c` contributes `c R` to both off-diagonal blocks, with
/// `R = [[0, 1], [−1, 0]]`.
pub fn build_drift(config: &SystemConfig) -> DriftMatrix {
    let mut a = Matrix8::zeros();
    for mode in Mode::ALL {
        let p = config.mode(mode);
        let block = Matrix2::identity() * -p.decay + ROT * p.detuning;
        set_block(&mut a, mode, mode, &block);
    }
    for (m1, m2, c) in [
        (Mode::Cavity1, Mode::Cavity2, config.j),
        (Mode::Cavity1, Mode::Magnon1, config.g1),
        (Mode::Cavity2, Mode::Magnon2, config.g2),
    ] {
        let block = ROT * c;
        set_block(&mut a, m1, m2, &block);
        set_block(&mut a, m2, m1, &block);
    }
    DriftMatrix(a)
}

/// Diffusion block of a cavity fed by an ideal squeezed vacuum.
fn squeezed_block(decay: f64, drive: &SqueezeDrive) -> Matrix2<f64> {
    let (n, m) = squeeze_occupations(drive);
    let base = 2.0 * n + 1.0;
    let block = Matrix2::new(base + 2.0 * m.re, 2.0 * m.im, 2.0 * m.im, base - 2.0 * m.re) * decay;
    // (2N+1)² − 4|M|² = 1 for |M|² = N(N+1), so the block is positive definite.
    debug_assert!(block.determinant() > -1e-9 * block.norm_squared().max(1.0));
    block
}

/// Builds `D`: squeezed blocks for driven cavities, `κ (2N + 1) I` thermal blocks
/// for undriven cavities and both magnons, with `N` evaluated at the mode's
/// lab-frame frequency `ω_s + Δ`.
pub fn build_diffusion(config: &SystemConfig) -> Result<DiffusionMatrix> {
    let mut d = Matrix8::zeros();
    let drives = [(Mode::Cavity1, config.drive1), (Mode::Cavity2, config.drive2)];
    for (mode, drive) in drives {
        let decay = config.mode(mode).decay;
        let block = match drive {
            Some(drive) => squeezed_block(decay, &drive),
            None => thermal_block(config, mode)?,
        };
        set_block(&mut d, mode, mode, &block);
    }
    for mode in [Mode::Magnon1, Mode::Magnon2] {
        let block = thermal_block(config, mode)?;
        set_block(&mut d, mode, mode, &block);
    }
    Ok(DiffusionMatrix(d))
}

fn thermal_block(config: &SystemConfig, mode: Mode) -> Result<Matrix2<f64>> {
    let n = thermal_occupation(config.lab_frequency(mode), config.bath.temperature)?;
    Ok(Matrix2::identity() * (config.mode(mode).decay * (2.0 * n + 1.0)))
}
