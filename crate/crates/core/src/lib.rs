//! Steady-state Gaussian model of two coupled microwave cavities, each hosting a
//! magnon mode, with squeezed-vacuum inputs on one or both cavities.
//!
//! The pipeline is linear-Gaussian throughout:
//!
//! 1. [`model`] turns a [`SystemConfig`] into the 8×8 drift matrix `A` and the
//!    diffusion matrix `D` in the quadrature ordering
//!    `[x_a1, y_a1, x_a2, y_a2, x_m1, y_m1, x_m2, y_m2]`.
//! 2. [`lyapunov`] checks that `A` is Hurwitz and solves `A V + V Aᵀ = −D`.
//! 3. [`entanglement`] restricts `V` to the two magnon modes and evaluates the
//!    logarithmic negativity.
//! 4. [`sweep`] maps the pipeline over one- and two-dimensional parameter grids.
//!
//! Rates are angular frequencies in rad/s, angles are radians and temperatures are
//! kelvin. Vacuum quadrature variance is 1/2.

pub mod entanglement;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod sweep;

pub use entanglement::{
    extract_magnon_block, log_negativity, symplectic_eigenvalues, NegativityResult,
    TwoModeCovariance,
};
pub use error::{Error, Result};
pub use lyapunov::{is_stable, solve_steady_state, CovarianceMatrix, StabilityReport};
pub use model::{
    build_diffusion, build_drift, squeeze_occupations, thermal_occupation, BathConfig,
    DiffusionMatrix, DriftMatrix, DriveConfiguration, Mode, ModeParams, SqueezeDrive,
    SystemConfig,
};
pub use sweep::{
    analyze, find_optimum, run_sweep, survival_temperature, Optimum, Param, SteadyState,
    SweepAxis, SweepOptions, SweepResult,
};

/// Dense 8×8 real matrix in the quadrature ordering used throughout the crate.
pub type Matrix8 = nalgebra::SMatrix<f64, 8, 8>;
