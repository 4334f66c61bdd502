//! Benchmark fixtures shared by the criterion targets.

use magnon_core::{build_diffusion, build_drift, SystemConfig};
use nalgebra::DMatrix;

/// Dense drift and diffusion of the double-squeezed reference configuration.
pub fn baseline_matrices() -> (DMatrix<f64>, DMatrix<f64>) {
    let cfg = SystemConfig::baseline_double();
    let a = build_drift(&cfg);
    let d = build_diffusion(&cfg).expect("reference configuration is valid");
    (
        DMatrix::from_column_slice(8, 8, a.matrix().as_slice()),
        DMatrix::from_column_slice(8, 8, d.matrix().as_slice()),
    )
}
