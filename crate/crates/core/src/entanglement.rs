//! Magnon-magnon logarithmic negativity of the steady state.

use nalgebra::{DMatrix, Matrix2, Matrix4, Schur};

use crate::error::{Error, Result};
use crate::lyapunov::CovarianceMatrix;
use crate::model::Mode;

/// Values of `Σ² − 4 det V` with magnitude below this are treated as zero.
///
/// The discriminant is `(η₊² − η₋²)²`; near the doubly degenerate point its
/// rounding noise is amplified to `√ε` by the square root, which would leave a
/// spurious `E_N ~ 1e−8` on exact vacuum states.
pub const DISCRIMINANT_SLACK: f64 = 1e-12;
/// `−ln 2η⁻` at or below this is reported as exactly zero negativity.
pub const NEGATIVITY_FLOOR: f64 = 1e-12;

/// Two-mode covariance `[[A, C], [Cᵀ, B]]` with 2×2 blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    /// Local block of the first mode.
    pub block_a: Matrix2<f64>,
    /// Local block of the second mode.
    pub block_b: Matrix2<f64>,
    /// Cross-correlations, rows indexed by the first mode.
    pub block_c: Matrix2<f64>,
}

impl TwoModeCovariance {
    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        Self {
            block_a: m.fixed_view::<2, 2>(0, 0).into_owned(),
            block_b: m.fixed_view::<2, 2>(2, 2).into_owned(),
            block_c: m.fixed_view::<2, 2>(0, 2).into_owned(),
        }
    }

    pub fn assembled(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.block_a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.block_b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.block_c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.block_c.transpose());
        m
    }

    /// Exchanges the two modes: `A ↔ B`, `C ↔ Cᵀ`.
    pub fn swapped(&self) -> Self {
        Self {
            block_a: self.block_b,
            block_b: self.block_a,
            block_c: self.block_c.transpose(),
        }
    }

    /// Determinant of the assembled 4×4 matrix by Laplace expansion along the
    /// first two rows.
    pub fn determinant(&self) -> f64 {
        det4(&self.assembled())
    }
}

fn det2(m: &Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn det4(m: &Matrix4<f64>) -> f64 {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
    let s0 = minor(0, 1, 0, 1);
    let s1 = minor(0, 1, 0, 2);
    let s2 = minor(0, 1, 0, 3);
    let s3 = minor(0, 1, 1, 2);
    let s4 = minor(0, 1, 1, 3);
    let s5 = minor(0, 1, 2, 3);
    let c5 = minor(2, 3, 2, 3);
    let c4 = minor(2, 3, 1, 3);
    let c3 = minor(2, 3, 1, 2);
    let c2 = minor(2, 3, 0, 3);
    let c1 = minor(2, 3, 0, 2);
    let c0 = minor(2, 3, 0, 1);
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Restricts `V` to the quadratures `[x_m1, y_m1, x_m2, y_m2]`.
pub fn extract_magnon_block(v: &CovarianceMatrix) -> TwoModeCovariance {
    let (m1, m2) = (Mode::Magnon1.offset(), Mode::Magnon2.offset());
    TwoModeCovariance {
        block_a: v.0.fixed_view::<2, 2>(m1, m1).into_owned(),
        block_b: v.0.fixed_view::<2, 2>(m2, m2).into_owned(),
        block_c: v.0.fixed_view::<2, 2>(m1, m2).into_owned(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult {
    /// Smallest symplectic eigenvalue of the partially transposed state.
    pub eta_minus: f64,
    /// `max(0, −ln 2η⁻)`, with values below [`NEGATIVITY_FLOOR`] reported as 0.
    pub log_negativity: f64,
    /// `log_negativity > 0`.
    pub entangled: bool,
}

/// Logarithmic negativity of a two-mode Gaussian state.
///
/// `Σ = det A + det B − 2 det C` already carries the sign flip of the partial
/// transpose; `η⁻ = √((Σ − √(Σ² − 4 det V)) / 2)`.
///
/// Errors with [`Error::UnphysicalState`] when `det V ≤ 0`, the discriminant is
/// negative beyond [`DISCRIMINANT_SLACK`], or `η⁻` is not positive.
pub fn log_negativity(vmm: &TwoModeCovariance) -> Result<NegativityResult> {
    let det_v = vmm.determinant();
    if !(det_v > 0.0) {
        return Err(Error::UnphysicalState(format!("det V = {det_v:e} is not positive")));
    }
    let sigma = det2(&vmm.block_a) + det2(&vmm.block_b) - 2.0 * det2(&vmm.block_c);
    let mut disc = sigma * sigma - 4.0 * det_v;
    if disc <= -DISCRIMINANT_SLACK {
        return Err(Error::UnphysicalState(format!(
            "Σ² − 4 det V = {disc:e} is negative (Σ = {sigma}, det V = {det_v})"
        )));
    }
    if disc < DISCRIMINANT_SLACK {
        disc = 0.0;
    }
    // η₋² η₊² = det V, so this equals (Σ − √disc)/2 without the cancellation.
    let eta_sq = 2.0 * det_v / (sigma + disc.sqrt());
    if !(eta_sq > 0.0) {
        return Err(Error::UnphysicalState(format!("η⁻² = {eta_sq:e} is not positive")));
    }
    let eta_minus = eta_sq.sqrt();
    let raw = -(2.0 * eta_minus).ln();
    let log_negativity = if raw > NEGATIVITY_FLOOR { raw } else { 0.0 };
    Ok(NegativityResult {
        eta_minus,
        log_negativity,
        entangled: log_negativity > 0.0,
    })
}

/// Symplectic spectrum of an even-dimensional symmetric covariance matrix,
/// ascending: the moduli of the eigenvalues of `i Ω V`, one per mode, with
/// `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = v.nrows();
    if v.ncols() != dim || dim % 2 != 0 || dim == 0 {
        return Err(Error::Precondition(format!(
            "covariance must be square with even dimension, got {:?}",
            v.shape()
        )));
    }
    if (v - v.transpose()).amax() > 1e-9 * v.amax().max(1.0) {
        return Err(Error::Precondition("covariance matrix is not symmetric".into()));
    }
    let mut omega_v = DMatrix::<f64>::zeros(dim, dim);
    for k in (0..dim).step_by(2) {
        for c in 0..dim {
            omega_v[(k, c)] = v[(k + 1, c)];
            omega_v[(k + 1, c)] = -v[(k, c)];
        }
    }
    let schur = Schur::try_new(omega_v, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("eigenvalue iteration for the symplectic spectrum did not converge".into()))?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    // The spectrum of ΩV is {±i ν_k}: adjacent sorted moduli pair up.
    Ok(moduli.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix8;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_mode_squeezed(r: f64) -> TwoModeCovariance {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        TwoModeCovariance {
            block_a: Matrix2::identity() * c,
            block_b: Matrix2::identity() * c,
            block_c: Matrix2::new(s, 0.0, 0.0, -s),
        }
    }

    fn local_rotation(phi1: f64, phi2: f64) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&nalgebra::Rotation2::new(phi1).into_inner());
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&nalgebra::Rotation2::new(phi2).into_inner());
        m
    }

    #[test]
    fn vacuum_has_no_negativity() {
        let vac = TwoModeCovariance::from_matrix(&(Matrix4::identity() * 0.5));
        let res = log_negativity(&vac).unwrap();
        assert_relative_eq!(res.eta_minus, 0.5, max_relative = 1e-15);
        assert_eq!(res.log_negativity, 0.0);
        assert!(!res.entangled);
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        for r in [0.3, 0.9, 1.5] {
            let res = log_negativity(&two_mode_squeezed(r)).unwrap();
            assert!((res.log_negativity - 2.0 * r).abs() < 1e-10, "r = {r}: {}", res.log_negativity);
            assert!(res.entangled);
        }
    }

    #[test]
    fn closed_form_determinant_matches_lu() {
        let m = Matrix4::new(
            2.0, 0.3, -0.1, 0.7, 0.3, 1.5, 0.2, -0.4, -0.1, 0.2, 3.0, 0.5, 0.7, -0.4, 0.5, 2.2,
        );
        let t = TwoModeCovariance::from_matrix(&m);
        assert_relative_eq!(t.determinant(), m.determinant(), max_relative = 1e-13);
    }

    #[test]
    fn extraction_selects_magnon_rows() {
        let v = CovarianceMatrix(Matrix8::identity() * 0.5);
        let t = extract_magnon_block(&v);
        assert_eq!(t.assembled(), Matrix4::identity() * 0.5);
        assert_eq!(t.block_c, Matrix2::zeros());

        let mut m = Matrix8::identity();
        m[(0, 4)] = 0.3;
        m[(4, 0)] = 0.3;
        m[(2, 7)] = -0.2;
        m[(7, 2)] = -0.2;
        m[(4, 6)] = 0.125;
        let t = extract_magnon_block(&CovarianceMatrix(m));
        assert_eq!(t.block_c[(0, 0)], 0.125);
        assert_eq!(t.block_c[(1, 1)], 0.0);
        assert_eq!(t.block_a, Matrix2::identity());
    }

    #[test]
    fn unphysical_input_is_rejected() {
        let bad = TwoModeCovariance {
            block_a: Matrix2::identity() * 0.1,
            block_b: Matrix2::identity() * 0.1,
            block_c: Matrix2::new(1.0, 0.0, 0.0, 1.0),
        };
        assert!(matches!(log_negativity(&bad), Err(Error::UnphysicalState(_))));
        let singular = TwoModeCovariance::from_matrix(&Matrix4::zeros());
        assert!(matches!(log_negativity(&singular), Err(Error::UnphysicalState(_))));
    }

    #[test]
    fn symplectic_spectrum_of_simple_states() {
        let vac = symplectic_eigenvalues(&(DMatrix::identity(6, 6) * 0.5)).unwrap();
        assert_eq!(vac.len(), 3);
        assert!(vac.iter().all(|v| (v - 0.5).abs() < 1e-14));

        let thermal = symplectic_eigenvalues(&(DMatrix::identity(2, 2) * 2.7)).unwrap();
        assert_eq!(thermal.len(), 1);
        assert_relative_eq!(thermal[0], 2.7, max_relative = 1e-14);

        // A pure two-mode squeezed state has every symplectic eigenvalue at 1/2.
        let tms = two_mode_squeezed(0.8).assembled();
        let nu = symplectic_eigenvalues(&DMatrix::from_column_slice(4, 4, tms.as_slice())).unwrap();
        assert!(nu.iter().all(|v| (v - 0.5).abs() < 1e-12), "{nu:?}");
    }

    #[test]
    fn symplectic_rejects_odd_dimension() {
        assert!(symplectic_eigenvalues(&DMatrix::identity(3, 3)).is_err());
    }

    proptest! {
        #[test]
        fn local_rotations_preserve_negativity(r in 0.0f64..2.0, phi1 in 0.0f64..6.3, phi2 in 0.0f64..6.3, n in 0.0f64..0.5) {
            let base = two_mode_squeezed(r).assembled() + Matrix4::identity() * n;
            let rot = local_rotation(phi1, phi2);
            let turned = TwoModeCovariance::from_matrix(&(rot * base * rot.transpose()));
            let a = log_negativity(&TwoModeCovariance::from_matrix(&base)).unwrap();
            let b = log_negativity(&turned).unwrap();
            prop_assert!((a.eta_minus - b.eta_minus).abs() < 1e-10);
            prop_assert!((a.log_negativity - b.log_negativity).abs() < 1e-10);
        }

        #[test]
        fn label_swap_preserves_negativity(r in 0.0f64..2.0, n1 in 0.0f64..1.0, n2 in 0.0f64..1.0) {
            let mut t = two_mode_squeezed(r);
            t.block_a += Matrix2::identity() * n1;
            t.block_b += Matrix2::new(n2, 0.1 * n2, 0.1 * n2, 0.5 * n2);
            let a = log_negativity(&t).unwrap();
            let b = log_negativity(&t.swapped()).unwrap();
            prop_assert_eq!(a.log_negativity, b.log_negativity);
        }

        #[test]
        fn product_states_are_separable(a1 in 0.5f64..5.0, a2 in 0.5f64..5.0, b1 in 0.5f64..5.0, b2 in 0.5f64..5.0) {
            // diag(a1, a2) is physical when a1 a2 >= 1/4, guaranteed here.
            let t = TwoModeCovariance {
                block_a: Matrix2::new(a1, 0.0, 0.0, a2),
                block_b: Matrix2::new(b1, 0.0, 0.0, b2),
                block_c: Matrix2::zeros(),
            };
            let res = log_negativity(&t).unwrap();
            prop_assert_eq!(res.log_negativity, 0.0);
            prop_assert!(!res.entangled);
        }

        #[test]
        fn negativity_increases_with_squeezing(r in 0.0f64..2.0, dr in 0.01f64..0.5) {
            let lo = log_negativity(&two_mode_squeezed(r)).unwrap().log_negativity;
            let hi = log_negativity(&two_mode_squeezed(r + dr)).unwrap().log_negativity;
            prop_assert!(hi > lo);
        }

        #[test]
        fn entangled_flag_consistent(r in 0.0f64..1.0, n in 0.0f64..1.0) {
            let mut t = two_mode_squeezed(r);
            t.block_a += Matrix2::identity() * n;
            t.block_b += Matrix2::identity() * n;
            let res = log_negativity(&t).unwrap();
            prop_assert_eq!(res.entangled, res.log_negativity > 0.0);
            prop_assert_eq!(res.entangled, res.eta_minus < 0.5 * (-NEGATIVITY_FLOOR).exp());
        }
    }
}
