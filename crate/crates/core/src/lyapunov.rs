//! Stability test and steady-state solution of `A V + V Aᵀ = −D`.
//!
//! The production path is Bartels–Stewart: reduce `A` to real Schur form
//! `A = Q T Qᵀ`, solve the quasi-triangular equation `T Y + Y Tᵀ = −Qᵀ D Q` by
//! block back-substitution, and map back with `V = Q Y Qᵀ`. [`kronecker`] keeps the
//! dense vectorised solve as an independent reference.

use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result};
use crate::model::{DiffusionMatrix, DriftMatrix};
use crate::Matrix8;

/// Relative margin by which the spectral abscissa must lie below zero.
pub const STABILITY_MARGIN: f64 = 1e-9;
/// Relative bound on `‖A V + V Aᵀ + D‖_max` accepted from the solver.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const SCHUR_EPS: f64 = f64::EPSILON;
const SCHUR_MAX_ITER: usize = 10_000;

/// Steady-state covariance matrix `V` of the eight quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix8);

impl CovarianceMatrix {
    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// Largest real part among the eigenvalues of `A`.
    pub spectral_abscissa: f64,
}

/// Largest real part of the eigenvalues of a square matrix.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<f64> {
    let schur = Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numerical(format!("eigenvalue iteration did not converge for {a}")))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `A` is stable when its spectral abscissa is below `−1e−9 ‖A‖_max`.
pub fn is_stable(a: &DriftMatrix) -> Result<StabilityReport> {
    let dense = DMatrix::from_column_slice(8, 8, a.0.as_slice());
    let abscissa = spectral_abscissa(&dense)?;
    Ok(StabilityReport {
        stable: abscissa < -STABILITY_MARGIN * a.0.amax(),
        spectral_abscissa: abscissa,
    })
}

/// `‖A V + V Aᵀ + D‖_max`.
pub fn residual(a: &DMatrix<f64>, v: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    (a * v + v * a.transpose() + d).amax()
}

/// Solves `A X + X Aᵀ = C` for a square `A` whose spectrum has no pair
/// `λᵢ + λⱼ = 0`. No symmetry is assumed.
pub fn solve_lyapunov(a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || c.shape() != (n, n) {
        return Err(Error::Numerical(format!(
            "shape mismatch: A is {:?}, C is {:?}",
            a.shape(),
            c.shape()
        )));
    }
    let schur = Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numerical(format!("real Schur decomposition did not converge for {a}")))?;
    let (q, t) = schur.unpack();
    let f = q.transpose() * c * &q;
    let y = solve_quasi_triangular(&t, &f)?;
    Ok(&q * y * q.transpose())
}

/// Diagonal blocks of a quasi-upper-triangular matrix as `(start, size)`.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::with_capacity(n);
    let mut k = 0;
    while k < n {
        if k + 1 < n && t[(k + 1, k)] != 0.0 {
            blocks.push((k, 2));
            k += 2;
        } else {
            blocks.push((k, 1));
            k += 1;
        }
    }
    blocks
}

/// Back-substitution for `T Y + Y Tᵀ = F` with `T` in real Schur form.
///
/// Block `(i, j)` satisfies
/// `T_ii Y_ij + Y_ij T_jjᵀ = F_ij − Σ_{k>i} T_ik Y_kj − Σ_{l>j} Y_il T_jlᵀ`,
/// so sweeping `i` and `j` downwards from the last block only ever reads solved blocks.
fn solve_quasi_triangular(t: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let blocks = diagonal_blocks(t);
    let mut y = DMatrix::<f64>::zeros(n, n);
    for &(ri, pi) in blocks.iter().rev() {
        for &(cj, qj) in blocks.iter().rev() {
            let mut rhs = f.view((ri, cj), (pi, qj)).into_owned();
            let below = ri + pi;
            if below < n {
                rhs -= t.view((ri, below), (pi, n - below)) * y.view((below, cj), (n - below, qj));
            }
            let right = cj + qj;
            if right < n {
                rhs -= y.view((ri, right), (pi, n - right)) * t.view((cj, right), (qj, n - right)).transpose();
            }
            let tii = t.view((ri, ri), (pi, pi)).into_owned();
            let tjj = t.view((cj, cj), (qj, qj)).into_owned();
            let block = solve_small_sylvester(&tii, &tjj, &rhs)?;
            y.view_mut((ri, cj), (pi, qj)).copy_from(&block);
        }
    }
    Ok(y)
}

/// Solves `P X + X Qᵀ = R` for `P` (p×p) and `Q` (q×q) with `p, q ≤ 2` through the
/// column-major vectorisation `(I_q ⊗ P + Q ⊗ I_p) vec X = vec R`.
fn solve_small_sylvester(p: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (np, nq) = (p.nrows(), q.nrows());
    let size = np * nq;
    if size == 1 {
        let denom = p[(0, 0)] + q[(0, 0)];
        if denom == 0.0 {
            return Err(Error::Numerical("singular 1×1 Sylvester block".into()));
        }
        return Ok(DMatrix::from_element(1, 1, r[(0, 0)] / denom));
    }
    let mut k = DMatrix::<f64>::zeros(size, size);
    for col in 0..nq {
        for row in 0..np {
            let idx = row + col * np;
            for m in 0..np {
                k[(idx, m + col * np)] += p[(row, m)];
            }
            for l in 0..nq {
                k[(idx, row + l * np)] += q[(col, l)];
            }
        }
    }
    let rhs = DVector::from_column_slice(r.as_slice());
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical(format!("singular {np}×{nq} Sylvester block")))?;
    Ok(DMatrix::from_column_slice(np, nq, x.as_slice()))
}

/// Steady-state covariance: solves `A V + V Aᵀ = −D` for a stable `A` and returns
/// the symmetrised `(V + Vᵀ) / 2`.
pub fn solve_steady_state(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let report = is_stable(a)?;
    if !report.stable {
        return Err(Error::Unstable {
            spectral_abscissa: report.spectral_abscissa,
        });
    }
    let a_dense = DMatrix::from_column_slice(8, 8, a.0.as_slice());
    let d_dense = DMatrix::from_column_slice(8, 8, d.0.as_slice());
    let v = solve_lyapunov(&a_dense, &(-&d_dense))?;
    let v = (&v + v.transpose()) * 0.5;

    if cfg!(any(debug_assertions, feature = "residual-check")) {
        let res = residual(&a_dense, &v, &d_dense);
        let bound = RESIDUAL_TOLERANCE * d_dense.amax().max(1.0);
        if !(res < bound) {
            return Err(Error::Numerical(format!(
                "Lyapunov residual {res:e} exceeds {bound:e}"
            )));
        }
    }
    Ok(CovarianceMatrix(Matrix8::from_column_slice(v.as_slice())))
}

/// Reference solver by dense vectorisation.
pub mod kronecker {
    use nalgebra::{DMatrix, DVector};

    use crate::error::{Error, Result};

    /// Solves `A X + X Aᵀ = C` as the `n² × n²` system
    /// `(I ⊗ A + A ⊗ I) vec X = vec C` with partial-pivot LU.
    pub fn solve_lyapunov(a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = a.nrows();
        let identity = DMatrix::<f64>::identity(n, n);
        let op = identity.kronecker(a) + a.kronecker(&identity);
        let rhs = DVector::from_column_slice(c.as_slice());
        let x = op
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Kronecker Lyapunov operator".into()))?;
        Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
    }
}
