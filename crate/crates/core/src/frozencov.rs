//! Inverse covariance matrices of the freezing central limit theorems and the
//! covariance matrices obtained from them by two independent routes.
//!
//! * Jacobi, algebraic coordinates: `S_N` centred at the Jacobi zeros.
//! * Jacobi, trigonometric coordinates: `S~_N = D S_N D` with
//!   `D = diag(2 sqrt(1 - z_i^2))`, spectrum `2k(2N + a + b + 1 - k)`.
//! * Laguerre: `S_N` in the variables `r_i = sqrt(z_i)`, spectrum `2k`.
//!
//! The spectral route uses the closed-form eigenvalues and the orthogonal
//! matrix `T_N` built from dual polynomials; the direct route inverts `S_N`
//! by Cholesky.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::dualpoly::{build_t_matrix, OrthoMatrix};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_difference, max_abs_entry, pairwise_sum, spd_inverse};
use crate::orthopoly::{EnsembleParams, Family, PolyWeight, ZeroSet};

/// Relative tolerance of the `S~ = D S D` consistency check.
pub const D_CONJUGATION_TOL: f64 = 1e-10;

const SPACING_TOL: f64 = 1e-13;

fn check_spacing(zeros: &[f64]) -> Result<()> {
    for i in 0..zeros.len() {
        for j in i + 1..zeros.len() {
            if (zeros[i] - zeros[j]).abs() < SPACING_TOL * zeros[i].abs().max(1.0) {
                return Err(Error::DegenerateSpacing { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

fn jacobi_params(zeros: &ZeroSet, alpha: f64, beta: f64) -> Result<()> {
    match zeros.weight() {
        PolyWeight::Jacobi { alpha: a, beta: b } if a == alpha && b == beta => Ok(()),
        w => Err(Error::Dimension(format!(
            "zeros belong to {w:?}, not Jacobi({alpha}, {beta})"
        ))),
    }
}

/// Sum over `l != j` of `term(l)`, pairwise summed.
fn off_sum(n: usize, j: usize, term: impl Fn(usize) -> f64) -> f64 {
    let terms: Vec<f64> = (0..n).filter(|&l| l != j).map(term).collect();
    pairwise_sum(&terms)
}

/// `S_N` for the Jacobi ensemble in algebraic coordinates.
pub fn inv_cov_jacobi_algebraic(zeros: &ZeroSet, alpha: f64, beta: f64) -> Result<DMatrix<f64>> {
    jacobi_params(zeros, alpha, beta)?;
    let z = zeros.zeros();
    check_spacing(z)?;
    let n = z.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let zj = z[j];
            off_sum(n, j, |l| (zj - z[l]).powi(-2))
                + 0.5 * (alpha + 1.0) / (1.0 - zj).powi(2)
                + 0.5 * (beta + 1.0) / (1.0 + zj).powi(2)
        } else {
            -(z[i] - z[j]).powi(-2)
        }
    }))
}

/// `D = diag(2 sqrt(1 - z_i^2))`.
pub fn trig_scaling(zeros: &ZeroSet) -> Vec<f64> {
    zeros.zeros().iter().map(|z| 2.0 * ((1.0 - z) * (1.0 + z)).sqrt()).collect()
}

/// `S~_N` for the Jacobi ensemble in trigonometric coordinates, verified
/// against `D S_N D`.
pub fn inv_cov_jacobi_trig(zeros: &ZeroSet, alpha: f64, beta: f64) -> Result<DMatrix<f64>> {
    jacobi_params(zeros, alpha, beta)?;
    let z = zeros.zeros();
    check_spacing(z)?;
    let n = z.len();
    let trig = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let zj = z[j];
            let c = (1.0 - zj) * (1.0 + zj);
            4.0 * off_sum(n, j, |l| c / (zj - z[l]).powi(2))
                + 2.0 * (alpha + 1.0) * (1.0 + zj) / (1.0 - zj)
                + 2.0 * (beta + 1.0) * (1.0 - zj) / (1.0 + zj)
        } else {
            -4.0 * ((1.0 - z[j]) * (1.0 + z[j]) * (1.0 - z[i]) * (1.0 + z[i])).sqrt() / (z[i] - z[j]).powi(2)
        }
    });

    let d = trig_scaling(zeros);
    let alg = inv_cov_jacobi_algebraic(zeros, alpha, beta)?;
    let conj = DMatrix::from_fn(n, n, |i, j| d[i] * alg[(i, j)] * d[j]);
    let gap = max_abs_difference(&trig, &conj);
    let scale = max_abs_entry(&trig);
    if gap > D_CONJUGATION_TOL * scale {
        return Err(Error::Consistency(format!(
            "|S~ - D S D|_max = {gap:e} exceeds {D_CONJUGATION_TOL:e} x {scale:e}"
        )));
    }
    Ok(trig)
}

/// `S_N` for the Laguerre ensemble, with `r_i = sqrt(z_i)`.
pub fn inv_cov_laguerre(zeros: &ZeroSet, nu: f64) -> Result<DMatrix<f64>> {
    match zeros.weight() {
        PolyWeight::Laguerre { nu: v } if v == nu => {}
        w => {
            return Err(Error::Dimension(format!(
                "zeros belong to {w:?}, not Laguerre({nu})"
            )))
        }
    }
    check_spacing(zeros.zeros())?;
    let r: Vec<f64> = zeros.zeros().iter().map(|z| z.sqrt()).collect();
    check_spacing(&r)?;
    let n = r.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let ri = r[i];
            let terms: Vec<f64> = (0..n)
                .filter(|&l| l != i)
                .flat_map(|l| [(ri - r[l]).powi(-2), (ri + r[l]).powi(-2)])
                .collect();
            1.0 + nu / (ri * ri) + pairwise_sum(&terms)
        } else {
            (r[i] + r[j]).powi(-2) - (r[i] - r[j]).powi(-2)
        }
    }))
}

/// Closed-form eigenvalues `lambda_1 < ... < lambda_N` of `S~_N` (Jacobi) or
/// `S_N` (Laguerre).
pub fn closed_form_eigenvalues(params: &EnsembleParams) -> Vec<f64> {
    let n = params.dim_n() as f64;
    (1..=params.dim_n())
        .map(|k| {
            let k = k as f64;
            match params.weight() {
                PolyWeight::Jacobi { alpha, beta } => 2.0 * k * (2.0 * n + alpha + beta + 1.0 - k),
                PolyWeight::Laguerre { .. } => 2.0 * k,
            }
        })
        .collect()
}

fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::export::matrix_rows(m).serialize(s)
}

fn serialize_ortho<S: Serializer>(t: &OrthoMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::export::matrix_rows(t.entries()).serialize(s)
}

/// Everything known about one frozen covariance matrix.
///
/// For the algebraic Jacobi family `s_matrix` is `S_N`, while `eigenvalues`
/// and `t_matrix` diagonalise the congruent trigonometric matrix `S~_N`; the
/// spectral covariance is then `D T diag(1/lambda) T^T D`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralCov {
    pub params: EnsembleParams,
    pub zeros: Vec<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub s_matrix: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    #[serde(serialize_with = "serialize_ortho")]
    pub t_matrix: OrthoMatrix,
    pub orthogonality_residual: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub sigma_spectral: DMatrix<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub sigma_direct: DMatrix<f64>,
    pub route_discrepancy: f64,
}

impl SpectralCov {
    /// Entry of the covariance (direct route), 1-based like the theory.
    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        self.sigma_direct[(i - 1, j - 1)]
    }
}

/// Builds the inverse covariance, its spectral data and both covariance routes.
pub fn assemble(params: &EnsembleParams) -> Result<SpectralCov> {
    let n = params.dim_n();
    let table = params.recurrence();
    let zero_set = crate::orthopoly::find_zeros(&table, n)?;
    let t_matrix = build_t_matrix(params, &table, &zero_set)?;
    let eigenvalues = closed_form_eigenvalues(params);

    let s_matrix = match (params.family(), params.weight()) {
        (Family::JacobiAlgebraic, PolyWeight::Jacobi { alpha, beta }) => {
            inv_cov_jacobi_algebraic(&zero_set, alpha, beta)?
        }
        (Family::JacobiTrigonometric, PolyWeight::Jacobi { alpha, beta }) => {
            inv_cov_jacobi_trig(&zero_set, alpha, beta)?
        }
        (Family::Laguerre, PolyWeight::Laguerre { nu }) => inv_cov_laguerre(&zero_set, nu)?,
        _ => unreachable!("EnsembleParams pairs families with matching weights"),
    };

    let t = t_matrix.entries();
    let inv_lambda = DVector::from_iterator(n, eigenvalues.iter().map(|l| 1.0 / l));
    let mut sigma_spectral = t * DMatrix::from_diagonal(&inv_lambda) * t.transpose();
    if params.family() == Family::JacobiAlgebraic {
        let d = trig_scaling(&zero_set);
        sigma_spectral = DMatrix::from_fn(n, n, |i, j| d[i] * sigma_spectral[(i, j)] * d[j]);
    }
    let sigma_direct = spd_inverse(&s_matrix)?;
    let route_discrepancy = max_abs_difference(&sigma_spectral, &sigma_direct);

    Ok(SpectralCov {
        params: *params,
        zeros: zero_set.zeros().to_vec(),
        orthogonality_residual: t_matrix.max_orthogonality_residual(),
        s_matrix,
        eigenvalues,
        t_matrix,
        sigma_spectral,
        sigma_direct,
        route_discrepancy,
    })
}
