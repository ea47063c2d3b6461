//! Dual orthogonal polynomials in the sense of de Boor and Saff.
//!
//! For a fixed degree `N` the dual family `Q_{0,N}, ..., Q_{N-1,N}` is
//! generated by reading the orthonormal recurrence coefficients backwards:
//!
//! ```text
//! x Q_k = a_{N-k} Q_{k-1} + b_{N-k-1} Q_k + a_{N-k-1} Q_{k+1},   Q_{-1} = 0
//! ```
//!
//! The starting constant `Q_0` is `1/sqrt(h_N)` for Jacobi and
//! `1/sqrt(N (N + nu - 1))` for Laguerre, which makes the matrix
//! `T_N = (s(z_i) Q_{j-1}(z_i))` orthogonal, with `s(z) = sqrt(1 - z^2)`
//! (Jacobi) or `s(z) = sqrt(z)` (Laguerre).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orthopoly::{eval_with_derivative, EnsembleParams, PolyWeight, RecurrenceTable, ZeroSet};

const RESCALE_ABOVE: f64 = 1e150;

/// `h_N = 4N(N+a)(N+b)(N+a+b) / ((2N+a+b)^2 (2N+a+b-1))`.
pub fn jacobi_h(alpha: f64, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = alpha + beta;
    let t = 2.0 * nf + s;
    // (N+a+b)/(2N+a+b-1) is 0/0 at N = 1, a + b = -1; its value there is 1.
    let ratio = if n == 1 { 1.0 } else { (nf + s) / (t - 1.0) };
    4.0 * nf * (nf + alpha) * (nf + beta) / (t * t) * ratio
}

/// The prescribed value of `Q_{0,N}`.
pub fn dual_start(weight: PolyWeight, n: usize) -> f64 {
    match weight {
        PolyWeight::Jacobi { alpha, beta } => 1.0 / jacobi_h(alpha, beta, n).sqrt(),
        PolyWeight::Laguerre { nu } => {
            let nf = n as f64;
            1.0 / (nf * (nf + nu - 1.0)).sqrt()
        }
    }
}

/// `Q_{0,N}(x), ..., Q_{N-1,N}(x)` at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualEvaluation {
    pub weight: PolyWeight,
    pub n: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

fn check_depth(table: &RecurrenceTable, n: usize) -> Result<()> {
    if n == 0 || n > table.n_max() {
        return Err(Error::Domain(format!(
            "dual degree N = {n} must lie in 1..={}",
            table.n_max()
        )));
    }
    Ok(())
}

/// Forward evaluation of the reversed recurrence at an arbitrary point.
pub fn dual_eval_all(table: &RecurrenceTable, n: usize, x: f64) -> Result<DualEvaluation> {
    check_depth(table, n)?;
    let mut values = Vec::with_capacity(n);
    values.push(dual_start(table.weight(), n));
    let mut prev = 0.0;
    for k in 0..n - 1 {
        let q = values[k];
        let back = if k == 0 { 0.0 } else { table.a(n - k) * prev };
        let next = ((x - table.b(n - k - 1)) * q - back) / table.a(n - k - 1);
        prev = q;
        values.push(next);
    }
    Ok(DualEvaluation {
        weight: table.weight(),
        n,
        x,
        values,
    })
}

/// Dual values at a zero `z` of the degree-`N` polynomial.
///
/// Runs the same reversed recurrence from the terminal end (`Q_{N,N}(z) = 0`)
/// down to `k = 0` and rescales to the prescribed `Q_{0,N}`. Away from the
/// oscillatory region the forward direction amplifies rounding errors
/// exponentially (large Laguerre zeros); this direction does not.
pub fn dual_eval_at_zero(table: &RecurrenceTable, n: usize, z: f64) -> Result<DualEvaluation> {
    check_depth(table, n)?;
    let mut rev = Vec::with_capacity(n);
    rev.push(1.0);
    let mut next = 0.0;
    // rev[i] holds Q_{N-1-i} up to a common factor
    for k in (1..n).rev() {
        let q = *rev.last().unwrap();
        let ahead = if k + 1 == n { 0.0 } else { table.a(n - k - 1) * next };
        let mut below = ((z - table.b(n - k - 1)) * q - ahead) / table.a(n - k);
        next = q;
        if below.abs() > RESCALE_ABOVE {
            let f = 1.0 / RESCALE_ABOVE;
            rev.iter_mut().for_each(|v| *v *= f);
            next *= f;
            below *= f;
        }
        rev.push(below);
    }
    let q0 = *rev.last().unwrap();
    if q0 == 0.0 || !q0.is_finite() {
        return Err(Error::Consistency(format!(
            "dual recurrence degenerates at z = {z}"
        )));
    }
    let scale = dual_start(table.weight(), n) / q0;
    let values = rev.into_iter().rev().map(|v| v * scale).collect();
    Ok(DualEvaluation {
        weight: table.weight(),
        n,
        x: z,
        values,
    })
}

/// Weights of the discrete measure making `Q_{k,N}` orthonormal after
/// dividing out the starting constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualWeights {
    weights: Vec<f64>,
}

impl DualWeights {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        crate::linalg::pairwise_sum(&self.weights)
    }
}

/// Dual Christoffel numbers `w*_i = p_{N-1}(z_i) / (a_N p_N'(z_i))`.
///
/// The normalising coefficient is the off-diagonal `a_N`; positivity and
/// unit total mass are verified on the result.
pub fn dual_christoffel(table: &RecurrenceTable, n: usize, zeros: &ZeroSet) -> Result<DualWeights> {
    check_depth(table, n)?;
    if zeros.len() != n || zeros.weight() != table.weight() {
        return Err(Error::Dimension(format!(
            "zero set of size {} does not belong to this table at degree {n}",
            zeros.len()
        )));
    }
    let a_n = table.a(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &z) in zeros.zeros().iter().enumerate() {
        let (p_prev, _) = eval_with_derivative(table, n - 1, z);
        let (_, dp) = eval_with_derivative(table, n, z);
        let w = p_prev / (a_n * dp);
        if !(w > 0.0) {
            return Err(Error::NonPositiveWeight { index: i + 1, value: w });
        }
        weights.push(w);
    }
    let out = DualWeights { weights };
    let total = out.sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Consistency(format!(
            "dual Christoffel numbers sum to {total}, not 1"
        )));
    }
    Ok(out)
}

/// The orthogonal matrix `T_N` with its measured orthogonality residual.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMatrix {
    entries: DMatrix<f64>,
    max_orthogonality_residual: f64,
}

impl OrthoMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        let n = entries.ncols();
        let gram = entries.transpose() * &entries;
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((gram[(i, j)] - target).abs());
            }
        }
        OrthoMatrix {
            entries,
            max_orthogonality_residual: residual,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn max_orthogonality_residual(&self) -> f64 {
        self.max_orthogonality_residual
    }

    /// Column `j` (0-based), the eigenvector for `lambda_{j+1}`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.entries.column(j).iter().copied().collect()
    }
}

/// `T[i][j] = s(z_i) Q_{j-1,N}(z_i)` for the ensemble's family.
pub fn build_t_matrix(
    params: &EnsembleParams,
    table: &RecurrenceTable,
    zeros: &ZeroSet,
) -> Result<OrthoMatrix> {
    let n = params.dim_n();
    if zeros.len() != n || table.n_max() < n {
        return Err(Error::Dimension(format!(
            "N = {n} needs {n} zeros and a table of depth >= {n} (got {} zeros, depth {})",
            zeros.len(),
            table.n_max()
        )));
    }
    if table.weight() != params.weight() || zeros.weight() != params.weight() {
        return Err(Error::Dimension(
            "parameters, recurrence table and zeros disagree".into(),
        ));
    }
    let mut entries = DMatrix::zeros(n, n);
    for (i, &z) in zeros.zeros().iter().enumerate() {
        let scale = match params.weight() {
            PolyWeight::Jacobi { .. } => ((1.0 - z) * (1.0 + z)).sqrt(),
            PolyWeight::Laguerre { .. } => z.sqrt(),
        };
        let dual = dual_eval_at_zero(table, n, z)?;
        for (j, q) in dual.values.iter().enumerate() {
            entries[(i, j)] = scale * q;
        }
    }
    Ok(OrthoMatrix::new(entries))
}
