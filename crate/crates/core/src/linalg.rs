//! Dense and tridiagonal symmetric linear algebra used across the crate.
//!
//! The symmetric tridiagonal eigenvalue solver is the workhorse behind the
//! zero finder: implicit-shift QL with a Sturm-sequence bisection fallback.
//! Dense symmetric eigenvalues go through a Householder reduction to the same
//! tridiagonal solver. Positive definite solves are delegated to nalgebra's
//! Cholesky factorization.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};

/// Maximum number of QL sweeps spent on a single eigenvalue.
pub const QL_SWEEP_CAP: usize = 60;

const BISECTION_CAP: usize = 200;

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal and
/// off-diagonal (`off.len() == diag.len() - 1`), sorted ascending.
///
/// Runs implicit QL first; if any eigenvalue exceeds the sweep cap the whole
/// spectrum is recomputed by Sturm bisection.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_tridiagonal(diag, off)?;
    let mut values = match implicit_ql(diag, off) {
        Ok(values) => values,
        Err(_) => sturm_bisection_all(diag, off)?,
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn check_tridiagonal(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::Dimension("empty tridiagonal matrix".into()));
    }
    if off.len() + 1 != diag.len() {
        return Err(Error::Dimension(format!(
            "diagonal of length {} needs {} off-diagonal entries, got {}",
            diag.len(),
            diag.len() - 1,
            off.len()
        )));
    }
    Ok(())
}

/// Implicit-shift QL on a copy of the input (eigenvalues only, unsorted).
pub fn implicit_ql(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_tridiagonal(diag, off)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_SWEEP_CAP {
                return Err(Error::Convergence {
                    what: "implicit QL",
                    cap: QL_SWEEP_CAP,
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues by bisection on the Sturm count, ascending.
pub fn sturm_bisection_all(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_tridiagonal(diag, off)?;
    let n = diag.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    lo -= pad;
    hi += pad;

    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..BISECTION_CAP {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    return Ok(mid);
                }
                if sturm_count(diag, off, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Err(Error::Convergence {
                what: "Sturm bisection",
                cap: BISECTION_CAP,
            })
        })
        .collect()
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// Returns `(diagonal, off_diagonal)`; only the lower triangle is read.
pub fn householder_tridiagonalize(matrix: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::Dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let mut a = matrix.clone();
    for j in 0..n {
        for i in 0..j {
            a[(i, j)] = a[(j, i)];
        }
    }

    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let mut v: Vec<f64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            off.push(0.0);
            continue;
        }
        let alpha = -norm.copysign(v[0]);
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            off.push(alpha);
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        // A' = A - 2 v w^T - 2 w v^T with w = p - (v.p) v, p = A v
        let p: Vec<f64> = (0..m)
            .map(|i| (0..m).map(|j| a[(k + 1 + i, k + 1 + j)] * v[j]).sum())
            .collect();
        let vp: f64 = v.iter().zip(&p).map(|(x, y)| x * y).sum();
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - vp * vi).collect();
        for i in 0..m {
            for j in 0..m {
                a[(k + 1 + i, k + 1 + j)] -= 2.0 * (v[i] * w[j] + w[i] * v[j]);
            }
        }
        off.push(alpha);
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    Ok((diag, off))
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (diag, off) = householder_tridiagonalize(matrix)?;
    tridiagonal_eigenvalues(&diag, &off)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Cholesky::new(matrix.clone())
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

pub fn max_abs_entry(matrix: &DMatrix<f64>) -> f64 {
    matrix.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `max |m_ij - delta_ij|`.
pub fn identity_deviation(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn max_abs_difference(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}
