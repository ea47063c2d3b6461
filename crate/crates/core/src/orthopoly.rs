//! Orthonormal Jacobi and Laguerre polynomials: recurrence tables, forward
//! evaluation and zeros.
//!
//! Both families are represented by their orthonormal three-term recurrence
//!
//! ```text
//! x p_k(x) = a_{k+1} p_{k+1}(x) + b_k p_k(x) + a_k p_{k-1}(x),   p_0 = 1, p_{-1} = 0
//! ```
//!
//! with respect to the probability measure of the family. Zeros are the
//! eigenvalues of the truncated Jacobi matrix (Golub-Welsch), polished by
//! Newton's method on the recurrence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Maximum number of Newton polish steps per zero.
pub const POLISH_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    JacobiAlgebraic,
    JacobiTrigonometric,
    Laguerre,
}

impl Family {
    pub fn is_jacobi(self) -> bool {
        !matches!(self, Family::Laguerre)
    }
}

/// Parameters of the classical weight behind a recurrence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PolyWeight {
    /// `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
    Jacobi { alpha: f64, beta: f64 },
    /// `x^(nu - 1) e^(-x)` on `[0, inf)`, i.e. Laguerre polynomials `L^(nu-1)`.
    Laguerre { nu: f64 },
}

impl PolyWeight {
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::domain(format!(
                "Jacobi parameters must satisfy alpha, beta > -1 (got alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(PolyWeight::Jacobi { alpha, beta })
    }

    pub fn laguerre(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::domain(format!(
                "Laguerre parameter must satisfy nu > 0 (got nu = {nu})"
            )));
        }
        Ok(PolyWeight::Laguerre { nu })
    }
}

/// Which frozen ensemble, its parameters and its dimension `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleParams {
    family: Family,
    #[serde(flatten)]
    weight: PolyWeight,
    dim_n: usize,
}

impl EnsembleParams {
    pub fn jacobi_algebraic(alpha: f64, beta: f64, dim_n: usize) -> Result<Self> {
        Self::new(Family::JacobiAlgebraic, PolyWeight::jacobi(alpha, beta)?, dim_n)
    }

    pub fn jacobi_trigonometric(alpha: f64, beta: f64, dim_n: usize) -> Result<Self> {
        Self::new(
            Family::JacobiTrigonometric,
            PolyWeight::jacobi(alpha, beta)?,
            dim_n,
        )
    }

    pub fn laguerre(nu: f64, dim_n: usize) -> Result<Self> {
        Self::new(Family::Laguerre, PolyWeight::laguerre(nu)?, dim_n)
    }

    pub fn new(family: Family, weight: PolyWeight, dim_n: usize) -> Result<Self> {
        match (family.is_jacobi(), weight) {
            (true, PolyWeight::Jacobi { alpha, beta }) => {
                PolyWeight::jacobi(alpha, beta)?;
            }
            (false, PolyWeight::Laguerre { nu }) => {
                PolyWeight::laguerre(nu)?;
            }
            _ => {
                return Err(Error::domain(format!(
                    "family {family:?} does not match weight {weight:?}"
                )))
            }
        }
        if dim_n == 0 {
            return Err(Error::domain("dimension N must be at least 1"));
        }
        Ok(EnsembleParams {
            family,
            weight,
            dim_n,
        })
    }

    /// Same family and weight, different dimension.
    pub fn with_dim(&self, dim_n: usize) -> Result<Self> {
        Self::new(self.family, self.weight, dim_n)
    }

    /// Same weight and dimension, different family (Jacobi coordinates only).
    pub fn with_family(&self, family: Family) -> Result<Self> {
        Self::new(family, self.weight, self.dim_n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn weight(&self) -> PolyWeight {
        self.weight
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    /// Recurrence table deep enough for the dual polynomials of degree `N`.
    pub fn recurrence(&self) -> RecurrenceTable {
        RecurrenceTable::for_weight(self.weight, self.dim_n)
    }

    pub fn zeros(&self) -> Result<ZeroSet> {
        find_zeros(&self.recurrence(), self.dim_n)
    }
}

/// Orthonormal recurrence coefficients `a_1..a_{n_max}` and `b_0..b_{n_max}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceTable {
    weight: PolyWeight,
    /// `a[0]` is unused and stored as zero.
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RecurrenceTable {
    fn for_weight(weight: PolyWeight, n_max: usize) -> Self {
        match weight {
            PolyWeight::Jacobi { alpha, beta } => jacobi_table(alpha, beta, n_max),
            PolyWeight::Laguerre { nu } => laguerre_table(nu, n_max),
        }
    }

    pub fn weight(&self) -> PolyWeight {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    /// Off-diagonal coefficient `a_k`, `1 <= k <= n_max`.
    pub fn a(&self, k: usize) -> f64 {
        assert!(
            (1..=self.n_max()).contains(&k),
            "a_{k} outside table of depth {}",
            self.n_max()
        );
        self.a[k]
    }

    /// Diagonal coefficient `b_k`, `0 <= k <= n_max`.
    pub fn b(&self, k: usize) -> f64 {
        self.b[k]
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.a[1..]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.b
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.n_max() {
            return Err(Error::Dimension(format!(
                "degree {degree} exceeds recurrence table depth {}",
                self.n_max()
            )));
        }
        Ok(())
    }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    Ok(())
}

/// Orthonormal Jacobi recurrence for the weight `(1-x)^alpha (1+x)^beta`.
pub fn jacobi_recurrence(alpha: f64, beta: f64, n_max: usize) -> Result<RecurrenceTable> {
    PolyWeight::jacobi(alpha, beta)?;
    check_n_max(n_max)?;
    Ok(jacobi_table(alpha, beta, n_max))
}

fn jacobi_table(alpha: f64, beta: f64, n_max: usize) -> RecurrenceTable {
    let s = alpha + beta;
    let mut a = vec![0.0; n_max + 1];
    let mut b = vec![0.0; n_max + 1];
    b[0] = (beta - alpha) / (s + 2.0);
    for k in 1..=n_max {
        let kf = k as f64;
        let t = 2.0 * kf + s;
        a[k] = if k == 1 {
            // the generic formula is 0/0 when alpha + beta = -1
            (4.0 * (1.0 + alpha) * (1.0 + beta) / ((s + 3.0) * (s + 2.0) * (s + 2.0))).sqrt()
        } else {
            (4.0 * kf * (kf + s) * (kf + alpha) * (kf + beta)).sqrt()
                / (((t + 1.0) * (t - 1.0)).sqrt() * t)
        };
        b[k] = -(alpha * alpha - beta * beta) / (t * (t + 2.0));
    }
    RecurrenceTable {
        weight: PolyWeight::Jacobi { alpha, beta },
        a,
        b,
    }
}

/// Orthonormal Laguerre recurrence for `L^(nu-1)`: `b_k = 2k + nu`,
/// `a_k = sqrt(k (k + nu - 1))`.
pub fn laguerre_recurrence(nu: f64, n_max: usize) -> Result<RecurrenceTable> {
    PolyWeight::laguerre(nu)?;
    check_n_max(n_max)?;
    Ok(laguerre_table(nu, n_max))
}

fn laguerre_table(nu: f64, n_max: usize) -> RecurrenceTable {
    let a = (0..=n_max)
        .map(|k| {
            let kf = k as f64;
            (kf * (kf + nu - 1.0)).sqrt()
        })
        .collect();
    let b = (0..=n_max).map(|k| 2.0 * k as f64 + nu).collect();
    RecurrenceTable {
        weight: PolyWeight::Laguerre { nu },
        a,
        b,
    }
}

/// Orthonormal polynomial of the given degree at `x`, by forward recurrence.
///
/// Panics if `degree` exceeds the table depth.
pub fn eval_orthonormal(table: &RecurrenceTable, degree: usize, x: f64) -> f64 {
    eval_with_derivative(table, degree, x).0
}

/// Value and derivative from the recurrence and its differentiated form.
pub fn eval_with_derivative(table: &RecurrenceTable, degree: usize, x: f64) -> (f64, f64) {
    assert!(
        degree <= table.n_max(),
        "degree {degree} exceeds recurrence table depth {}",
        table.n_max()
    );
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..degree {
        let a_prev = if k == 0 { 0.0 } else { table.a[k] };
        let a_next = table.a[k + 1];
        let p_next = ((x - table.b[k]) * p - a_prev * p_prev) / a_next;
        let d_next = ((x - table.b[k]) * d + p - a_prev * d_prev) / a_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Strictly ordered zeros of the degree-`n` polynomial of a table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    weight: PolyWeight,
    zeros: Vec<f64>,
    polish_residuals: Vec<f64>,
}

impl ZeroSet {
    pub fn weight(&self) -> PolyWeight {
        self.weight
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn polish_residuals(&self) -> &[f64] {
        &self.polish_residuals
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Zeros of the orthonormal polynomial of degree `n` (Golub-Welsch plus
/// Newton polish).
pub fn find_zeros(table: &RecurrenceTable, n: usize) -> Result<ZeroSet> {
    if n == 0 {
        return Err(Error::domain("zero set needs degree n >= 1"));
    }
    table.check_degree(n)?;

    let raw = linalg::tridiagonal_eigenvalues(&table.b[..n], &table.a[1..n])?;
    let mut zeros = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (i, &z0) in raw.iter().enumerate() {
        let lower_gap = if i > 0 { z0 - raw[i - 1] } else { f64::INFINITY };
        let upper_gap = if i + 1 < n { raw[i + 1] - z0 } else { f64::INFINITY };
        let max_step = 0.5 * lower_gap.min(upper_gap);
        let (z, res) = newton_polish(table, n, z0, max_step)?;
        zeros.push(z);
        residuals.push(res);
    }

    if zeros.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Consistency(format!(
            "zeros of degree {n} are not strictly increasing"
        )));
    }
    let inside = match table.weight {
        PolyWeight::Jacobi { .. } => zeros.iter().all(|&z| z > -1.0 && z < 1.0),
        PolyWeight::Laguerre { .. } => zeros.iter().all(|&z| z > 0.0),
    };
    if !inside {
        return Err(Error::Consistency(format!(
            "zeros of degree {n} leave the support of the weight"
        )));
    }

    Ok(ZeroSet {
        weight: table.weight,
        zeros,
        polish_residuals: residuals,
    })
}

fn newton_polish(table: &RecurrenceTable, n: usize, z0: f64, max_step: f64) -> Result<(f64, f64)> {
    let (mut z, (mut p, mut dp)) = (z0, eval_with_derivative(table, n, z0));
    for _ in 0..POLISH_CAP {
        if p == 0.0 {
            return Ok((z, 0.0));
        }
        let candidate = z - p / dp;
        if !candidate.is_finite() || (candidate - z).abs() > max_step {
            return Ok((z, p.abs()));
        }
        let (pc, dpc) = eval_with_derivative(table, n, candidate);
        if pc.abs() >= p.abs() {
            return Ok((z, p.abs()));
        }
        // steps below the local resolution cannot improve a zero at or
        // near the origin, where |p| keeps shrinking through subnormals
        let resolution = f64::EPSILON * z.abs().max(if max_step.is_finite() { max_step } else { 0.0 });
        let settled = (candidate - z).abs() <= resolution;
        z = candidate;
        p = pc;
        dp = dpc;
        if settled {
            return Ok((z, p.abs()));
        }
    }
    Err(Error::Convergence {
        what: "Newton polish",
        cap: POLISH_CAP,
    })
}

/// Centre of the Jacobi zero asymptotics `nu = sqrt((N + (a+b+1)/2)^2 + (1 - a^2 - 3 b^2)/12)`.
pub fn jacobi_refined_centre(alpha: f64, beta: f64, n: usize) -> f64 {
    let m = n as f64 + 0.5 * (alpha + beta + 1.0);
    (m * m + (1.0 - alpha * alpha - 3.0 * beta * beta) / 12.0).sqrt()
}

/// Deviations of the extreme zeros from their Bessel-zero predictions.
///
/// Jacobi: `|z_{N-r+1,N} - (1 - j_r^2 / (2 N^2))|`, the largest zeros.
/// Laguerre: `|z_{r,N} - j_r^2 / (4N + 2 nu)|`, the smallest zeros.
pub fn hard_edge_zero_check(zeros: &ZeroSet, bessel_zeros: &[f64], r_max: usize) -> Result<Vec<f64>> {
    check_edge_request(zeros, bessel_zeros, r_max)?;
    let n = zeros.len();
    let nf = n as f64;
    Ok((1..=r_max)
        .map(|r| {
            let j = bessel_zeros[r - 1];
            match zeros.weight {
                PolyWeight::Jacobi { .. } => {
                    (zeros.zeros[n - r] - (1.0 - j * j / (2.0 * nf * nf))).abs()
                }
                PolyWeight::Laguerre { nu } => (zeros.zeros[r - 1] - j * j / (4.0 * nf + 2.0 * nu)).abs(),
            }
        })
        .collect())
}

/// Jacobi only: `|z_{N-r+1,N} - cos(j_r / nu)|` with the refined centre `nu`.
pub fn hard_edge_zero_check_refined(
    zeros: &ZeroSet,
    bessel_zeros: &[f64],
    r_max: usize,
) -> Result<Vec<f64>> {
    check_edge_request(zeros, bessel_zeros, r_max)?;
    let PolyWeight::Jacobi { alpha, beta } = zeros.weight else {
        return Err(Error::domain("refined zero asymptotics are Jacobi only"));
    };
    let n = zeros.len();
    let centre = jacobi_refined_centre(alpha, beta, n);
    Ok((1..=r_max)
        .map(|r| (zeros.zeros[n - r] - (bessel_zeros[r - 1] / centre).cos()).abs())
        .collect())
}

fn check_edge_request(zeros: &ZeroSet, bessel_zeros: &[f64], r_max: usize) -> Result<()> {
    if r_max > zeros.len() || r_max > bessel_zeros.len() {
        return Err(Error::Dimension(format!(
            "r_max = {r_max} exceeds N = {} or the {} available Bessel zeros",
            zeros.len(),
            bessel_zeros.len()
        )));
    }
    Ok(())
}
