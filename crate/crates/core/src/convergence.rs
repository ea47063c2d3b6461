//! Finite-N step functions, the spectral weights `h_N`, and convergence of
//! scaled covariance entries toward their Bessel-type limits.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{bessel_zeros, limit_cov, LimitFunction, LimitKind, LimitValue};
use crate::dualpoly::dual_eval_at_zero;
use crate::error::{Error, Result};
use crate::export::{csv_line, fmt_float};
use crate::frozencov::assemble;
use crate::orthopoly::{find_zeros, EnsembleParams, Family, PolyWeight};

pub const DEFAULT_GRID: [usize; 4] = [25, 50, 100, 200];
pub const Y_MAX: f64 = 0.8;

/// Piecewise-constant function on `[0, 1]`: `samples[k]` on `[k/N, (k+1)/N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFn {
    pub n: usize,
    /// Edge index the function belongs to; `0` when not tied to one.
    pub r: usize,
    pub samples: Vec<f64>,
}

impl StepFn {
    pub fn eval(&self, y: f64) -> f64 {
        let k = ((y * self.n as f64).floor() as usize).min(self.n - 1);
        self.samples[k]
    }

    /// `(1/N) sum_k f_k g_k`, the `L^2([0,1])` inner product.
    pub fn inner(&self, other: &StepFn) -> f64 {
        let total: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum();
        total / self.n as f64
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Cell midpoints `(k + 1/2)/N` not exceeding `y_max`.
    pub fn midpoints(&self, y_max: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        let nf = self.n as f64;
        (0..self.n)
            .map(move |k| (k, (k as f64 + 0.5) / nf))
            .take_while(move |&(_, y)| y <= y_max)
    }
}

/// Step function of the `r`-th extreme zero: the `r`-th largest for Jacobi,
/// the `r`-th smallest for Laguerre (with the alternating sign that makes
/// the leading coefficients positive).
pub fn step_fn(params: &EnsembleParams, r: usize) -> Result<StepFn> {
    let n = params.dim_n();
    if r == 0 || r > n {
        return Err(Error::domain(format!("step function index r = {r} must lie in 1..={n}")));
    }
    let table = params.recurrence();
    let zeros = find_zeros(&table, n)?;
    let root_n = (n as f64).sqrt();
    let samples = match params.weight() {
        PolyWeight::Jacobi { .. } => {
            let z = zeros.zeros()[n - r];
            let scale = root_n * ((1.0 - z) * (1.0 + z)).sqrt();
            dual_eval_at_zero(&table, n, z)?.values.iter().map(|q| scale * q).collect()
        }
        PolyWeight::Laguerre { .. } => {
            let z = zeros.zeros()[r - 1];
            let scale = root_n * z.sqrt();
            dual_eval_at_zero(&table, n, z)?
                .values
                .iter()
                .enumerate()
                .map(|(k, q)| if k % 2 == 0 { scale * q } else { -scale * q })
                .collect()
        }
    };
    Ok(StepFn { n, r, samples })
}

/// The spectral weight `h_N(y) = N^2 / (2(k+1)(2N+a+b-k))` on `[k/N, (k+1)/N)`
/// and its limit `h(y) = 1/(2y(2-y))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HWeights {
    pub alpha: f64,
    pub beta: f64,
    pub discrete: StepFn,
}

impl HWeights {
    pub fn limit(y: f64) -> f64 {
        1.0 / (2.0 * y * (2.0 - y))
    }

    /// `h_N(y) <= min(N/2, 1/(2y))` on every cell; the second bound is
    /// checked at the right cell edge where `1/(2y)` is smallest.
    pub fn bound_holds(&self) -> bool {
        let nf = self.discrete.n as f64;
        self.discrete
            .samples
            .iter()
            .enumerate()
            .all(|(k, &h)| h <= 0.5 * nf && h <= nf / (2.0 * (k + 1) as f64))
    }

    /// `sup |h_N - h|` over `[y_min, 1]`, `y_min > 0`. `h` is decreasing on
    /// `(0, 1]`, so on each cell the sup sits at one of the two edges.
    pub fn sup_deviation(&self, y_min: f64) -> f64 {
        let nf = self.discrete.n as f64;
        self.discrete
            .samples
            .iter()
            .enumerate()
            .filter(|&(k, _)| (k + 1) as f64 / nf > y_min)
            .map(|(k, &h)| {
                let lo = (k as f64 / nf).max(y_min);
                let hi = (k + 1) as f64 / nf;
                (h - Self::limit(lo)).abs().max((h - Self::limit(hi)).abs())
            })
            .fold(0.0, f64::max)
    }
}

pub fn h_weights(n: usize, alpha: f64, beta: f64) -> Result<HWeights> {
    if n == 0 {
        return Err(Error::domain("h_N needs N >= 1"));
    }
    let nf = n as f64;
    let samples = (0..n)
        .map(|k| {
            let k = k as f64;
            nf * nf / (2.0 * (k + 1.0) * (2.0 * nf + alpha + beta - k))
        })
        .collect();
    Ok(HWeights { alpha, beta, discrete: StepFn { n, r: 0, samples } })
}

/// `(1/N) sum_k h_N(k/N) f_{N,r}(k/N) f_{N,s}(k/N)`, which reproduces
/// `N^2 sigma~_{N-r+1,N-s+1}` for the trigonometric Jacobi covariance.
pub fn spectral_sum(h: &HWeights, f_r: &StepFn, f_s: &StepFn) -> f64 {
    let total: f64 = (0..h.discrete.n)
        .map(|k| h.discrete.samples[k] * f_r.samples[k] * f_s.samples[k])
        .sum();
    total / h.discrete.n as f64
}

/// Sup over cell midpoints in `[0, y_max]` of `|f_N - f|`.
pub fn sup_error(step: &StepFn, limit: &LimitFunction, y_max: f64) -> f64 {
    step.midpoints(y_max)
        .map(|(k, y)| (step.samples[k] - limit.eval(y)).abs())
        .fold(0.0, f64::max)
}

/// Limit function matching `step_fn` for the same parameters and index.
pub fn limit_function(params: &EnsembleParams, r: usize) -> Result<LimitFunction> {
    Ok(match params.weight() {
        PolyWeight::Jacobi { alpha, .. } => LimitFunction::jacobi(&bessel_zeros(alpha, r)?, r),
        PolyWeight::Laguerre { nu } => LimitFunction::laguerre(&bessel_zeros(nu - 1.0, r)?, r),
    })
}

/// Least-squares slope of `log error` against `log N`.
pub fn fit_rate(n_grid: &[usize], errors: &[f64]) -> Result<f64> {
    if n_grid.len() < 3 || n_grid.len() != errors.len() {
        return Err(Error::domain("rate fit needs at least 3 (N, error) pairs"));
    }
    if errors.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::domain("rate fit needs positive finite errors"));
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Scaling that turns the finite-N entry into the quantity with a limit.
pub fn entry_scaling(family: Family, n: usize) -> f64 {
    let nf = n as f64;
    match family {
        Family::JacobiTrigonometric => nf * nf,
        Family::JacobiAlgebraic => 1.0,
        Family::Laguerre => nf,
    }
}

/// 1-based covariance indices of the `(r, s)` edge entry at dimension `n`.
pub fn edge_indices(family: Family, n: usize, r: usize, s: usize) -> (usize, usize) {
    if family.is_jacobi() {
        (n - r + 1, n - s + 1)
    } else {
        (r, s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub params: EnsembleParams,
    pub r: usize,
    pub s: usize,
    pub n_grid: Vec<usize>,
    pub scaling: Vec<f64>,
    pub finite_values: Vec<f64>,
    pub limit: LimitValue,
    pub abs_errors: Vec<f64>,
    pub fitted_rate: f64,
    pub y_max: f64,
    pub sup_errors_stepfn: Vec<f64>,
}

impl ConvergenceReport {
    /// Errors never grow along the grid by more than `tol`.
    pub fn errors_monotone(&self, tol: f64) -> bool {
        self.abs_errors.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    pub fn errors_strictly_decreasing(&self) -> bool {
        self.abs_errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_relative_gap(&self) -> f64 {
        self.abs_errors.last().copied().unwrap_or(f64::NAN) / self.limit.value.abs()
    }

    /// Two-column `N,error` CSV for plotting.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> Result<()> {
        csv_line(out, &["N".into(), "error".into()])?;
        for (n, e) in self.n_grid.iter().zip(&self.abs_errors) {
            csv_line(out, &[n.to_string(), fmt_float(*e)])?;
        }
        Ok(())
    }
}

/// Scaled edge covariance entries over `n_grid` against their limit.
///
/// The dimension stored in `template` is ignored; each grid point is
/// assembled independently (in parallel).
pub fn scaled_cov_sequence(
    template: &EnsembleParams,
    r: usize,
    s: usize,
    n_grid: &[usize],
) -> Result<ConvergenceReport> {
    if n_grid.len() < 3 {
        return Err(Error::domain("a convergence grid needs at least 3 values of N"));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("N grid must be strictly increasing"));
    }
    if r == 0 || s == 0 || r.max(s) > n_grid[0] {
        return Err(Error::domain(format!(
            "indices r = {r}, s = {s} must lie in 1..={}",
            n_grid[0]
        )));
    }
    let family = template.family();
    let param = match template.weight() {
        PolyWeight::Jacobi { alpha, .. } => alpha,
        PolyWeight::Laguerre { nu } => nu,
    };
    let limit = limit_cov(LimitKind::for_family(family), param, r, s)?;
    let limit_fn = limit_function(template, r)?;

    let per_n = n_grid
        .par_iter()
        .map(|&n| -> Result<(f64, f64, f64)> {
            let params = template.with_dim(n)?;
            let cov = assemble(&params)?;
            let (i, j) = edge_indices(family, n, r, s);
            let scale = entry_scaling(family, n);
            let sup = sup_error(&step_fn(&params, r)?, &limit_fn, Y_MAX);
            Ok((scale, scale * cov.sigma(i, j), sup))
        })
        .collect::<Result<Vec<_>>>()?;

    let scaling: Vec<f64> = per_n.iter().map(|t| t.0).collect();
    let finite_values: Vec<f64> = per_n.iter().map(|t| t.1).collect();
    let sup_errors_stepfn = per_n.iter().map(|t| t.2).collect();
    let abs_errors: Vec<f64> = finite_values.iter().map(|v| (v - limit.value).abs()).collect();
    let fitted_rate = fit_rate(n_grid, &abs_errors)?;
    Ok(ConvergenceReport {
        params: *template,
        r,
        s,
        n_grid: n_grid.to_vec(),
        scaling,
        finite_values,
        limit,
        abs_errors,
        fitted_rate,
        y_max: Y_MAX,
        sup_errors_stepfn,
    })
}
