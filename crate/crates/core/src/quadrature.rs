//! Gauss-Legendre quadrature on a mesh graded geometrically toward `0`.
//!
//! Integrands on `[0, 1]` behaving like `t^p` (`p > -1`) at the left end are
//! handled by halving panels toward the origin; every panel carries a
//! 15-point Gauss rule. Refinement doubles the number of uniform panels
//! until two successive totals agree.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::orthopoly::{eval_orthonormal, find_zeros, jacobi_recurrence};

pub const GAUSS_ORDER: usize = 15;
pub const MAX_REFINEMENTS: usize = 20;
pub const ABS_TOL: f64 = 1e-10;
pub const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub refinements: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` of the given order,
/// from the Legendre Jacobi matrix: `w_i = 2 / sum_k p_k(x_i)^2`.
pub fn gauss_legendre(order: usize) -> Result<Vec<(f64, f64)>> {
    let table = jacobi_recurrence(0.0, 0.0, order)?;
    let zeros = find_zeros(&table, order)?;
    Ok(zeros
        .zeros()
        .iter()
        .map(|&x| {
            let norm: f64 = (0..order).map(|k| eval_orthonormal(&table, k, x).powi(2)).sum();
            (x, 2.0 / norm)
        })
        .collect())
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER).expect("15-point Legendre rule"))
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Number of halvings toward `0` so that the untreated remainder
/// `~ eps^(p+1)` drops below `2^-52`.
fn grading_depth(endpoint_exponent: f64) -> usize {
    let q = (endpoint_exponent + 1.0).max(1e-3);
    ((52.0 / q).ceil() as usize).clamp(1, 1000)
}

fn graded_sum(f: &impl Fn(f64) -> f64, uniform: usize, depth: usize) -> f64 {
    let h = 1.0 / uniform as f64;
    let mut parts = Vec::with_capacity(uniform + depth);
    for i in (1..uniform).rev() {
        parts.push(panel(f, i as f64 * h, (i + 1) as f64 * h));
    }
    let mut hi = h;
    for _ in 0..depth {
        let lo = 0.5 * hi;
        parts.push(panel(f, lo, hi));
        hi = lo;
    }
    parts.push(panel(f, 0.0, hi));
    // smallest contributions last; sum them first
    parts.iter().rev().sum()
}

/// `int_0^1 f(t) dt` for `f(t) ~ t^endpoint_exponent` near `0`.
pub fn integrate_unit_interval(
    f: impl Fn(f64) -> f64,
    endpoint_exponent: f64,
) -> Result<QuadResult> {
    let depth = grading_depth(endpoint_exponent);
    // one uniform panel and two share the same mesh, so start from two
    let mut previous = graded_sum(&f, 2, depth);
    let mut current = previous;
    for level in 2..=MAX_REFINEMENTS + 1 {
        (previous, current) = (current, graded_sum(&f, 1 << level, depth));
        let diff = (current - previous).abs();
        if diff <= ABS_TOL.max(REL_TOL * current.abs()) {
            return Ok(QuadResult {
                value: current,
                error_estimate: diff,
                refinements: level,
            });
        }
    }
    Err(Error::Quadrature { previous, current })
}
