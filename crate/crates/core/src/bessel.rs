//! Bessel functions of the first kind, their positive zeros, the hard-edge
//! limit functions and the limiting covariance integrals.
//!
//! `J_alpha(z)` uses the power series (accumulated in double-double) below
//! [`SERIES_SWITCH`] and Miller's backward recurrence, normalised by the
//! Neumann sum `(z/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k! J_{nu+2k}(z)`,
//! above it.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::orthopoly::Family;
use crate::quadrature::{integrate_unit_interval, QuadResult};

pub const SERIES_SWITCH: f64 = 12.0;
const SERIES_CAP: usize = 400;
const RESCALE_AT: f64 = 1e200;
const SCAN_STEP: f64 = 0.1;
const REFINE_CAP: usize = 100;

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > -1.0) {
        return Err(Error::domain(format!("Bessel order must exceed -1, got {alpha}")));
    }
    Ok(())
}

/// `J_alpha(z)` for `alpha > -1`, `z >= 0`.
///
/// At `z = 0` the value is `1` for `alpha = 0`, `0` for `alpha > 0` and
/// `+inf` for `alpha < 0`.
pub fn bessel_j(alpha: f64, z: f64) -> Result<f64> {
    check_order(alpha)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain(format!("Bessel argument must be finite and >= 0, got {z}")));
    }
    Ok(j_unchecked(alpha, z))
}

pub(crate) fn j_unchecked(alpha: f64, z: f64) -> f64 {
    if z < SERIES_SWITCH {
        bessel_j_series(alpha, z)
    } else {
        bessel_j_recurrence(alpha, z)
    }
}

/// Power series `(z/2)^a / Gamma(a+1) * sum_k (-z^2/4)^k / (k! (a+1)_k)`,
/// summed in double-double so the cancellation for moderate `z` is harmless.
pub fn bessel_j_series(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return match alpha {
            a if a == 0.0 => 1.0,
            a if a > 0.0 => 0.0,
            _ => f64::INFINITY,
        };
    }
    let q = TwoFloat::from(z) * TwoFloat::from(z) / 4.0;
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    for k in 1..SERIES_CAP {
        // twofloat's double-double by double-double division drops the low
        // word, so divide by each double-double factor `h + l` as
        // `(t / h) (1 - l / h)`.
        let shifted = TwoFloat::new_add(alpha, k as f64);
        let (h, l) = (shifted.hi(), shifted.lo());
        term = -(term * q) / k as f64 / h;
        term -= term.hi() * (l / h);
        sum += term;
        if term.hi().abs() <= 1e-34 * sum.hi().abs().max(1e-300) {
            break;
        }
    }
    let prefactor = (0.5 * z).powf(alpha) / libm::tgamma(alpha + 1.0);
    prefactor * f64::from(sum)
}

/// Miller's backward recurrence from order `alpha + M` down to `alpha`.
pub fn bessel_j_recurrence(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return bessel_j_series(alpha, z);
    }
    // Neumann-sum base order: nu0 > 0 so that Gamma(nu0 + k) is finite.
    let (nu0, parity) = if alpha > 0.0 { (alpha, 0) } else { (alpha + 1.0, 1) };
    let mut top = (1.2 * z + 40.0).ceil() as usize;
    if top % 2 != parity {
        top += 1;
    }

    // weight of order nu0 + 2k: (nu0 + 2k) Gamma(nu0 + k) / k!
    let gamma_nu0 = libm::tgamma(nu0);
    let weight = |m: usize, g: f64| -> f64 {
        let k = (m - parity) / 2;
        (nu0 + 2.0 * k as f64) * g
    };
    // g_k = Gamma(nu0 + k)/k!, generated downward is awkward, so tabulate upward.
    let kmax = (top - parity) / 2;
    let mut g = Vec::with_capacity(kmax + 1);
    g.push(gamma_nu0);
    for k in 1..=kmax {
        let prev = g[k - 1];
        g.push(prev * (nu0 + k as f64 - 1.0) / k as f64);
    }

    let mut above = 0.0; // F_{m+1}
    let mut current = 1e-30; // F_m
    let mut norm = 0.0;
    let mut m = top;
    loop {
        if m % 2 == parity {
            norm += weight(m, g[(m - parity) / 2]) * current;
        }
        if m == 0 {
            break;
        }
        let mu = alpha + m as f64;
        let below = 2.0 * mu / z * current - above;
        above = current;
        current = below;
        m -= 1;
        if current.abs() > RESCALE_AT {
            current /= RESCALE_AT;
            above /= RESCALE_AT;
            norm /= RESCALE_AT;
        }
    }
    current * (0.5 * z).powf(nu0) / norm
}

/// `J'_alpha(z) = (alpha / z) J_alpha(z) - J_{alpha+1}(z)` for `z > 0`.
pub fn bessel_j_prime(alpha: f64, z: f64) -> Result<f64> {
    check_order(alpha)?;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain(format!("derivative needs z > 0, got {z}")));
    }
    Ok(jp_unchecked(alpha, z))
}

fn jp_unchecked(alpha: f64, z: f64) -> f64 {
    alpha / z * j_unchecked(alpha, z) - j_unchecked(alpha + 1.0, z)
}

/// First positive zeros of `J_alpha` with `J'_alpha` at each of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BesselZeroTable {
    alpha: f64,
    zeros: Vec<f64>,
    derivs: Vec<f64>,
}

impl BesselZeroTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    /// `j_{alpha,r}`, 1-based.
    pub fn zero(&self, r: usize) -> f64 {
        self.zeros[r - 1]
    }

    /// `J'_alpha(j_{alpha,r})`, 1-based.
    pub fn deriv(&self, r: usize) -> f64 {
        self.derivs[r - 1]
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Scans for sign changes from `2 sqrt(alpha + 1)` (a strict lower bound for
/// `j_{alpha,1}`) and refines each bracket by safeguarded Newton.
pub fn bessel_zeros(alpha: f64, r_max: usize) -> Result<BesselZeroTable> {
    check_order(alpha)?;
    if r_max == 0 {
        return Err(Error::domain("at least one Bessel zero must be requested"));
    }
    let scan_limit = 2.0 * (alpha + 1.0).sqrt() + (r_max as f64 + alpha.abs() + 10.0) * 2.0 * std::f64::consts::PI;
    let mut zeros = Vec::with_capacity(r_max);
    let mut lo = 2.0 * (alpha + 1.0).sqrt();
    let mut f_lo = j_unchecked(alpha, lo);
    while zeros.len() < r_max {
        let r = zeros.len() + 1;
        let hi = lo + SCAN_STEP;
        if hi > scan_limit || !f_lo.is_finite() {
            return Err(Error::Bracketing { alpha, r });
        }
        let f_hi = j_unchecked(alpha, hi);
        if f_hi == 0.0 {
            zeros.push(hi);
            lo = hi + 0.5 * SCAN_STEP;
            f_lo = j_unchecked(alpha, lo);
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            zeros.push(refine_zero(alpha, lo, hi, f_lo).ok_or(Error::Bracketing { alpha, r })?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    let derivs = zeros.iter().map(|&j| -j_unchecked(alpha + 1.0, j)).collect();
    Ok(BesselZeroTable { alpha, zeros, derivs })
}

fn refine_zero(alpha: f64, mut lo: f64, mut hi: f64, f_lo: f64) -> Option<f64> {
    let sign_lo = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..REFINE_CAP {
        let f = j_unchecked(alpha, x);
        if f == 0.0 {
            return Some(x);
        }
        if f.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let df = jp_unchecked(alpha, x);
        let newton = x - f / df;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            return Some(next);
        }
        x = next;
    }
    None
}

/// Hard-edge limit function of one family, tied to one Bessel zero.
///
/// Jacobi (Bessel order `alpha`): `-sqrt(2) / J'(j) * sqrt(1-y) * J(j (1-y))`.
/// Laguerre (Bessel order `nu - 1`): `-J(j sqrt(1-y)) / J'(j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitFunction {
    laguerre: bool,
    order: f64,
    zero: f64,
    deriv: f64,
}

impl LimitFunction {
    pub fn jacobi(table: &BesselZeroTable, r: usize) -> Self {
        Self { laguerre: false, order: table.alpha, zero: table.zero(r), deriv: table.deriv(r) }
    }

    /// `table` must hold the zeros of `J_{nu-1}`.
    pub fn laguerre(table: &BesselZeroTable, r: usize) -> Self {
        Self { laguerre: true, order: table.alpha, zero: table.zero(r), deriv: table.deriv(r) }
    }

    pub fn zero(&self) -> f64 {
        self.zero
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        if self.laguerre {
            let u = (1.0 - y).sqrt();
            -j_unchecked(self.order, self.zero * u) / self.deriv
        } else {
            let u = 1.0 - y;
            -std::f64::consts::SQRT_2 / self.deriv * u.sqrt() * j_unchecked(self.order, self.zero * u)
        }
    }
}

fn check_unit(y: f64) -> Result<()> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::domain(format!("limit functions live on [0, 1), got y = {y}")));
    }
    Ok(())
}

/// Jacobi hard-edge limit function of order `alpha` and index `r` at `y`.
pub fn limit_fn_jacobi(alpha: f64, r: usize, y: f64) -> Result<f64> {
    check_unit(y)?;
    let table = bessel_zeros(alpha, r)?;
    Ok(LimitFunction::jacobi(&table, r).eval(y))
}

/// Laguerre hard-edge limit function for parameter `nu` and index `r` at `y`.
pub fn limit_fn_laguerre(nu: f64, r: usize, y: f64) -> Result<f64> {
    check_unit(y)?;
    let table = bessel_zeros(nu - 1.0, r)?;
    Ok(LimitFunction::laguerre(&table, r).eval(y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitKind {
    /// `lim N^2 sigma~_{N-r+1, N-s+1}` in trigonometric coordinates.
    JacobiTrig,
    /// Trigonometric value divided by `4 j_r j_s`.
    JacobiAlg,
    /// `lim N sigma_{r,s}` for the Laguerre hard edge.
    LaguerreHard,
}

impl LimitKind {
    pub fn for_family(family: Family) -> Self {
        match family {
            Family::JacobiTrigonometric => LimitKind::JacobiTrig,
            Family::JacobiAlgebraic => LimitKind::JacobiAlg,
            Family::Laguerre => LimitKind::LaguerreHard,
        }
    }

    /// Bessel order for the family parameter (`alpha`, or `nu`).
    pub fn bessel_order(self, param: f64) -> f64 {
        match self {
            LimitKind::LaguerreHard => param - 1.0,
            _ => param,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitValue {
    pub kind: LimitKind,
    /// `alpha` for Jacobi kinds, `nu` for Laguerre.
    pub param: f64,
    pub r: usize,
    pub s: usize,
    pub value: f64,
    pub quad_error_estimate: f64,
}

/// `int_0^1 u / (1 - u^2) J(j_r u) J(j_s u) du / (J'(j_r) J'(j_s))`.
fn hard_edge_integral(table: &BesselZeroTable, r: usize, s: usize) -> Result<QuadResult> {
    let (jr, js) = (table.zero(r), table.zero(s));
    let order = table.alpha;
    let scale = table.deriv(r) * table.deriv(s);
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let w = u / ((1.0 - u) * (1.0 + u));
        w * j_unchecked(order, jr * u) * j_unchecked(order, js * u) / scale
    };
    integrate_unit_interval(f, 1.0 + 2.0 * order)
}

/// Limiting covariance entry for the given kind and family parameter.
///
/// The integrand is evaluated with `(r, s)` sorted, so the result is
/// bit-identical under swapping the indices.
pub fn limit_cov(kind: LimitKind, param: f64, r: usize, s: usize) -> Result<LimitValue> {
    if r == 0 || s == 0 {
        return Err(Error::domain("limit indices are 1-based"));
    }
    let (lo, hi) = (r.min(s), r.max(s));
    let table = bessel_zeros(kind.bessel_order(param), hi)?;
    let quad = hard_edge_integral(&table, lo, hi)?;
    let (value, err) = match kind {
        LimitKind::JacobiAlg => {
            let denom = 4.0 * table.zero(lo) * table.zero(hi);
            (quad.value / denom, quad.error_estimate / denom)
        }
        _ => (quad.value, quad.error_estimate),
    };
    Ok(LimitValue { kind, param, r, s, value, quad_error_estimate: err })
}

/// `int_0^1 2u J(j_r u) J(j_s u) du / (J'(j_r) J'(j_s))`, the `L^2([0,1])`
/// inner product of two limit functions after reflecting `y -> 1 - y`
/// (Jacobi) or substituting `u = sqrt(1 - y)` (Laguerre).
fn gram_entry(table: &BesselZeroTable, r: usize, s: usize) -> Result<QuadResult> {
    let (jr, js) = (table.zero(r), table.zero(s));
    let order = table.alpha;
    let scale = table.deriv(r) * table.deriv(s);
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        2.0 * u * j_unchecked(order, jr * u) * j_unchecked(order, js * u) / scale
    };
    integrate_unit_interval(f, 1.0 + 2.0 * order)
}

/// Gram matrix of the first `r_max` limit functions in `L^2([0,1])`.
///
/// `param` is `alpha` for the Jacobi families and `nu` for Laguerre.
pub fn limit_orthonormality(param: f64, family: Family, r_max: usize) -> Result<DMatrix<f64>> {
    if r_max == 0 {
        return Err(Error::domain("Gram matrix needs r_max >= 1"));
    }
    let table = bessel_zeros(LimitKind::for_family(family).bessel_order(param), r_max)?;
    let pairs: Vec<(usize, usize)> = (1..=r_max).flat_map(|r| (r..=r_max).map(move |s| (r, s))).collect();
    let values = pairs
        .par_iter()
        .map(|&(r, s)| gram_entry(&table, r, s).map(|q| q.value))
        .collect::<Result<Vec<f64>>>()?;
    let mut gram = DMatrix::zeros(r_max, r_max);
    for (&(r, s), v) in pairs.iter().zip(values) {
        gram[(r - 1, s - 1)] = v;
        gram[(s - 1, r - 1)] = v;
    }
    Ok(gram)
}
