//! Independent numerical oracles shared by the integration tests. Nothing
//! here calls into the library's algorithms.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `J_alpha(z)` from its power series with compensated summation; trustworthy
/// for `z` up to about 10.
pub fn bessel_series(alpha: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = (0.5 * z).powf(alpha) / libm::tgamma(alpha + 1.0);
    let mut terms = vec![term];
    for m in 1..200 {
        term *= -q / (m as f64 * (alpha + m as f64));
        terms.push(term);
        if term.abs() < 1e-30 {
            break;
        }
    }
    compensated_sum(terms)
}

/// Bisection of a bracketed sign change to an absolute width `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of `f` on a uniform grid, each refined by bisection.
pub fn grid_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let n = ((b - a) / step).ceil() as usize;
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = (a + i as f64 * step).min(b);
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            roots.push(bisect(&f, x0, x1, tol));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Classical Jacobi polynomial `P_n^{(a,b)}(x)` by its textbook recurrence.
pub fn jacobi_classical(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let lhs = 2.0 * k * (k + a + b) * (c - 2.0);
        let next = ((c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) * p
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * c * p_prev)
            / lhs;
        p_prev = p;
        p = next;
    }
    p
}

/// Orthonormal Jacobi polynomial for the probability-normalised weight,
/// from the classical one and the textbook norms.
pub fn jacobi_orthonormal(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    // h_n / h_0 = (a+b+1) Gamma(n+a+1) Gamma(n+b+1) Gamma(a+b+1)
    //           / ((2n+a+b+1) Gamma(n+a+b+1) n! Gamma(a+1) Gamma(b+1))
    let nf = n as f64;
    let lg = libm::lgamma;
    let log_ratio = lg(nf + a + 1.0) + lg(nf + b + 1.0) - lg(nf + a + b + 1.0) - lg(nf + 1.0)
        - lg(a + 1.0)
        - lg(b + 1.0)
        + lg(a + b + 2.0)
        - (2.0 * nf + a + b + 1.0).ln();
    // the n = 0 norm of the weight is 2^{a+b+1} Gamma(a+1)Gamma(b+1)/Gamma(a+b+2)
    jacobi_classical(n, a, b, x) / log_ratio.exp().sqrt()
}

/// Generalised Laguerre polynomial `L_n^{(a)}(x)` by its recurrence.
pub fn laguerre_classical(n: usize, a: f64, x: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = 1.0 + a - x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0 + a - x) * p - (k - 1.0 + a) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    p
}

/// Orthonormal Laguerre polynomial with positive leading coefficient for the
/// probability-normalised weight `x^{nu-1} e^{-x}`.
pub fn laguerre_orthonormal(n: usize, nu: f64, x: f64) -> f64 {
    let nf = n as f64;
    let log_ratio = libm::lgamma(nf + nu) - libm::lgamma(nf + 1.0) - libm::lgamma(nu);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * laguerre_classical(n, nu - 1.0, x) / log_ratio.exp().sqrt()
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`, halving the step
/// until two levels agree to `tol`. Endpoints are never evaluated.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let node = |t: f64| -> Option<f64> {
        let s = FRAC_PI_2 * t.sinh();
        let x = s.tanh();
        let w = FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
        let p = mid + half * x;
        if p <= a || p >= b || w < 1e-300 {
            None
        } else {
            Some(w * f(p))
        }
    };
    let t_max: f64 = 6.5;
    let mut h = 0.5;
    let mut previous = f64::NAN;
    for _ in 0..12 {
        let count = (t_max / h).ceil() as i64;
        let terms = (-count..=count).filter_map(|k| node(k as f64 * h));
        let current = half * h * compensated_sum(terms);
        if (current - previous).abs() <= tol {
            return current;
        }
        previous = current;
        h *= 0.5;
    }
    previous
}

/// Classical RK4 for `f'' = g(y, f, f')` on `[y0, y1]` with `steps` steps.
pub fn rk4_second_order(
    g: impl Fn(f64, f64, f64) -> f64,
    y0: f64,
    f0: f64,
    df0: f64,
    y1: f64,
    steps: usize,
) -> f64 {
    let h = (y1 - y0) / steps as f64;
    let (mut f, mut df) = (f0, df0);
    for i in 0..steps {
        let y = y0 + i as f64 * h;
        let (k1f, k1d) = (df, g(y, f, df));
        let (k2f, k2d) = (df + 0.5 * h * k1d, g(y + 0.5 * h, f + 0.5 * h * k1f, df + 0.5 * h * k1d));
        let (k3f, k3d) = (df + 0.5 * h * k2d, g(y + 0.5 * h, f + 0.5 * h * k2f, df + 0.5 * h * k2d));
        let (k4f, k4d) = (df + h * k3d, g(y + h, f + h * k3f, df + h * k3d));
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        df += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    f
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
