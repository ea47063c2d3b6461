//! Random-walk Metropolis sampling of the finite-coupling ensembles, used to
//! check the frozen covariances empirically.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), seeded with a `u64`; a
//! fixed seed reproduces a run bit for bit on the same build.

use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::{csv_line, fmt_float, matrix_rows};
use crate::frozencov::assemble;
use crate::orthopoly::{EnsembleParams, Family, PolyWeight};

pub const MIN_ACCEPTANCE: f64 = 0.05;
pub const MAX_ACCEPTANCE: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainConfig {
    pub n_samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Proposal standard deviation in units of the frozen fluctuation scale.
    pub proposal_scale: f64,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { n_samples: 1_000_000, burn_in: 100_000, thinning: 10, proposal_scale: 1.5, seed: 0 }
    }
}

impl ChainConfig {
    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.thinning == 0 {
            return Err(Error::domain("n_samples and thinning must be positive"));
        }
        if !(self.proposal_scale > 0.0 && self.proposal_scale.is_finite()) {
            return Err(Error::domain(format!("proposal scale must be positive, got {}", self.proposal_scale)));
        }
        Ok(())
    }
}

/// Unnormalised log density; `-inf` off the open alcove / chamber.
///
/// `coupling` is `kappa` for the Jacobi families and `beta` for Laguerre.
/// Trigonometric points are ordered decreasingly in `(0, pi/2)`.
pub fn log_density(params: &EnsembleParams, coupling: f64, point: &[f64]) -> f64 {
    if point.len() != params.dim_n() || !inside(params.family(), point) {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    match (params.family(), params.weight()) {
        (Family::JacobiAlgebraic, PolyWeight::Jacobi { alpha, beta }) => {
            let (ea, eb) = (0.5 * (alpha + 1.0) * coupling - 0.5, 0.5 * (beta + 1.0) * coupling - 0.5);
            for (i, &x) in point.iter().enumerate() {
                total += ea * (1.0 - x).ln() + eb * (1.0 + x).ln();
                for &y in &point[i + 1..] {
                    total += coupling * (y - x).ln();
                }
            }
        }
        (Family::JacobiTrigonometric, PolyWeight::Jacobi { alpha, beta }) => {
            // sin(2t) carries kappa (beta + 1): the image of the algebraic
            // density under x = cos 2t
            for (i, &t) in point.iter().enumerate() {
                total += coupling * (alpha - beta) * t.sin().ln() + coupling * (beta + 1.0) * (2.0 * t).sin().ln();
                for &u in &point[i + 1..] {
                    total += coupling * ((2.0 * u).cos() - (2.0 * t).cos()).ln();
                }
            }
        }
        (Family::Laguerre, PolyWeight::Laguerre { nu }) => {
            for (i, &x) in point.iter().enumerate() {
                total += 2.0 * nu * coupling * x.ln() - 0.5 * x * x;
                for &y in &point[i + 1..] {
                    total += 2.0 * coupling * (y * y - x * x).ln();
                }
            }
        }
        _ => unreachable!("EnsembleParams pairs families with matching weights"),
    }
    if total.is_nan() {
        f64::NEG_INFINITY
    } else {
        total
    }
}

/// Strict ordering and support check.
pub fn inside(family: Family, point: &[f64]) -> bool {
    match family {
        Family::JacobiAlgebraic => {
            point.iter().all(|&x| x > -1.0 && x < 1.0) && point.windows(2).all(|w| w[0] < w[1])
        }
        Family::JacobiTrigonometric => {
            point.iter().all(|&t| t > 0.0 && t < std::f64::consts::FRAC_PI_2)
                && point.windows(2).all(|w| w[0] > w[1])
        }
        Family::Laguerre => point.iter().all(|&x| x > 0.0) && point.windows(2).all(|w| w[0] < w[1]),
    }
}

/// Running mean and co-moment matrix (Welford), mergeable across chains.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    pub comoment: DMatrix<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], comoment: DMatrix::zeros(dim, dim) }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let c = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d / c;
        }
        for i in 0..x.len() {
            for j in 0..x.len() {
                self.comoment[(i, j)] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    /// Pooled moments of two disjoint sample sets.
    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return other.clone();
        }
        if other.count == 0 {
            return self.clone();
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        let mean = self.mean.iter().zip(&delta).map(|(a, d)| a + d * nb / n).collect();
        let dim = delta.len();
        let comoment = &self.comoment
            + &other.comoment
            + DMatrix::from_fn(dim, dim, |i, j| delta[i] * delta[j] * na * nb / n);
        Moments { count: self.count + other.count, mean, comoment }
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> DMatrix<f64> {
        let denom = (self.count.max(2) - 1) as f64;
        let c = &self.comoment / denom;
        // symmetrise away rounding asymmetry of the update
        (&c + c.transpose()) * 0.5
    }
}

fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalCLT {
    pub params: EnsembleParams,
    pub coupling: f64,
    pub config: ChainConfig,
    pub n_retained: usize,
    /// Mean of the centred, scaled samples (not exactly zero at finite coupling).
    pub sample_mean: Vec<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub empirical_cov: DMatrix<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub reference_cov: DMatrix<f64>,
    pub max_entry_deviation: f64,
    pub acceptance_rate: f64,
}

impl EmpiricalCLT {
    /// Every entry within `rel` relative or `abs` absolute of the reference.
    pub fn within(&self, rel: f64, abs: f64) -> bool {
        self.empirical_cov.iter().zip(self.reference_cov.iter()).all(|(e, r)| {
            let d = (e - r).abs();
            d <= rel * r.abs() || d <= abs
        })
    }
}

struct Target {
    params: EnsembleParams,
    coupling: f64,
    centre: Vec<f64>,
    /// Multiplies `X - centre` to give the CLT-scaled fluctuation.
    amplification: f64,
    /// Per-coordinate proposal standard deviation in `X` units.
    step: Vec<f64>,
    reference: DMatrix<f64>,
}

impl Target {
    fn new(params: &EnsembleParams, coupling: f64, proposal_scale: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::domain(format!("coupling must be positive, got {coupling}")));
        }
        let cov = assemble(params)?;
        let (centre, amplification): (Vec<f64>, f64) = match params.family() {
            Family::JacobiAlgebraic => (cov.zeros.clone(), coupling.sqrt()),
            Family::JacobiTrigonometric => {
                (cov.zeros.iter().map(|z| 0.5 * z.acos()).collect(), coupling.sqrt())
            }
            Family::Laguerre => {
                let s = (2.0 * coupling).sqrt();
                (cov.zeros.iter().map(|z| s * z.sqrt()).collect(), 1.0)
            }
        };
        let reference = cov.sigma_direct;
        // proposal matched to the frozen fluctuation of each coordinate
        let step = (0..params.dim_n())
            .map(|i| proposal_scale * reference[(i, i)].sqrt() / amplification)
            .collect();
        Ok(Self { params: *params, coupling, centre, amplification, step, reference })
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        log_density(&self.params, self.coupling, x)
    }
}

struct ChainOutput {
    moments: Moments,
    accepted: usize,
    proposed: usize,
}

fn run_single<W: Write>(target: &Target, config: &ChainConfig, mut sink: Option<&mut W>) -> Result<ChainOutput> {
    let n = target.params.dim_n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = target.centre.clone();
    let mut log_p = target.log_density(&x);
    if !log_p.is_finite() {
        return Err(Error::Consistency("chain start point lies outside the domain".into()));
    }
    let mut proposal = vec![0.0; n];
    let mut scaled = vec![0.0; n];
    let mut moments = Moments::new(n);
    let (mut accepted, mut proposed) = (0, 0);
    let total = config.burn_in + config.n_samples * config.thinning;
    for step in 0..total {
        for ((p, xi), s) in proposal.iter_mut().zip(&x).zip(&target.step) {
            let g: f64 = rng.sample(StandardNormal);
            *p = xi + s * g;
        }
        let log_q = target.log_density(&proposal);
        let u: f64 = rng.gen();
        let accept = log_q.is_finite() && u.ln() < log_q - log_p;
        if accept {
            x.copy_from_slice(&proposal);
            log_p = log_q;
        }
        if step < config.burn_in {
            continue;
        }
        proposed += 1;
        accepted += usize::from(accept);
        if (step - config.burn_in + 1) % config.thinning == 0 {
            if !inside(target.params.family(), &x) {
                return Err(Error::Consistency("retained sample violates the ordering".into()));
            }
            for ((sc, xi), c) in scaled.iter_mut().zip(&x).zip(&target.centre) {
                *sc = target.amplification * (xi - c);
            }
            moments.push(&scaled);
            if let Some(out) = sink.as_deref_mut() {
                let fields: Vec<String> = x.iter().map(|v| fmt_float(*v)).collect();
                csv_line(out, &fields)?;
            }
        }
    }
    Ok(ChainOutput { moments, accepted, proposed })
}

fn finish(target: Target, config: ChainConfig, moments: Moments, accepted: usize, proposed: usize) -> Result<EmpiricalCLT> {
    let rate = accepted as f64 / proposed.max(1) as f64;
    if !(MIN_ACCEPTANCE..=MAX_ACCEPTANCE).contains(&rate) {
        let hint = if rate < MIN_ACCEPTANCE {
            format!("decrease proposal_scale (now {})", config.proposal_scale)
        } else {
            format!("increase proposal_scale (now {})", config.proposal_scale)
        };
        return Err(Error::Tuning { rate, hint });
    }
    let empirical_cov = moments.covariance();
    let max_entry_deviation = empirical_cov
        .iter()
        .zip(target.reference.iter())
        .map(|(e, r)| (e - r).abs())
        .fold(0.0, f64::max);
    Ok(EmpiricalCLT {
        params: target.params,
        coupling: target.coupling,
        config,
        n_retained: moments.count,
        sample_mean: moments.mean,
        empirical_cov,
        reference_cov: target.reference,
        max_entry_deviation,
        acceptance_rate: rate,
    })
}

/// One Metropolis chain started at the frozen centre.
pub fn run_chain(params: &EnsembleParams, coupling: f64, config: ChainConfig) -> Result<EmpiricalCLT> {
    run_chain_streaming::<std::io::Sink>(params, coupling, config, None)
}

/// As [`run_chain`], also writing each retained raw sample as a CSV row.
pub fn run_chain_streaming<W: Write>(
    params: &EnsembleParams,
    coupling: f64,
    config: ChainConfig,
    sink: Option<&mut W>,
) -> Result<EmpiricalCLT> {
    config.validate()?;
    let target = Target::new(params, coupling, config.proposal_scale)?;
    let out = run_single(&target, &config, sink)?;
    finish(target, config, out.moments, out.accepted, out.proposed)
}

/// `chains` independent chains with seeds `seed, seed + 1, ...`, run in
/// parallel; each retains `config.n_samples` and the moments are pooled.
pub fn run_chains(params: &EnsembleParams, coupling: f64, config: ChainConfig, chains: usize) -> Result<EmpiricalCLT> {
    config.validate()?;
    if chains == 0 {
        return Err(Error::domain("at least one chain is required"));
    }
    let target = Target::new(params, coupling, config.proposal_scale)?;
    let outputs = (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let cfg = ChainConfig { seed: config.seed.wrapping_add(c), ..config };
            run_single::<std::io::Sink>(&target, &cfg, None)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pooled = Moments::new(params.dim_n());
    let (mut accepted, mut proposed) = (0, 0);
    for o in &outputs {
        pooled = pooled.merge(&o.moments);
        accepted += o.accepted;
        proposed += o.proposed;
    }
    finish(target, config, pooled, accepted, proposed)
}
