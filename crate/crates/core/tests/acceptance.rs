//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Lines marked `info` are diagnostics, not criteria.

use std::time::Instant;

use frozen_edge::bessel::{bessel_zeros, limit_orthonormality};
use frozen_edge::convergence::{
    fit_rate, h_weights, limit_function, scaled_cov_sequence, spectral_sum, step_fn, sup_error, Y_MAX,
};
use frozen_edge::frozencov::{assemble, closed_form_eigenvalues, inv_cov_jacobi_algebraic, inv_cov_jacobi_trig, trig_scaling};
use frozen_edge::linalg::{identity_deviation, symmetric_eigenvalues};
use frozen_edge::orthopoly::hard_edge_zero_check;
use frozen_edge::sampler::{run_chains, ChainConfig};
use frozen_edge::{EnsembleParams, Family};
use nalgebra::DMatrix;

type Outcome = Result<String, String>;

const JACOBI_PARAMS: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 1.5), (-0.5, 2.0)];
const SMALL_GRID: [usize; 3] = [5, 20, 100];

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max)
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn all_params(grid: &[usize]) -> Vec<EnsembleParams> {
    let mut out = Vec::new();
    for &n in grid {
        for (a, b) in JACOBI_PARAMS {
            out.push(EnsembleParams::jacobi_trigonometric(a, b, n).unwrap());
        }
        for nu in [0.5, 1.0, 3.0] {
            out.push(EnsembleParams::laguerre(nu, n).unwrap());
        }
    }
    out
}

fn spectral_identity(family: Family) -> Outcome {
    let mut worst = 0.0f64;
    for p in all_params(&SMALL_GRID).into_iter().filter(|p| p.family() == family) {
        let cov = assemble(&p).map_err(|e| format!("{p:?}: {e}"))?;
        let mut numeric = symmetric_eigenvalues(&cov.s_matrix).map_err(|e| e.to_string())?;
        numeric.sort_by(f64::total_cmp);
        worst = worst.max(max_rel(&numeric, &closed_form_eigenvalues(&p)));
    }
    verdict(worst <= 1e-8, format!("max relative eigenvalue error {worst:.3e} (tol 1e-8)"))
}

fn eigenvectors() -> Outcome {
    let mut worst = 0.0f64;
    for p in all_params(&[5, 20, 50, 100]) {
        let cov = assemble(&p).map_err(|e| e.to_string())?;
        let t = cov.t_matrix.entries();
        for (j, &lambda) in cov.eigenvalues.iter().enumerate() {
            let col = t.column(j);
            let res = (&cov.s_matrix * col - col * lambda).amax();
            worst = worst.max(res / lambda);
        }
    }
    verdict(worst <= 1e-6, format!("max |S t_j - lambda_j t_j|_inf / lambda_j = {worst:.3e} (tol 1e-6)"))
}

fn d_conjugation() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 5, 20, 50, 100] {
        for (a, b) in JACOBI_PARAMS {
            let z = EnsembleParams::jacobi_algebraic(a, b, n).unwrap().zeros().unwrap();
            let trig = inv_cov_jacobi_trig(&z, a, b).map_err(|e| e.to_string())?;
            let alg = inv_cov_jacobi_algebraic(&z, a, b).unwrap();
            let d = trig_scaling(&z);
            let conj = DMatrix::from_fn(n, n, |i, j| d[i] * alg[(i, j)] * d[j]);
            worst = worst.max((&trig - conj).amax() / trig.amax());
        }
    }
    verdict(worst <= 1e-10, format!("max relative |S~ - D S D| = {worst:.3e} (tol 1e-10)"))
}

fn t_orthogonality() -> Outcome {
    let mut worst = 0.0f64;
    for p in all_params(&[5, 20, 100, 200]) {
        let cov = assemble(&p).map_err(|e| e.to_string())?;
        worst = worst.max(identity_deviation(&(cov.t_matrix.entries().transpose() * cov.t_matrix.entries())));
    }
    verdict(worst <= 1e-8, format!("max |T^T T - I| = {worst:.3e} (tol 1e-8)"))
}

fn route_agreement() -> Outcome {
    let mut params = all_params(&[5, 20, 50, 100]);
    for n in [5, 20, 50, 100] {
        for (a, b) in JACOBI_PARAMS {
            params.push(EnsembleParams::jacobi_algebraic(a, b, n).unwrap());
        }
    }
    let mut worst = 0.0f64;
    for p in params {
        let cov = assemble(&p).map_err(|e| e.to_string())?;
        worst = worst.max(cov.route_discrepancy / cov.sigma_direct.amax());
    }
    verdict(worst <= 1e-7, format!("max relative route discrepancy {worst:.3e} (tol 1e-7)"))
}

fn limit_gram() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [-0.5, 0.0, 0.5, 2.0] {
        let g = limit_orthonormality(alpha, Family::JacobiTrigonometric, 6).map_err(|e| e.to_string())?;
        worst = worst.max(identity_deviation(&g));
    }
    for nu in [0.5, 1.0, 2.0, 3.5] {
        let g = limit_orthonormality(nu, Family::Laguerre, 6).map_err(|e| e.to_string())?;
        worst = worst.max(identity_deviation(&g));
    }
    verdict(worst <= 1e-8, format!("max |G - I| over r,s <= 6 = {worst:.3e} (tol 1e-8)"))
}

fn trig_convergence() -> Outcome {
    let t = EnsembleParams::jacobi_trigonometric(0.0, 0.0, 1).unwrap();
    let r = scaled_cov_sequence(&t, 1, 1, &[25, 50, 100, 200]).map_err(|e| e.to_string())?;
    let ok = r.errors_strictly_decreasing() && r.fitted_rate <= -0.8;
    verdict(ok, format!(
            "errors {}, fitted rate {:.3} (need strictly decreasing, <= -0.8)",
            r.abs_errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" "),
            r.fitted_rate
        ),
    )
}

fn algebraic_limit() -> Outcome {
    let n = 200usize;
    let mut worst = 0.0f64;
    let mut info = Vec::new();
    for alpha in [0.0, 0.5] {
        for beta in [0.0, 1.0] {
            let t = EnsembleParams::jacobi_algebraic(alpha, beta, 1).unwrap();
            let r = scaled_cov_sequence(&t, 1, 1, &[50, 100, n]).map_err(|e| e.to_string())?;
            let value = *r.finite_values.last().unwrap();
            let gap = (value - r.limit.value).abs() / r.limit.value;
            worst = worst.max(gap);
            // the finite entries decay like N^-4; compare N^4 sigma with the
            // integral times 4 j^2 instead
            let j = bessel_zeros(alpha, 1).unwrap().zero(1);
            let integral = r.limit.value * 4.0 * j * j;
            let quartic = (n as f64).powi(4) * value;
            info.push(format!(
                "({alpha},{beta}): sigma={value:.4e} target={:.4e}; N^4 sigma={quartic:.4} vs 4 j^2 L={:.4} ({:.2}%)",
                r.limit.value,
                4.0 * j * j * integral,
                100.0 * (quartic / (4.0 * j * j * integral) - 1.0)
            ));
        }
    }
    for line in &info {
        println!("    info  {line}");
    }
    verdict(worst <= 0.02, format!("max relative gap {worst:.3e} at N=200 (tol 0.02)"))
}

fn laguerre_convergence() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for nu in [1.0, 2.0] {
        let t = EnsembleParams::laguerre(nu, 1).unwrap();
        let r = scaled_cov_sequence(&t, 1, 1, &frozen_edge::convergence::DEFAULT_GRID).map_err(|e| e.to_string())?;
        ok &= r.errors_monotone(0.0) && r.final_relative_gap() <= 0.02;
        details.push(format!("nu={nu}: gap {:.3e}", r.final_relative_gap()));
    }
    verdict(ok, format!("{} (need decreasing errors, gap <= 0.02)", details.join(", ")))
}

fn step_convergence() -> Outcome {
    let mut worst = 0.0f64;
    for template in [
        EnsembleParams::jacobi_trigonometric(0.0, 0.0, 1).unwrap(),
        EnsembleParams::jacobi_trigonometric(0.5, 1.0, 1).unwrap(),
        EnsembleParams::laguerre(1.0, 1).unwrap(),
        EnsembleParams::laguerre(2.0, 1).unwrap(),
    ] {
        for r in 1..=3 {
            let limit = limit_function(&template, r).map_err(|e| e.to_string())?;
            let err = |n| sup_error(&step_fn(&template.with_dim(n).unwrap(), r).unwrap(), &limit, Y_MAX);
            worst = worst.max(err(200) / err(50));
        }
    }
    verdict(worst <= 1.0 / 3.0, format!("max sup-error ratio N=200 / N=50 = {worst:.3} (tol 0.333)"))
}

fn zero_asymptotics() -> Outcome {
    let grid = [50usize, 100, 200];
    let mut worst = f64::NEG_INFINITY;
    let mut cases: Vec<(EnsembleParams, f64)> = vec![];
    for (a, b) in [(0.0, 0.0), (0.5, 1.0), (-0.5, 2.0)] {
        cases.push((EnsembleParams::jacobi_algebraic(a, b, 1).unwrap(), a));
    }
    for nu in [0.5, 1.0, 3.0] {
        cases.push((EnsembleParams::laguerre(nu, 1).unwrap(), nu - 1.0));
    }
    for (template, order) in cases {
        let j = bessel_zeros(order, 3).unwrap();
        let devs: Vec<Vec<f64>> = grid
            .iter()
            .map(|&n| hard_edge_zero_check(&template.with_dim(n).unwrap().zeros().unwrap(), j.zeros(), 3).unwrap())
            .collect();
        for r in 0..3 {
            let ys: Vec<f64> = devs.iter().map(|d| d[r]).collect();
            worst = worst.max(fit_rate(&grid, &ys).map_err(|e| e.to_string())?);
        }
    }
    verdict(worst <= -2.5, format!("shallowest log-log slope {worst:.3} over r <= 3 (tol -2.5)"))
}

fn spectral_sum_identity() -> Outcome {
    let n = 40;
    let mut worst = 0.0f64;
    for (a, b) in JACOBI_PARAMS {
        let p = EnsembleParams::jacobi_trigonometric(a, b, n).unwrap();
        let cov = assemble(&p).map_err(|e| e.to_string())?;
        let h = h_weights(n, a, b).unwrap();
        let fs: Vec<_> = (1..=6).map(|r| step_fn(&p, r).unwrap()).collect();
        for r in 1..=6 {
            for s in 1..=6 {
                let direct = (n * n) as f64 * cov.sigma(n - r + 1, n - s + 1);
                worst = worst.max((direct - spectral_sum(&h, &fs[r - 1], &fs[s - 1])).abs());
            }
        }
    }
    verdict(worst <= 1e-9, format!("max |N^2 sigma~ - h-weighted sum| = {worst:.3e} (tol 1e-9)"))
}

fn monte_carlo() -> Outcome {
    let chains = 8;
    let config = ChainConfig { n_samples: 1_000_000 / chains, burn_in: 20_000, thinning: 10, proposal_scale: 1.5, seed: 2024 };
    let mut ok = true;
    let mut details = Vec::new();
    for n in [1, 2] {
        for p in [
            EnsembleParams::jacobi_algebraic(0.0, 0.0, n).unwrap(),
            EnsembleParams::jacobi_trigonometric(0.5, 1.0, n).unwrap(),
            EnsembleParams::laguerre(1.0, n).unwrap(),
        ] {
            let clt = run_chains(&p, 1e4, config, chains).map_err(|e| format!("{p:?}: {e}"))?;
            let pass = clt.within(0.10, 0.02);
            ok &= pass;
            let rel = clt
                .empirical_cov
                .iter()
                .zip(clt.reference_cov.iter())
                .map(|(e, r)| (e - r).abs() / r.abs())
                .fold(0.0, f64::max);
            details.push(format!("{:?} N={n}: max rel {rel:.3}{}", p.family(), if pass { "" } else { " FAIL" }));
        }
    }
    verdict(ok, format!("{} (tol 10% rel / 0.02 abs, 1e6 samples, coupling 1e4)", details.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("jacobi spectral identity", || spectral_identity(Family::JacobiTrigonometric)),
        ("laguerre spectral identity", || spectral_identity(Family::Laguerre)),
        ("eigenvector identity", eigenvectors),
        ("D-conjugation", d_conjugation),
        ("orthogonality of T", t_orthogonality),
        ("covariance route agreement", route_agreement),
        ("limit-function orthonormality", limit_gram),
        ("jacobi trig corner convergence", trig_convergence),
        ("jacobi algebraic limit", algebraic_limit),
        ("laguerre hard-edge convergence", laguerre_convergence),
        ("step-function convergence", step_convergence),
        ("zero asymptotics", zero_asymptotics),
        ("spectral-sum identity", spectral_sum_identity),
        ("monte carlo CLT", monte_carlo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {:>2}. {name}: {d} [{secs:.1}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {d} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
