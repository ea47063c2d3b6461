use frozen_edge::frozencov::assemble;
use frozen_edge::sampler::{inside, log_density, run_chain, run_chain_streaming, run_chains, ChainConfig, Moments};
use frozen_edge::{EnsembleParams, Error, Family};
use proptest::prelude::*;

fn short(seed: u64) -> ChainConfig {
    ChainConfig { n_samples: 5_000, burn_in: 1_000, thinning: 2, proposal_scale: 1.5, seed }
}

#[test]
fn laguerre_two_point_density_by_hand() {
    let p = EnsembleParams::laguerre(1.0, 2).unwrap();
    // (4 - 1)^(2*3) * (1*2)^(2*1*3) * exp(-(1 + 4)/2)
    let expected = 6.0 * 3f64.ln() + 6.0 * 2f64.ln() - 2.5;
    assert!((log_density(&p, 3.0, &[1.0, 2.0]) - expected).abs() < 1e-13);
}

#[test]
fn algebraic_density_by_hand() {
    let p = EnsembleParams::jacobi_algebraic(0.5, 1.0, 2).unwrap();
    let (k, x, y) = (4.0, -0.2, 0.3);
    let (ea, eb) = (0.5 * 1.5 * k - 0.5, 0.5 * 2.0 * k - 0.5);
    let expected = ea * ((1.0 - x) * (1.0 - y) as f64).ln() + eb * ((1.0 + x) * (1.0 + y) as f64).ln() + k * (y - x).ln();
    assert!((log_density(&p, k, &[x, y]) - expected).abs() < 1e-13);
}

#[test]
fn trig_density_is_the_algebraic_image() {
    // x = cos 2t: the algebraic density times the Jacobian |dx/dt| = 2 sin 2t,
    // i.e. the trig density up to a constant
    let (alpha, beta, k) = (0.5, 1.0, 3.0);
    let alg = EnsembleParams::jacobi_algebraic(alpha, beta, 2).unwrap();
    let trig = EnsembleParams::jacobi_trigonometric(alpha, beta, 2).unwrap();
    let diff = |t: [f64; 2]| {
        let x = [(2.0 * t[0]).cos(), (2.0 * t[1]).cos()];
        let jac: f64 = t.iter().map(|t| (2.0 * (2.0 * t).sin()).ln()).sum();
        log_density(&trig, k, &t) - (log_density(&alg, k, &x) + jac)
    };
    let c0 = diff([1.2, 0.3]);
    for t in [[1.0, 0.9], [0.7, 0.1], [1.5, 0.05]] {
        assert!((diff(t) - c0).abs() < 1e-11, "{t:?}");
    }
}

#[test]
fn single_point_jacobi_density_vanishes_at_origin() {
    let p = EnsembleParams::jacobi_algebraic(0.0, 0.0, 1).unwrap();
    assert_eq!(log_density(&p, 2.0, &[0.0]), 0.0);
}

#[test]
fn off_domain_points_have_zero_density() {
    let l = EnsembleParams::laguerre(1.0, 3).unwrap();
    assert_eq!(log_density(&l, 2.0, &[1.0, 1.0, 2.0]), f64::NEG_INFINITY);
    assert_eq!(log_density(&l, 2.0, &[-0.1, 1.0, 2.0]), f64::NEG_INFINITY);
    assert_eq!(log_density(&l, 2.0, &[1.0, 2.0]), f64::NEG_INFINITY);
    let a = EnsembleParams::jacobi_algebraic(0.0, 0.0, 2).unwrap();
    assert_eq!(log_density(&a, 2.0, &[0.5, -0.5]), f64::NEG_INFINITY);
    assert_eq!(log_density(&a, 2.0, &[-1.0, 0.5]), f64::NEG_INFINITY);
    assert!(!inside(Family::JacobiTrigonometric, &[0.2, 0.4]));
    assert!(inside(Family::JacobiTrigonometric, &[0.4, 0.2]));
    assert!(!inside(Family::JacobiTrigonometric, &[1.6, 0.2]));
}

#[test]
fn fixed_seed_is_reproducible() {
    let p = EnsembleParams::laguerre(1.0, 3).unwrap();
    let a = run_chain(&p, 1e3, short(7)).unwrap();
    let b = run_chain(&p, 1e3, short(7)).unwrap();
    assert_eq!(a.empirical_cov, b.empirical_cov);
    assert_eq!(a.acceptance_rate, b.acceptance_rate);
    let c = run_chain(&p, 1e3, short(8)).unwrap();
    assert_ne!(a.empirical_cov, c.empirical_cov);
}

#[test]
fn parallel_chains_are_reproducible() {
    let p = EnsembleParams::jacobi_trigonometric(0.0, 0.0, 2).unwrap();
    let a = run_chains(&p, 1e3, short(3), 4).unwrap();
    let b = run_chains(&p, 1e3, short(3), 4).unwrap();
    assert_eq!(a.empirical_cov, b.empirical_cov);
    assert_eq!(a.n_retained, 4 * 5_000);
    assert!(matches!(run_chains(&p, 1e3, short(3), 0), Err(Error::Domain(_))));
}

#[test]
fn streamed_samples_stay_in_the_domain() {
    for p in [
        EnsembleParams::jacobi_algebraic(0.0, 0.5, 3).unwrap(),
        EnsembleParams::jacobi_trigonometric(0.5, 0.0, 3).unwrap(),
        EnsembleParams::laguerre(2.0, 3).unwrap(),
    ] {
        let mut buf = Vec::new();
        let clt = run_chain_streaming(&p, 50.0, short(11), Some(&mut buf)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<Vec<f64>> =
            text.lines().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), clt.n_retained);
        assert!(rows.iter().all(|r| r.len() == 3 && inside(p.family(), r)), "{p:?}");
    }
}

#[test]
fn one_particle_variances_match_the_frozen_values() {
    let cfg = ChainConfig { n_samples: 100_000, burn_in: 10_000, thinning: 5, proposal_scale: 1.5, seed: 21 };
    for p in [EnsembleParams::jacobi_algebraic(0.0, 0.0, 1).unwrap(), EnsembleParams::laguerre(1.0, 1).unwrap()] {
        let reference = assemble(&p).unwrap().sigma_direct[(0, 0)];
        let clt = run_chains(&p, 1e4, cfg, 4).unwrap();
        let v = clt.empirical_cov[(0, 0)];
        assert!((v - reference).abs() <= 0.05 * reference, "{p:?}: {v} vs {reference}");
    }
}

#[test]
fn one_particle_reference_values() {
    // single zero at the centre of symmetric Jacobi / at nu for Laguerre
    let j = assemble(&EnsembleParams::jacobi_algebraic(0.0, 0.0, 1).unwrap()).unwrap();
    let l = assemble(&EnsembleParams::laguerre(1.0, 1).unwrap()).unwrap();
    assert!((j.sigma_direct[(0, 0)] - 1.0).abs() < 1e-12, "{}", j.sigma_direct[(0, 0)]);
    assert!((l.sigma_direct[(0, 0)] - 0.5).abs() < 1e-12, "{}", l.sigma_direct[(0, 0)]);
}

#[test]
fn tiny_proposals_are_reported_as_tuning_failures() {
    let p = EnsembleParams::jacobi_algebraic(0.0, 0.0, 1).unwrap();
    let cfg = ChainConfig { n_samples: 2000, burn_in: 100, thinning: 1, proposal_scale: 1e-4, seed: 1 };
    match run_chain(&p, 1e4, cfg) {
        Err(Error::Tuning { rate, .. }) => assert!(rate > 0.7),
        other => panic!("expected a tuning error, got {other:?}"),
    }
    let cfg = ChainConfig { proposal_scale: 1e3, ..cfg };
    match run_chain(&p, 1e4, cfg) {
        Err(Error::Tuning { rate, .. }) => assert!(rate < 0.05),
        other => panic!("expected a tuning error, got {other:?}"),
    }
}

#[test]
fn bad_coupling_is_a_domain_error() {
    let p = EnsembleParams::laguerre(1.0, 2).unwrap();
    assert!(matches!(run_chain(&p, 0.0, short(1)), Err(Error::Domain(_))));
    assert!(matches!(run_chain(&p, f64::NAN, short(1)), Err(Error::Domain(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_merge_is_associative(data in prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 3..60), a in 0usize..60, b in 0usize..60) {
        let n = data.len();
        let (i, j) = (a.min(b) % n, a.max(b) % n);
        let (i, j) = (i.min(j), i.max(j));
        let part = |r: &[[f64; 2]]| {
            let mut m = Moments::new(2);
            r.iter().for_each(|x| m.push(x));
            m
        };
        let (x, y, z) = (part(&data[..i]), part(&data[i..j]), part(&data[j..]));
        let left = x.merge(&y).merge(&z);
        let right = x.merge(&y.merge(&z));
        let all = part(&data);
        prop_assert_eq!(left.count, n);
        prop_assert!((left.covariance() - right.covariance()).amax() <= 1e-10);
        prop_assert!((left.covariance() - all.covariance()).amax() <= 1e-10);
    }

    #[test]
    fn density_rejects_unordered_points(x in 0.01f64..5.0, y in 0.01f64..5.0) {
        let p = EnsembleParams::laguerre(1.5, 2).unwrap();
        let v = log_density(&p, 2.0, &[x, y]);
        prop_assert_eq!(v.is_finite(), x < y);
    }
}
