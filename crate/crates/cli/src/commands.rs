use std::fs::File;
use std::io::{self, BufWriter, Write};

use frozen_edge::bessel::{bessel_zeros, limit_cov, limit_orthonormality, LimitKind};
use frozen_edge::convergence::{scaled_cov_sequence, Y_MAX};
use frozen_edge::export::{csv_line, fmt_float, write_csv_metadata, write_json, write_matrix_csv};
use frozen_edge::frozencov::assemble;
use frozen_edge::linalg::identity_deviation;
use frozen_edge::quadrature::{ABS_TOL, GAUSS_ORDER, MAX_REFINEMENTS, REL_TOL};
use frozen_edge::sampler::{run_chain, run_chain_streaming, run_chains, ChainConfig};
use frozen_edge::{Error, Family, PolyWeight, Result};
use serde_json::{json, Map, Value};

use crate::args::{ConvergeArgs, CovArgs, Ensemble, Format, LimitArgs, LimitMode, Output, SampleArgs, ZerosArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 3;

fn meta(command: &str, ensemble: &Ensemble) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("frozen-edge"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("family".into(), json!(ensemble.family()));
    match ensemble.family() {
        Family::Laguerre => {
            m.insert("nu".into(), json!(ensemble.nu));
        }
        _ => {
            m.insert("alpha".into(), json!(ensemble.alpha));
            m.insert("beta".into(), json!(ensemble.beta));
        }
    }
    m
}

fn quadrature_meta(m: &mut Map<String, Value>) {
    m.insert("quad_gauss_order".into(), json!(GAUSS_ORDER));
    m.insert("quad_abs_tol".into(), json!(ABS_TOL));
    m.insert("quad_rel_tol".into(), json!(REL_TOL));
    m.insert("quad_max_refinements".into(), json!(MAX_REFINEMENTS));
}

fn bool_text(b: bool) -> String {
    b.to_string()
}

/// Writes either `{"meta": ..., "result": ...}` or metadata comments
/// followed by the CSV body.
fn emit(
    out: &Output,
    meta: Map<String, Value>,
    result: Value,
    csv_body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let mut sink: Box<dyn Write> = match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match out.format {
        Format::Json => write_json(&mut sink, &json!({ "meta": meta, "result": result }))?,
        Format::Csv => {
            write_csv_metadata(&mut sink, &Value::Object(meta))?;
            csv_body(&mut *sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

pub fn zeros(args: &ZerosArgs) -> Result<i32> {
    let params = args.ensemble.params(args.n)?;
    let zeros = params.zeros()?;
    let mut m = meta("zeros", &args.ensemble);
    m.insert("n".into(), json!(args.n));
    let result = json!({
        "zeros": zeros.zeros(),
        "polish_residuals": zeros.polish_residuals(),
    });
    emit(&args.out, m, result, |w| {
        csv_line(w, &["index".into(), "zero".into(), "polish_residual".into()])?;
        for (i, (z, res)) in zeros.zeros().iter().zip(zeros.polish_residuals()).enumerate() {
            csv_line(w, &[(i + 1).to_string(), fmt_float(*z), fmt_float(*res)])?;
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

pub fn cov(args: &CovArgs) -> Result<i32> {
    let params = args.ensemble.params(args.n)?;
    let cov = assemble(&params)?;
    let passed = cov.route_discrepancy <= args.route_tol;
    let mut m = meta("cov", &args.ensemble);
    m.insert("n".into(), json!(args.n));
    m.insert("route_tol".into(), json!(args.route_tol));
    m.insert("route_discrepancy".into(), json!(cov.route_discrepancy));
    m.insert("orthogonality_residual".into(), json!(cov.orthogonality_residual));
    m.insert("route_check_passed".into(), json!(passed));
    let result = serde_json::to_value(&cov)?;
    emit(&args.out, m, result, |w| {
        writeln!(w, "# section=eigenvalues")?;
        csv_line(w, &cov.eigenvalues.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>())?;
        writeln!(w, "# section=s_matrix")?;
        write_matrix_csv(w, &cov.s_matrix)?;
        writeln!(w, "# section=sigma")?;
        write_matrix_csv(w, &cov.sigma_direct)
    })?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn require_jacobi(ensemble: &Ensemble) -> Result<()> {
    if ensemble.family() == Family::Laguerre {
        return Err(Error::Domain("the ratio check compares the two Jacobi limits".into()));
    }
    Ok(())
}

pub fn limit(args: &LimitArgs) -> Result<i32> {
    // validates the parameters even though only alpha or nu enters
    args.ensemble.weight()?;
    let param = args.ensemble.limit_param();
    let mut m = meta("limit", &args.ensemble);
    quadrature_meta(&mut m);
    m.insert("tol".into(), json!(args.tol));
    match args.kind {
        LimitMode::Cov => {
            m.insert("kind".into(), json!("cov"));
            let value = limit_cov(LimitKind::for_family(args.ensemble.family()), param, args.r, args.s)?;
            let result = serde_json::to_value(value)?;
            emit(&args.out, m, result, |w| {
                csv_line(w, &["kind".into(), "r".into(), "s".into(), "value".into(), "quad_error_estimate".into()])?;
                let kind = serde_json::to_value(value.kind)?;
                csv_line(
                    w,
                    &[
                        kind.as_str().unwrap_or_default().to_string(),
                        value.r.to_string(),
                        value.s.to_string(),
                        fmt_float(value.value),
                        fmt_float(value.quad_error_estimate),
                    ],
                )
            })?;
            Ok(EXIT_OK)
        }
        LimitMode::Ratio => {
            require_jacobi(&args.ensemble)?;
            m.insert("kind".into(), json!("ratio"));
            let trig = limit_cov(LimitKind::JacobiTrig, param, args.r, args.s)?;
            let alg = limit_cov(LimitKind::JacobiAlg, param, args.r, args.s)?;
            let table = bessel_zeros(param, args.r.max(args.s))?;
            let expected = 1.0 / (4.0 * table.zero(args.r) * table.zero(args.s));
            let ratio = alg.value / trig.value;
            let passed = ((ratio - expected) / expected).abs() <= args.tol;
            m.insert("check_passed".into(), json!(passed));
            let result = json!({
                "jacobi_trig": trig,
                "jacobi_alg": alg,
                "ratio": ratio,
                "expected": expected,
                "j_r": table.zero(args.r),
                "j_s": table.zero(args.s),
            });
            emit(&args.out, m, result, |w| {
                csv_line(w, &["ratio".into(), "expected".into(), "passed".into()])?;
                csv_line(w, &[fmt_float(ratio), fmt_float(expected), bool_text(passed)])
            })?;
            Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        LimitMode::Gram => {
            m.insert("kind".into(), json!("gram"));
            m.insert("r_max".into(), json!(args.r_max));
            let gram = limit_orthonormality(param, args.ensemble.family(), args.r_max)?;
            let deviation = identity_deviation(&gram);
            let passed = deviation <= args.tol;
            m.insert("max_identity_deviation".into(), json!(deviation));
            m.insert("check_passed".into(), json!(passed));
            let result = json!({
                "gram": frozen_edge::export::matrix_rows(&gram),
                "max_identity_deviation": deviation,
            });
            emit(&args.out, m, result, |w| write_matrix_csv(w, &gram))?;
            Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

pub fn converge(args: &ConvergeArgs) -> Result<i32> {
    let template = args.ensemble.params(1)?;
    let report = scaled_cov_sequence(&template, args.r, args.s, &args.grid)?;
    let passed = report.errors_monotone(args.monotone_tol);
    let mut m = meta("converge", &args.ensemble);
    quadrature_meta(&mut m);
    m.insert("r".into(), json!(args.r));
    m.insert("s".into(), json!(args.s));
    m.insert("grid".into(), json!(args.grid));
    m.insert("y_max".into(), json!(Y_MAX));
    m.insert("monotone_tol".into(), json!(args.monotone_tol));
    m.insert("fitted_rate".into(), json!(report.fitted_rate));
    m.insert("check_passed".into(), json!(passed));
    let result = serde_json::to_value(&report)?;
    emit(&args.out, m, result, |w| report.write_csv(w))?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn sample(args: &SampleArgs) -> Result<i32> {
    let params = args.ensemble.params(args.n)?;
    let config = ChainConfig {
        n_samples: args.samples,
        burn_in: args.burn_in,
        thinning: args.thinning,
        proposal_scale: args.proposal_scale,
        seed: args.seed,
    };
    let clt = match (&args.samples_out, args.chains) {
        (Some(_), c) if c != 1 => {
            return Err(Error::Domain("--samples-out needs a single chain".into()));
        }
        (Some(path), _) => {
            let mut raw = BufWriter::new(File::create(path)?);
            let clt = run_chain_streaming(&params, args.coupling, config, Some(&mut raw))?;
            raw.flush()?;
            clt
        }
        (None, 1) => run_chain(&params, args.coupling, config)?,
        (None, c) => run_chains(&params, args.coupling, config, c)?,
    };
    let passed = clt.within(args.rel_tol, args.abs_tol);
    let mut m = meta("sample", &args.ensemble);
    m.insert("n".into(), json!(args.n));
    m.insert("coupling".into(), json!(args.coupling));
    m.insert("samples".into(), json!(args.samples));
    m.insert("burn_in".into(), json!(args.burn_in));
    m.insert("thinning".into(), json!(args.thinning));
    m.insert("proposal_scale".into(), json!(args.proposal_scale));
    m.insert("seed".into(), json!(args.seed));
    m.insert("chains".into(), json!(args.chains));
    m.insert("rng".into(), json!("ChaCha8"));
    m.insert("rel_tol".into(), json!(args.rel_tol));
    m.insert("abs_tol".into(), json!(args.abs_tol));
    m.insert("acceptance_rate".into(), json!(clt.acceptance_rate));
    m.insert("check_passed".into(), json!(passed));
    let centre_kind = match params.weight() {
        PolyWeight::Jacobi { .. } => "sqrt(kappa) (X - zeros)",
        PolyWeight::Laguerre { .. } => "X - sqrt(2 beta) sqrt(zeros)",
    };
    m.insert("fluctuation".into(), json!(centre_kind));
    let result = serde_json::to_value(&clt)?;
    emit(&args.out, m, result, |w| {
        writeln!(w, "# section=empirical_cov")?;
        write_matrix_csv(w, &clt.empirical_cov)?;
        writeln!(w, "# section=reference_cov")?;
        write_matrix_csv(w, &clt.reference_cov)
    })?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}
