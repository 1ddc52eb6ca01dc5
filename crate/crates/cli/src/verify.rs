//! Self-contained invariant suite behind `rtgrowth verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtgrowth::analysis::{
    continuity_probe, limit_check, sweep_theta, threshold_check, Check, DEFAULT_FRACTIONS,
};
use rtgrowth::fixedpoint::solve_lambda;
use rtgrowth::model::{theta_critical, upper_bound_m};
use rtgrowth::modeforms::{check_trace_inequalities, interface_ratio_profile};
use rtgrowth::oracle::{dispersion_curve, jump_row_residuals};
use rtgrowth::spectrum::alpha_curve;
use rtgrowth::{mode_lambda, Discretization, Error, FluidConfig, Result};

pub const TRACE_SAMPLES: usize = 1000;
pub const TRACE_WAVE_NUMBERS: [f64; 3] = [0.5, 1.0, 2.0];
pub const ORACLE_WAVE_NUMBERS: [f64; 3] = [1.0, std::f64::consts::SQRT_2, 2.0];
pub const ORACLE_TOL: f64 = 5e-5;
pub const ORACLE_TOL_EXTRAPOLATED: f64 = 1e-6;
pub const STABLE_FRACTIONS: [f64; 3] = [1.0, 1.01, 2.0];
/// The oracle tolerances refer to this resolution; coarser runs are raised to it.
pub const ORACLE_MIN_RESOLUTION: usize = 128;

fn guarded(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
}

/// Random profile with every free coefficient uniform in `[-1, 1]`.
pub fn random_profile(
    rng: &mut ChaCha8Rng,
    disc: Discretization,
    cfg: &FluidConfig,
) -> rtgrowth::modeforms::VerticalProfile {
    let x: Vec<f64> = (0..disc.free_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    disc.profile_from_vector(&x, cfg)
}

pub fn interface_ratio(cfg: &FluidConfig) -> Result<Check> {
    let (_, ratio) = interface_ratio_profile(cfg)?;
    let want = cfg.max_period_sq();
    let rel = (ratio - want).abs() / want;
    Ok(Check::new(
        "interface_energy_ratio",
        rel <= 1e-12,
        format!("ratio {ratio}, max L^2 {want}"),
    ))
}

pub fn trace_inequalities(cfg: &FluidConfig, samples: usize) -> Result<Check> {
    let disc = Discretization::new(16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let p = random_profile(&mut rng, disc, cfg);
        for &k in &TRACE_WAVE_NUMBERS {
            let r = check_trace_inequalities(k, &p, cfg)?;
            for l in [r.lower, r.upper] {
                worst = worst.max(l.trace_ratio).max(l.slope_ratio);
            }
            if !r.pass() {
                failures += 1;
            }
        }
    }
    Ok(Check::new(
        "trace_inequalities",
        failures == 0,
        format!("{} cases, {failures} failures, worst ratio {worst}", samples * TRACE_WAVE_NUMBERS.len()),
    ))
}

pub fn alpha_monotone(cfg: &FluidConfig, disc: Discretization, s_grid: &[f64]) -> Result<Check> {
    match alpha_curve(cfg, s_grid, disc) {
        Ok(c) => {
            let a: Vec<f64> = c.samples.iter().map(|v| v.alpha).collect();
            let ok = a.windows(2).all(|w| w[1] < w[0]);
            Ok(Check::new("alpha_strictly_decreasing", ok, format!("{a:?}")))
        }
        Err(e @ Error::MonotonicityViolation(_)) => {
            Ok(Check::new("alpha_strictly_decreasing", false, e.to_string()))
        }
        Err(e) => Err(e),
    }
}

/// Fixed-point certificate at one surface tension.
pub fn fixed_point(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<Check> {
    let r = solve_lambda(cfg, disc, tol)?;
    let bound = tol * r.lambda.powi(2).max(1.0);
    let m = upper_bound_m(cfg)?;
    Ok(Check::new(
        &format!("fixed_point_theta_{}", cfg.theta),
        r.fixed_point_residual <= bound && r.lambda <= m,
        format!(
            "lambda {}, residual {} (limit {bound}), m {m}",
            r.lambda, r.fixed_point_residual
        ),
    ))
}

pub fn sweep(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<Vec<Check>> {
    let s = sweep_theta(cfg, &DEFAULT_FRACTIONS, disc, tol)?;
    let mut out: Vec<Check> = s
        .checks()
        .into_iter()
        .map(|mut c| {
            c.name = format!("sweep_{}", c.name);
            c
        })
        .collect();
    let worst = s
        .points
        .iter()
        .map(|p| p.residual / p.lambda.powi(2).max(1.0))
        .fold(0.0, f64::max);
    out.push(Check::new(
        "sweep_fixed_point_residuals",
        worst <= tol,
        format!("max scaled residual {worst}"),
    ));
    Ok(out)
}

pub fn continuity(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<Check> {
    let tc = theta_critical(cfg);
    let r = continuity_probe(cfg, 0.5 * tc, &[1e-2 * tc, 1e-3 * tc], disc, tol)?;
    Ok(Check::new(
        "continuity_ordering",
        r.ordering_holds(),
        format!("lambda0 {}, observed modulus {}", r.lambda0, r.modulus),
    ))
}

pub fn limit(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<Vec<Check>> {
    Ok(limit_check(cfg, disc, tol)?
        .checks()
        .into_iter()
        .map(|mut c| {
            c.name = format!("limit_{}", c.name);
            c
        })
        .collect())
}

pub fn threshold(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<Check> {
    let r = threshold_check(cfg, &STABLE_FRACTIONS, disc, tol)?;
    Ok(Check::new(
        "stable_at_and_beyond_threshold",
        r.iter().all(|&(_, s)| s),
        format!("{r:?}"),
    ))
}

/// Variational per-mode rates against determinant roots at `theta/theta_c` in `fractions`.
pub fn oracle(cfg: &FluidConfig, disc: Discretization, fractions: &[f64]) -> Result<Vec<Check>> {
    let tc = theta_critical(cfg);
    let disc = Discretization::new(disc.elements_per_layer.max(ORACLE_MIN_RESOLUTION))?;
    let mut out = Vec::new();
    for &f in fractions {
        let c = cfg.with_theta(f * tc);
        let rows = dispersion_curve(&c, &ORACLE_WAVE_NUMBERS, disc, 1e-10, true)?;
        for r in rows {
            let (pass, detail) = match (r.rel_diff, r.rel_diff_extrapolated) {
                (Some(a), Some(b)) => (
                    a <= ORACLE_TOL && b <= ORACLE_TOL_EXTRAPOLATED,
                    format!(
                        "N = {}: rel diff {a}, extrapolated {b}",
                        disc.elements_per_layer
                    ),
                ),
                _ => (
                    r.lambda_oracle.is_none() && r.lambda_variational.is_none(),
                    format!(
                        "oracle {:?}, variational {:?}",
                        r.lambda_oracle, r.lambda_variational
                    ),
                ),
            };
            out.push(Check::new(
                &format!("oracle_theta_frac_{f}_k_{}", r.k),
                pass,
                detail,
            ));
        }
    }
    Ok(out)
}

/// Stress-jump residuals of the k = 1 eigenprofile shrink under refinement.
pub fn jump_rows(cfg: &FluidConfig, disc: Discretization) -> Result<Check> {
    let eval = |d: Discretization| -> Result<Option<f64>> {
        Ok(mode_lambda(1.0, cfg, d, 1e-10)?.map(|m| {
            let p = d.profile_from_vector(&m.eigen.vector, cfg);
            jump_row_residuals(1.0, m.lambda, &p, cfg).max()
        }))
    };
    Ok(match (eval(disc)?, eval(disc.refined())?) {
        (Some(a), Some(b)) => Check::new(
            "jump_rows_converge",
            b < a,
            format!("{a} -> {b}"),
        ),
        _ => Check::new("jump_rows_converge", true, "mode k = 1 is stable".into()),
    })
}

pub fn run_suite(
    cfg: &FluidConfig,
    disc: Discretization,
    tol: f64,
    s_grid: &[f64],
) -> Result<Vec<Check>> {
    let base = cfg.with_theta(0.0);
    let tc = theta_critical(cfg);
    let mut checks = vec![
        guarded("interface_energy_ratio", || interface_ratio(cfg)),
        guarded("trace_inequalities", || trace_inequalities(cfg, TRACE_SAMPLES)),
        guarded("alpha_strictly_decreasing", || alpha_monotone(&base, disc, s_grid)),
        guarded("fixed_point_theta_0", || fixed_point(&base, disc, tol)),
        guarded("fixed_point_half", || fixed_point(&cfg.with_theta(0.5 * tc), disc, tol)),
    ];
    let many = |name: &str, r: Result<Vec<Check>>| {
        r.unwrap_or_else(|e| vec![Check::new(name, false, format!("error: {e}"))])
    };
    checks.extend(many("sweep", sweep(cfg, disc, tol)));
    checks.push(guarded("continuity_ordering", || continuity(cfg, disc, tol)));
    checks.extend(many("limit", limit(cfg, disc, tol)));
    checks.push(guarded("stable_at_and_beyond_threshold", || threshold(cfg, disc, tol)));
    checks.extend(many("oracle", oracle(cfg, disc, &[0.0, 0.5])));
    checks.push(guarded("jump_rows_converge", || jump_rows(cfg, disc)));
    Ok(checks)
}
