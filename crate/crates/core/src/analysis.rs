//! Surface-tension sweeps: monotonicity, continuity and the vanishing limit
//! of the growth rate as `theta -> theta_c`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::{solve_lambda, solve_on_modes, GrowthResult};
use crate::model::{theta_critical, upper_bound_m, validate_config, lower_layer_bound, FluidConfig};
use crate::pencil::Discretization;
use crate::spectrum::{fmt_num, with_certified_modes, CutoffPolicy, ModeSet};

pub const DEFAULT_FRACTIONS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99];
pub const LIMIT_FRACTIONS: [f64; 3] = [0.9, 0.99, 0.999];
/// Slack on `Lambda <= m` for rounding in the fixed point.
pub const BOUND_SLACK: f64 = 1e-6;

/// One named assertion and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub fraction: f64,
    pub theta: f64,
    pub lambda: f64,
    pub bound_m: f64,
    pub argmax_k: f64,
    pub residual: f64,
    pub cutoff_certified: bool,
}

impl SweepPoint {
    fn from_result(fraction: f64, r: &GrowthResult) -> Self {
        SweepPoint {
            fraction,
            theta: r.theta,
            lambda: r.lambda,
            bound_m: r.bound_m,
            argmax_k: r.argmax_k,
            residual: r.fixed_point_residual,
            cutoff_certified: r.alpha_at_lambda.cutoff_certified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSweep {
    pub theta_c: f64,
    pub lower_layer_bound: f64,
    pub k_max: f64,
    pub resolution: usize,
    pub points: Vec<SweepPoint>,
}

impl ThetaSweep {
    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].lambda < w[0].lambda)
    }

    pub fn within_bound(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.lambda <= p.bound_m * (1.0 + BOUND_SLACK))
    }

    pub fn all_positive(&self) -> bool {
        self.points.iter().all(|p| p.lambda > 0.0)
    }

    pub fn checks(&self) -> Vec<Check> {
        let lam = self.lambdas();
        let worst = self
            .points
            .iter()
            .map(|p| p.lambda / p.bound_m)
            .fold(0.0, f64::max);
        let m0 = self.points.iter().map(|p| p.bound_m).fold(0.0, f64::max);
        vec![
            Check::new("strictly_decreasing", self.strictly_decreasing(), format!("{lam:?}")),
            Check::new(
                "below_bound_m",
                self.within_bound(),
                format!("max lambda/m = {worst}"),
            ),
            Check::new("positive", self.all_positive(), String::new()),
            Check::new(
                "m_below_lower_layer_bound",
                m0 <= self.lower_layer_bound,
                format!("m = {m0}, h- g [rho] / (4 mu-) = {}", self.lower_layer_bound),
            ),
            Check::new(
                "cutoff_certified",
                self.points.iter().all(|p| p.cutoff_certified),
                format!("k_max = {}", self.k_max),
            ),
        ]
    }
}

fn check_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::InvalidArgument("theta grid is empty".into()));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f >= 0.0 && **f < 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "theta fractions must lie in [0, 1), got {f}"
        )));
    }
    if fractions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "theta fractions must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn solve_at(
    cfg: &FluidConfig,
    theta: f64,
    disc: Discretization,
    tol: f64,
    modes: &ModeSet,
) -> Result<GrowthResult> {
    solve_on_modes(&cfg.with_theta(theta), disc, tol, modes).map_err(|e| e.at_theta(theta))
}

/// Solves at every theta on one mode set sized for `theta = 0`. The set
/// grows until every point passes the cutoff certificate.
fn on_shared_modes(
    cfg: &FluidConfig,
    thetas: &[f64],
    disc: Discretization,
    tol: f64,
    policy: CutoffPolicy,
) -> Result<(Vec<GrowthResult>, f64)> {
    let base = validate_config(cfg.with_theta(0.0))?;
    with_certified_modes(&base, policy, |modes| {
        let results: Vec<GrowthResult> = thetas
            .par_iter()
            .map(|&t| solve_at(&base, t, disc, tol, modes))
            .collect::<Result<_>>()?;
        let ok = results.iter().all(|r| r.alpha_at_lambda.cutoff_certified);
        Ok(((results, modes.k_max()), ok))
    })
}

pub fn sweep_theta(
    cfg: &FluidConfig,
    fractions: &[f64],
    disc: Discretization,
    tol: f64,
) -> Result<ThetaSweep> {
    sweep_theta_with(cfg, fractions, disc, tol, CutoffPolicy::default())
}

pub fn sweep_theta_with(
    cfg: &FluidConfig,
    fractions: &[f64],
    disc: Discretization,
    tol: f64,
    policy: CutoffPolicy,
) -> Result<ThetaSweep> {
    let cfg = validate_config(*cfg)?;
    check_fractions(fractions)?;
    let disc = Discretization::new(disc.elements_per_layer)?;
    let theta_c = theta_critical(&cfg);
    let thetas: Vec<f64> = fractions.iter().map(|f| f * theta_c).collect();
    let (results, k_max) = on_shared_modes(&cfg, &thetas, disc, tol, policy)?;
    Ok(ThetaSweep {
        theta_c,
        lower_layer_bound: lower_layer_bound(&cfg),
        k_max,
        resolution: disc.elements_per_layer,
        points: fractions
            .iter()
            .zip(&results)
            .map(|(&f, r)| SweepPoint::from_result(f, r))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub delta: f64,
    pub lambda_below: f64,
    pub lambda_above: f64,
    pub gap_below: f64,
    pub gap_above: f64,
    pub ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub theta0: f64,
    pub lambda0: f64,
    pub rows: Vec<ContinuityRow>,
    /// Largest observed `gap / delta`.
    pub modulus: f64,
}

impl ContinuityReport {
    pub fn ordering_holds(&self) -> bool {
        self.rows.iter().all(|r| r.ordered)
    }
}

/// Growth rates at `theta0 +- delta` for each `delta`, all on one mode set.
pub fn continuity_probe(
    cfg: &FluidConfig,
    theta0: f64,
    deltas: &[f64],
    disc: Discretization,
    tol: f64,
) -> Result<ContinuityReport> {
    let cfg = validate_config(*cfg)?;
    let theta_c = theta_critical(&cfg);
    if !(theta0 > 0.0 && theta0 < theta_c) {
        return Err(Error::InvalidArgument(format!(
            "theta0 must lie in (0, {theta_c}), got {theta0}"
        )));
    }
    for &d in deltas {
        if !(d >= 0.0 && theta0 - d >= 0.0 && theta0 + d < theta_c) {
            return Err(Error::InvalidArgument(format!(
                "theta0 +- {d} leaves [0, theta_c)"
            )));
        }
    }
    let mut thetas = vec![theta0];
    for &d in deltas {
        thetas.push(theta0 - d);
        thetas.push(theta0 + d);
    }
    let (results, _) = on_shared_modes(&cfg, &thetas, disc, tol, CutoffPolicy::default())?;
    let lambda0 = results[0].lambda;
    let rows: Vec<ContinuityRow> = deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let below = results[1 + 2 * i].lambda;
            let above = results[2 + 2 * i].lambda;
            ContinuityRow {
                delta,
                lambda_below: below,
                lambda_above: above,
                gap_below: (below - lambda0).abs(),
                gap_above: (above - lambda0).abs(),
                ordered: delta == 0.0 || (below > lambda0 && lambda0 > above),
            }
        })
        .collect();
    let modulus = rows
        .iter()
        .filter(|r| r.delta > 0.0)
        .map(|r| r.gap_below.max(r.gap_above) / r.delta)
        .fold(0.0, f64::max);
    Ok(ContinuityReport {
        theta0,
        lambda0,
        rows,
        modulus,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub fraction: f64,
    pub lambda: f64,
    pub bound_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn checks(&self) -> Vec<Check> {
        let m: Vec<f64> = self.rows.iter().map(|r| r.bound_m).collect();
        vec![
            Check::new(
                "below_bound_m",
                self.rows
                    .iter()
                    .all(|r| r.lambda <= r.bound_m * (1.0 + BOUND_SLACK)),
                format!("{:?}", self.rows.iter().map(|r| (r.lambda, r.bound_m)).collect::<Vec<_>>()),
            ),
            Check::new("m_decreasing", m.windows(2).all(|w| w[1] < w[0]), format!("{m:?}")),
            Check::new("positive", self.rows.iter().all(|r| r.lambda > 0.0), String::new()),
        ]
    }

    pub fn pass(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }
}

/// Growth rate near the threshold, certified by the bound `m`.
pub fn limit_check(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<LimitReport> {
    let s = sweep_theta(cfg, &LIMIT_FRACTIONS, disc, tol)?;
    Ok(LimitReport {
        rows: s
            .points
            .iter()
            .map(|p| LimitRow {
                fraction: p.fraction,
                lambda: p.lambda,
                bound_m: p.bound_m,
            })
            .collect(),
    })
}

/// True for each fraction at which the solver reports a stable regime.
pub fn threshold_check(
    cfg: &FluidConfig,
    fractions: &[f64],
    disc: Discretization,
    tol: f64,
) -> Result<Vec<(f64, bool)>> {
    let cfg = validate_config(*cfg)?;
    let theta_c = theta_critical(&cfg);
    fractions
        .iter()
        .map(|&f| match solve_lambda(&cfg.with_theta(f * theta_c), disc, tol) {
            Err(Error::StableRegime { .. }) => Ok((f, true)),
            Err(e) if !e.is_numerical() => Err(e),
            _ => Ok((f, false)),
        })
        .collect()
}

/// Sweep plus its checks, as written next to the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub pass: bool,
    pub theta_c: f64,
    pub bound_m_at_zero: f64,
    pub lower_layer_bound: f64,
    pub k_max: f64,
    pub resolution: usize,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn new(sweep: &ThetaSweep, cfg: &FluidConfig) -> Result<Self> {
        let checks = sweep.checks();
        Ok(SweepReport {
            pass: checks.iter().all(|c| c.pass),
            theta_c: sweep.theta_c,
            bound_m_at_zero: upper_bound_m(&cfg.with_theta(0.0))?,
            lower_layer_bound: sweep.lower_layer_bound,
            k_max: sweep.k_max,
            resolution: sweep.resolution,
            checks,
        })
    }
}

/// CSV with columns `theta, theta_over_theta_c, lambda, bound_m, argmax_k, residual`.
pub fn write_sweep_csv<W: std::io::Write>(sweep: &ThetaSweep, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "theta",
        "theta_over_theta_c",
        "lambda",
        "bound_m",
        "argmax_k",
        "residual",
    ])
    .map_err(io)?;
    for p in &sweep.points {
        w.write_record([
            fmt_num(p.theta),
            fmt_num(p.fraction),
            fmt_num(p.lambda),
            fmt_num(p.bound_m),
            fmt_num(p.argmax_k),
            fmt_num(p.residual),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}
