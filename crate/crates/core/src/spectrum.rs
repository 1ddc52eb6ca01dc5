//! The global supremum `alpha(s)` over all horizontal lattice modes.
//!
//! Every form depends on the wave vector only through `k = |xi|`, so the
//! search runs over distinct lattice magnitudes. Modes are visited in order of
//! a closed-form upper bound on their value and the scan stops once the bound
//! falls below the best value found. Chunks have a fixed size, so the set of
//! evaluated modes, and hence the result, does not depend on the thread count.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate_config, FluidConfig};
use crate::modeforms::surface_coefficient_sq;
use crate::pencil::{
    assemble_sq, largest_eigenpair, transverse_lambda_min, Discretization, EigenSolution,
    PencilForms,
};

/// Relative tolerance for merging equal lattice magnitudes.
const DEDUP_RTOL: f64 = 1e-12;
/// Modes evaluated per parallel batch.
const CHUNK: usize = 16;
/// Escalation stops with an error beyond this multiple of the smallest magnitude.
const RUNAWAY_FACTOR: f64 = 1e6;
/// Largest number of quarter-lattice points enumerated.
const MAX_LATTICE_POINTS: u64 = 40_000_000;
/// Heuristic constant of the viscous cutoff.
const VISCOUS_CUTOFF_C: f64 = 2.0;
/// Number of largest magnitudes inspected by the tail certificate.
const TAIL_MODES: usize = 3;

/// Distinct lattice magnitudes `|(n1/L1, n2/L2)|` in `(0, k_max]`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    k_max: f64,
    k_sq: Vec<f64>,
    multiplicity: Vec<usize>,
}

impl ModeSet {
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.k_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_sq.is_empty()
    }

    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.k_sq.iter().map(|v| v.sqrt()).collect()
    }

    /// Number of full-lattice wave vectors sharing each magnitude.
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }
}

pub fn smallest_magnitude(cfg: &FluidConfig) -> f64 {
    (1.0 / cfg.l1).min(1.0 / cfg.l2)
}

pub fn enumerate_modes(cfg: &FluidConfig, k_max: f64) -> Result<ModeSet> {
    let k_min = smallest_magnitude(cfg);
    if !(k_max >= k_min) {
        return Err(Error::EmptyModeSet { k_max, k_min });
    }
    let n1_max = (k_max * cfg.l1).floor() as u64;
    let n2_max = (k_max * cfg.l2).floor() as u64;
    if (n1_max + 1).saturating_mul(n2_max + 1) > MAX_LATTICE_POINTS {
        return Err(Error::CutoffRunaway {
            k_max,
            limit: RUNAWAY_FACTOR * k_min,
        });
    }
    let bound = k_max * k_max;
    let mut pts: Vec<(f64, usize)> = Vec::new();
    for n1 in 0..=n1_max {
        let a = n1 as f64 / cfg.l1;
        for n2 in 0..=n2_max {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            let b = n2 as f64 / cfg.l2;
            let k_sq = a * a + b * b;
            if k_sq <= bound {
                let mult = if n1 > 0 && n2 > 0 { 4 } else { 2 };
                pts.push((k_sq, mult));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut k_sq: Vec<f64> = Vec::new();
    let mut multiplicity: Vec<usize> = Vec::new();
    for (v, m) in pts {
        match k_sq.last() {
            Some(&last) if (v - last).abs() <= DEDUP_RTOL * v => {
                *multiplicity.last_mut().unwrap() += m;
            }
            _ => {
                k_sq.push(v);
                multiplicity.push(m);
            }
        }
    }
    Ok(ModeSet {
        k_max,
        k_sq,
        multiplicity,
    })
}

/// Starting cutoff: the capillary wavenumber, a viscous damping scale, or the
/// smallest lattice magnitude, whichever is largest.
pub fn initial_cutoff(cfg: &FluidConfig) -> f64 {
    let drive = cfg.g * cfg.density_jump();
    let capillary = if cfg.theta > 0.0 {
        (drive / cfg.theta).sqrt()
    } else {
        0.0
    };
    let viscous = VISCOUS_CUTOFF_C * (drive * cfg.rho_plus.max(cfg.rho_minus) * cfg.h_plus.max(cfg.h_minus)).sqrt()
        / cfg.mu_plus.min(cfg.mu_minus);
    capillary.max(viscous).max(smallest_magnitude(cfg))
}

/// Closed-form bound `B(k, s)` with `alpha_k(s) <= B` for both branches.
///
/// Combines `psi(0)^2 <= sqrt(int psi^2 int psi'^2)`, the lower bound
/// `D >= mu_min (2 int psi'^2 + k^2 int psi^2)` and the two-sided kinetic
/// bounds, then maximizes the resulting 2x2 quadratic form. When positive it
/// is further capped by [`whole_line_bound`].
pub fn mode_upper_bound(k_sq: f64, s: f64, cfg: &FluidConfig) -> f64 {
    let c = surface_coefficient_sq(k_sq, cfg).max(0.0);
    let mu = cfg.mu_plus.min(cfg.mu_minus);
    let smk = s * mu * k_sq;
    let lambda = -1.5 * smk + (0.25 * smk * smk + 0.25 * c * c * k_sq).sqrt();
    if lambda >= 0.0 {
        let rho = cfg.rho_plus.min(cfg.rho_minus);
        (lambda / rho).min(whole_line_bound(k_sq.sqrt(), s, c, mu, rho))
    } else {
        lambda / cfg.rho_plus.max(cfg.rho_minus)
    }
}

/// Supremum of the quotient for one homogeneous fluid filling the whole line.
///
/// Zero extension embeds every clamped profile, and lowering `mu` and `rho`
/// only raises a positive quotient, so this bounds `alpha_k(s)` from above
/// whenever the latter is positive. In Fourier variables the supremum is the
/// positive root of `alpha = (c k / 2 rho) (1 - k / q)`,
/// `q^2 = k^2 + alpha rho / (s mu)`, or zero when `c <= 4 s mu k`.
pub fn whole_line_bound(k: f64, s: f64, c: f64, mu: f64, rho: f64) -> f64 {
    if c <= 4.0 * s * mu * k {
        return 0.0;
    }
    let amp = 0.5 * c * k / rho;
    let g = |a: f64| amp * (1.0 - k / (k * k + a * rho / (s * mu)).sqrt()) - a;
    let (mut lo, mut hi) = (0.0, amp);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi * (1.0 + 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Longitudinal,
    Transverse,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Longitudinal => "longitudinal",
            Branch::Transverse => "transverse",
        }
    }
}

/// Both branch values for one magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeEvaluation {
    pub k_sq: f64,
    pub multiplicity: usize,
    pub longitudinal: f64,
    /// Skipped (`None`) when the longitudinal value is positive and therefore dominant.
    pub transverse: Option<f64>,
    /// `-d alpha_k / ds` at the maximizer of the winning branch.
    pub slope: f64,
}

impl ModeEvaluation {
    pub fn k(&self) -> f64 {
        self.k_sq.sqrt()
    }

    pub fn branch(&self) -> Branch {
        if self.transverse.map_or(true, |t| self.longitudinal >= t) {
            Branch::Longitudinal
        } else {
            Branch::Transverse
        }
    }

    pub fn alpha(&self) -> f64 {
        self.transverse.map_or(self.longitudinal, |t| self.longitudinal.max(t))
    }
}

/// Solves one mode. The transverse branch is always negative, so with
/// `always_transverse` unset it is skipped whenever the longitudinal value is positive.
pub fn evaluate_mode(
    k_sq: f64,
    multiplicity: usize,
    cfg: &FluidConfig,
    disc: Discretization,
    s: f64,
    always_transverse: bool,
) -> Result<(ModeEvaluation, EigenSolution, PencilForms)> {
    let forms = assemble_sq(k_sq, cfg, disc)?;
    let eig = largest_eigenpair(&forms, s)?;
    let lambda_min = if always_transverse || eig.alpha <= 0.0 {
        Some(transverse_lambda_min(k_sq, cfg, disc)?)
    } else {
        None
    };
    let transverse = lambda_min.map(|l| -s * l);
    let slope = match lambda_min {
        Some(l) if -s * l > eig.alpha => l,
        _ => eig.dissipation(&forms),
    };
    let eval = ModeEvaluation {
        k_sq,
        multiplicity,
        longitudinal: eig.alpha,
        transverse,
        slope,
    };
    Ok((eval, eig, forms))
}

/// `alpha(s)` over a frozen [`ModeSet`].
#[derive(Debug, Clone)]
pub struct AlphaValue {
    pub s: f64,
    pub alpha: f64,
    pub argmax_k: f64,
    pub argmax_k_sq: f64,
    pub branch: Branch,
    /// Longitudinal maximizer at `argmax_k`, `B`-normalized.
    pub eigen: EigenSolution,
    /// Evaluated modes in ascending `k`; pruned modes are absent.
    pub table: Vec<ModeEvaluation>,
    pub pruned: usize,
    pub k_max: f64,
    /// Whether the maximizer is interior and the largest magnitudes are dominated.
    pub cutoff_certified: bool,
    /// False when the scan stopped early, making `alpha` only a lower bound.
    pub complete: bool,
}

impl AlphaValue {
    pub fn slope(&self) -> f64 {
        self.table
            .iter()
            .find(|m| m.k_sq == self.argmax_k_sq)
            .map_or(0.0, |m| m.slope)
    }
}

fn better(a: &ModeEvaluation, b: &ModeEvaluation) -> bool {
    let (x, y) = (a.alpha(), b.alpha());
    x > y || (x == y && a.k_sq < b.k_sq)
}

fn tail_threshold(alpha: f64) -> f64 {
    alpha - 0.5 * alpha.abs()
}

/// Evaluates `alpha(s)` on `modes`, pruning by [`mode_upper_bound`].
pub fn alpha_on_modes(
    cfg: &FluidConfig,
    s: f64,
    disc: Discretization,
    modes: &ModeSet,
) -> Result<AlphaValue> {
    scan(cfg, s, disc, modes, None)
}

/// A lower bound on `alpha(s)` that stops as soon as some mode exceeds `target`.
/// Equals [`alpha_on_modes`] when no mode does.
pub fn alpha_exceeds(
    cfg: &FluidConfig,
    s: f64,
    disc: Discretization,
    modes: &ModeSet,
    target: f64,
) -> Result<AlphaValue> {
    scan(cfg, s, disc, modes, Some(target))
}

fn scan(
    cfg: &FluidConfig,
    s: f64,
    disc: Discretization,
    modes: &ModeSet,
    stop_above: Option<f64>,
) -> Result<AlphaValue> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet {
            k_max: modes.k_max,
            k_min: smallest_magnitude(cfg),
        });
    }
    let mut order: Vec<(usize, f64)> = modes
        .k_sq
        .iter()
        .enumerate()
        .map(|(i, &k_sq)| (i, mode_upper_bound(k_sq, s, cfg)))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut evaluated: Vec<(usize, ModeEvaluation, EigenSolution)> = Vec::new();
    let mut best: Option<usize> = None;
    let mut cursor = 0;
    let run = |idx: &[(usize, f64)]| -> Result<Vec<(usize, ModeEvaluation, EigenSolution)>> {
        idx.par_iter()
            .map(|&(i, _)| {
                evaluate_mode(modes.k_sq[i], modes.multiplicity[i], cfg, disc, s, false)
                    .map(|(e, v, _)| (i, e, v))
            })
            .collect()
    };
    let mut complete = true;
    while cursor < order.len() {
        if let Some(b) = best {
            let a = evaluated[b].1.alpha();
            if order[cursor].1 < a {
                break;
            }
            if stop_above.is_some_and(|t| a > t) {
                complete = false;
                break;
            }
        }
        let end = (cursor + CHUNK).min(order.len());
        for item in run(&order[cursor..end])? {
            evaluated.push(item);
            let last = evaluated.len() - 1;
            if best.map_or(true, |b| better(&evaluated[last].1, &evaluated[b].1)) {
                best = Some(last);
            }
        }
        cursor = end;
    }
    let pruned = order.len() - evaluated.len();
    let b = best.expect("at least one mode evaluated");
    let alpha = evaluated[b].1.alpha();

    // Tail certificate: evaluate the largest magnitudes only if their bound is not enough.
    let n = modes.len();
    let threshold = tail_threshold(alpha);
    let mut tail_ok = complete;
    let mut extra = Vec::new();
    for i in (n.saturating_sub(TAIL_MODES)..n).filter(|_| complete) {
        if mode_upper_bound(modes.k_sq[i], s, cfg) <= threshold {
            continue;
        }
        match evaluated.iter().find(|(j, _, _)| *j == i) {
            Some((_, e, _)) => tail_ok &= e.alpha() <= threshold,
            None => extra.push(i),
        }
    }
    let extra_evals: Vec<ModeEvaluation> = extra
        .par_iter()
        .map(|&i| evaluate_mode(modes.k_sq[i], modes.multiplicity[i], cfg, disc, s, false).map(|r| r.0))
        .collect::<Result<_>>()?;
    tail_ok &= extra_evals.iter().all(|e| e.alpha() <= threshold);

    let (_, winner, eigen) = evaluated[b].clone();
    let interior = winner.k() < 0.5 * modes.k_max;
    let mut table: Vec<ModeEvaluation> = evaluated.into_iter().map(|(_, e, _)| e).collect();
    table.sort_by(|a, b| a.k_sq.total_cmp(&b.k_sq));
    Ok(AlphaValue {
        s,
        alpha,
        argmax_k: winner.k(),
        argmax_k_sq: winner.k_sq,
        branch: winner.branch(),
        eigen,
        table,
        pruned,
        k_max: modes.k_max,
        cutoff_certified: interior && tail_ok,
        complete,
    })
}

/// How the mode cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// Start at `initial` (or the heuristic) and double until certified.
    Adaptive { initial: Option<f64> },
    /// Use exactly this cutoff; the certificate is reported but not enforced.
    Fixed(f64),
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Adaptive { initial: None }
    }
}

impl CutoffPolicy {
    pub fn start(&self, cfg: &FluidConfig) -> f64 {
        match *self {
            CutoffPolicy::Adaptive { initial } => initial.unwrap_or_else(|| initial_cutoff(cfg)),
            CutoffPolicy::Fixed(k) => k,
        }
    }

    /// Next cutoff after a failed certificate, or `None` when the policy is fixed.
    pub fn escalate(&self, cfg: &FluidConfig, k_max: f64) -> Result<Option<f64>> {
        match self {
            CutoffPolicy::Fixed(_) => Ok(None),
            CutoffPolicy::Adaptive { .. } => {
                let next = 2.0 * k_max;
                let limit = RUNAWAY_FACTOR * smallest_magnitude(cfg);
                if next > limit {
                    return Err(Error::CutoffRunaway { k_max: next, limit });
                }
                Ok(Some(next))
            }
        }
    }
}

/// Runs `f` on successively larger frozen mode sets until it reports a certified cutoff.
pub fn with_certified_modes<T>(
    cfg: &FluidConfig,
    policy: CutoffPolicy,
    mut f: impl FnMut(&ModeSet) -> Result<(T, bool)>,
) -> Result<T> {
    let mut k_max = policy.start(cfg);
    loop {
        let modes = enumerate_modes(cfg, k_max)?;
        let (value, certified) = f(&modes)?;
        if certified {
            return Ok(value);
        }
        match policy.escalate(cfg, k_max)? {
            Some(next) => k_max = next,
            None => return Ok(value),
        }
    }
}

pub fn global_alpha(cfg: &FluidConfig, s: f64, disc: Discretization) -> Result<AlphaValue> {
    global_alpha_with(cfg, s, disc, CutoffPolicy::default())
}

pub fn global_alpha_with(
    cfg: &FluidConfig,
    s: f64,
    disc: Discretization,
    policy: CutoffPolicy,
) -> Result<AlphaValue> {
    let cfg = validate_config(*cfg)?;
    with_certified_modes(&cfg, policy, |modes| {
        let v = alpha_on_modes(&cfg, s, disc, modes)?;
        let ok = v.cutoff_certified;
        Ok((v, ok))
    })
}

/// Every mode of `modes` at `s`, without pruning.
pub fn mode_table(
    cfg: &FluidConfig,
    s: f64,
    disc: Discretization,
    modes: &ModeSet,
) -> Result<Vec<ModeEvaluation>> {
    modes
        .k_sq
        .par_iter()
        .zip(modes.multiplicity.par_iter())
        .map(|(&k_sq, &m)| evaluate_mode(k_sq, m, cfg, disc, s, true).map(|r| r.0))
        .collect()
}

#[derive(Debug, Clone)]
pub struct AlphaCurve {
    pub samples: Vec<AlphaValue>,
    pub k_max: f64,
    /// Consecutive grid points between which `alpha` changes sign.
    pub zero_bracket: Option<(f64, f64)>,
}

pub fn alpha_curve(cfg: &FluidConfig, s_grid: &[f64], disc: Discretization) -> Result<AlphaCurve> {
    alpha_curve_with(cfg, s_grid, disc, CutoffPolicy::default())
}

pub fn alpha_curve_with(
    cfg: &FluidConfig,
    s_grid: &[f64],
    disc: Discretization,
    policy: CutoffPolicy,
) -> Result<AlphaCurve> {
    let cfg = validate_config(*cfg)?;
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    for w in s_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidArgument("s grid must be strictly increasing".into()));
        }
    }
    if !(s_grid[0] > 0.0) {
        return Err(Error::InvalidArgument("s grid must be positive".into()));
    }
    let samples = with_certified_modes(&cfg, policy, |modes| {
        let mut out = Vec::with_capacity(s_grid.len());
        for &s in s_grid {
            out.push(alpha_on_modes(&cfg, s, disc, modes)?);
        }
        let ok = out.iter().all(|v| v.cutoff_certified);
        Ok((out, ok))
    })?;
    for w in samples.windows(2) {
        if !(w[1].alpha < w[0].alpha) {
            return Err(Error::MonotonicityViolation(format!(
                "alpha({}) = {} is not below alpha({}) = {}",
                w[1].s, w[1].alpha, w[0].s, w[0].alpha
            )));
        }
    }
    let zero_bracket = samples
        .windows(2)
        .find(|w| w[0].alpha > 0.0 && w[1].alpha <= 0.0)
        .map(|w| (w[0].s, w[1].s));
    Ok(AlphaCurve {
        k_max: samples[0].k_max,
        samples,
        zero_bracket,
    })
}

/// Shortest decimal that reads back to the same `f64`, in exponent form
/// outside `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_alpha_curve_csv<W: Write>(curve: &AlphaCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["s", "alpha", "argmax_k", "branch"]).map_err(io)?;
    for v in &curve.samples {
        w.write_record([
            fmt_num(v.s),
            fmt_num(v.alpha),
            fmt_num(v.argmax_k),
            v.branch.as_str().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}

pub fn write_mode_table_csv<W: Write>(table: &[ModeEvaluation], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["k", "alpha_longitudinal", "alpha_transverse", "branch"])
        .map_err(io)?;
    for m in table {
        w.write_record([
            fmt_num(m.k()),
            fmt_num(m.longitudinal),
            m.transverse.map(fmt_num).unwrap_or_default(),
            m.branch().as_str().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}
