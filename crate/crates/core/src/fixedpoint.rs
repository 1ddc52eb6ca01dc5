//! The growth rate as the fixed point `Lambda^2 = alpha(Lambda)`.
//!
//! `f(s) = alpha(s) - s^2` is strictly decreasing, positive near zero and
//! negative beyond the growth-rate bound, so bisection on its sign converges
//! to the unique root. Strict decrease is re-checked on every probe.

use serde::Serialize;

use crate::banded::dot;
use crate::error::{Error, Result};
use crate::model::{ensure_unstable, upper_bound_m, validate_config, FluidConfig};
use crate::modeforms::VerticalProfile;
use crate::pencil::{assemble_sq, largest_eigenpair, Discretization, EigenSolution};
use crate::spectrum::{
    alpha_exceeds, alpha_on_modes, with_certified_modes, AlphaValue, Branch, CutoffPolicy,
    ModeSet,
};

pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_EXPANSIONS: usize = 60;
const MAX_BISECTIONS: usize = 200;

/// One evaluation of `alpha`. `exact = false` marks a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub alpha: f64,
    pub exact: bool,
}

impl Probe {
    pub fn exact(alpha: f64) -> Self {
        Probe { alpha, exact: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFixedPoint {
    pub lambda: f64,
    pub alpha_at_lambda: f64,
    pub residual: f64,
    pub history: Vec<(f64, f64)>,
}

/// Fixed point of a scalar `alpha(s)` given the bound `m >= Lambda`.
pub fn solve_fixed_point(
    mut alpha: impl FnMut(f64) -> Result<f64>,
    m: f64,
    tol: f64,
) -> Result<ScalarFixedPoint> {
    bracket_and_bisect(|s, _| alpha(s).map(Probe::exact), m, tol)
}

/// Core solver. The second argument of `eval` is true when a lower bound on
/// `alpha(s)` that merely exceeds `s^2` is enough.
pub fn bracket_and_bisect(
    mut eval: impl FnMut(f64, bool) -> Result<Probe>,
    m: f64,
    tol: f64,
) -> Result<ScalarFixedPoint> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!("bound must be positive, got {m}")));
    }

    let mut lo = m.min(1.0) / 16.0;
    let mut f_lo;
    let mut tries = 0;
    loop {
        let p = eval(lo, true)?;
        f_lo = p.alpha - lo * lo;
        if f_lo > 0.0 {
            break;
        }
        tries += 1;
        if tries > MAX_EXPANSIONS {
            return Err(Error::BracketFailureLow { s: lo });
        }
        lo *= 0.5;
    }

    let mut hi = 1.01 * m;
    let mut f_hi;
    tries = 0;
    loop {
        let p = eval(hi, false)?;
        f_hi = p.alpha - hi * hi;
        if f_hi < 0.0 {
            break;
        }
        tries += 1;
        if tries > MAX_EXPANSIONS {
            return Err(Error::BracketFailureHigh { s: hi });
        }
        hi *= 2.0;
    }

    let mut history = vec![(lo, hi)];
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let a = eval(mid, false)?.alpha;
        let f_mid = a - mid * mid;
        if !(f_lo > f_mid && f_mid > f_hi) {
            return Err(Error::MonotonicityViolation(format!(
                "f({lo}) = {f_lo}, f({mid}) = {f_mid}, f({hi}) = {f_hi}"
            )));
        }
        let residual = f_mid.abs();
        if f_mid == 0.0 || (hi - lo <= tol && residual <= tol * mid.powi(2).max(1.0)) {
            return Ok(ScalarFixedPoint {
                lambda: mid,
                alpha_at_lambda: a,
                residual,
                history,
            });
        }
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        history.push((lo, hi));
    }
    Err(Error::NoConvergence {
        iterations: history.len(),
    })
}

#[derive(Debug, Clone)]
pub struct GrowthResult {
    pub lambda: f64,
    pub argmax_k: f64,
    pub eigen: EigenSolution,
    pub fixed_point_residual: f64,
    pub bracket_history: Vec<(f64, f64)>,
    pub alpha_at_lambda: AlphaValue,
    pub bound_m: f64,
    pub theta: f64,
    pub resolution: usize,
    pub k_max: f64,
}

/// JSON form of [`GrowthResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSummary {
    pub lambda: f64,
    pub argmax_k: f64,
    pub fixed_point_residual: f64,
    pub bound_m: f64,
    pub theta: f64,
    pub resolution: usize,
    pub bracket_steps: usize,
    pub branch: Branch,
}

impl GrowthResult {
    pub fn branch(&self) -> Branch {
        self.alpha_at_lambda.branch
    }

    pub fn discretization(&self) -> Discretization {
        Discretization {
            elements_per_layer: self.resolution,
        }
    }

    pub fn profile(&self, cfg: &FluidConfig) -> VerticalProfile {
        self.discretization().profile_from_vector(&self.eigen.vector, cfg)
    }

    /// `psi(0) != 0` and `psi'` not identically zero.
    pub fn nonvacuous(&self, cfg: &FluidConfig) -> bool {
        let p = self.profile(cfg);
        p.interface_value() != 0.0 && p.psi_derivs().iter().any(|d| *d != 0.0)
    }

    pub fn summary(&self) -> GrowthSummary {
        GrowthSummary {
            lambda: self.lambda,
            argmax_k: self.argmax_k,
            fixed_point_residual: self.fixed_point_residual,
            bound_m: self.bound_m,
            theta: self.theta,
            resolution: self.resolution,
            bracket_steps: self.bracket_history.len(),
            branch: self.branch(),
        }
    }
}

pub fn solve_lambda(cfg: &FluidConfig, disc: Discretization, tol: f64) -> Result<GrowthResult> {
    solve_lambda_with(cfg, disc, tol, CutoffPolicy::default())
}

pub fn solve_lambda_with(
    cfg: &FluidConfig,
    disc: Discretization,
    tol: f64,
    policy: CutoffPolicy,
) -> Result<GrowthResult> {
    let cfg = validate_config(*cfg)?;
    ensure_unstable(&cfg)?;
    let disc = Discretization::new(disc.elements_per_layer)?;
    with_certified_modes(&cfg, policy, |modes| {
        let r = solve_on_modes(&cfg, disc, tol, modes)?;
        let ok = r.alpha_at_lambda.cutoff_certified;
        Ok((r, ok))
    })
}

/// [`solve_lambda`] with the mode set frozen by the caller.
pub fn solve_on_modes(
    cfg: &FluidConfig,
    disc: Discretization,
    tol: f64,
    modes: &ModeSet,
) -> Result<GrowthResult> {
    ensure_unstable(cfg)?;
    let m = upper_bound_m(cfg)?;
    let mut last: Option<AlphaValue> = None;
    let sol = bracket_and_bisect(
        |s, lower_ok| {
            let v = if lower_ok {
                alpha_exceeds(cfg, s, disc, modes, s * s)?
            } else {
                alpha_on_modes(cfg, s, disc, modes)?
            };
            let p = Probe {
                alpha: v.alpha,
                exact: v.complete,
            };
            last = Some(v);
            Ok(p)
        },
        m,
        tol,
    )?;
    let at = last.expect("the final probe is at lambda");
    debug_assert_eq!(at.s, sol.lambda);
    Ok(GrowthResult {
        lambda: sol.lambda,
        argmax_k: at.argmax_k,
        eigen: at.eigen.clone(),
        fixed_point_residual: sol.residual,
        bracket_history: sol.history,
        bound_m: m,
        theta: cfg.theta,
        resolution: disc.elements_per_layer,
        k_max: modes.k_max(),
        alpha_at_lambda: at,
    })
}

/// Fixed point of a single mode, `Lambda_k^2 = alpha_k(Lambda_k)`.
#[derive(Debug, Clone)]
pub struct ModeGrowth {
    pub k_sq: f64,
    pub lambda: f64,
    pub residual: f64,
    pub eigen: EigenSolution,
    pub resolution: usize,
}

impl ModeGrowth {
    pub fn k(&self) -> f64 {
        self.k_sq.sqrt()
    }
}

/// `None` when `c_k <= 0`, where the mode cannot grow.
pub fn mode_lambda(
    k_sq: f64,
    cfg: &FluidConfig,
    disc: Discretization,
    tol: f64,
) -> Result<Option<ModeGrowth>> {
    let forms = assemble_sq(k_sq, cfg, disc)?;
    if forms.c_k <= 0.0 {
        return Ok(None);
    }
    // alpha_k(s) <= c k / (2 rho_min) for every s
    let m = (0.5 * forms.c_k * forms.k / cfg.rho_plus.min(cfg.rho_minus)).sqrt();
    let mut last = None;
    let sol = solve_fixed_point(
        |s| {
            let e = largest_eigenpair(&forms, s)?;
            let a = e.alpha;
            last = Some(e);
            Ok(a)
        },
        m,
        tol,
    )?;
    Ok(Some(ModeGrowth {
        k_sq,
        lambda: sol.lambda,
        residual: sol.residual,
        eigen: last.expect("final probe"),
        resolution: disc.elements_per_layer,
    }))
}

/// Richardson extrapolation of a quantity converging like `h^order`
/// from resolutions `N` and `2N`.
pub fn richardson(coarse: f64, fine: f64, order: i32) -> f64 {
    let r = 2f64.powi(order);
    fine + (fine - coarse) / (r - 1.0)
}

/// Weak residual of a profile in the pencil equation at `(k_sq, s, alpha)`.
///
/// The vector is prolonged exactly onto a mesh `refine` times finer and
/// `P x = (c_k e0 e0^T - s A - alpha B) x` is tested against the fine basis.
/// Norms are dual to the energy `s A + |alpha| B`. The result is the
/// normwise backward error `||P x|| / (||C x|| + s ||A x|| + |alpha| ||B x||)`.
/// At a growth rate `s = Lambda` and `alpha = Lambda^2`.
pub fn bvp_residual_at(
    k_sq: f64,
    s: f64,
    alpha: f64,
    vector: &[f64],
    disc: Discretization,
    cfg: &FluidConfig,
    refine: usize,
) -> Result<f64> {
    let fine = Discretization::new(disc.elements_per_layer * refine.max(1))?;
    let x = if refine <= 1 {
        vector.to_vec()
    } else {
        let profile = disc.profile_from_vector(vector, cfg);
        fine.vector_from_profile(&profile, cfg)
    };
    let forms = assemble_sq(k_sq, cfg, fine)?;
    let energy = forms.dissipation.combine(s, &forms.kinetic, alpha.abs());
    let chol = energy
        .cholesky()
        .ok_or(Error::FactorizationFailure("energy matrix"))?;
    let dual = |v: &[f64]| dot(v, &chol.solve(v)).max(0.0).sqrt();

    let ax: Vec<f64> = forms.dissipation.matvec(&x).iter().map(|v| s * v).collect();
    let bx: Vec<f64> = forms.kinetic.matvec(&x).iter().map(|v| alpha * v).collect();
    let mut cx = vec![0.0; x.len()];
    cx[forms.e0_index] = forms.c_k * x[forms.e0_index];
    let r: Vec<f64> = (0..x.len()).map(|i| cx[i] - ax[i] - bx[i]).collect();
    let scale = dual(&cx) + dual(&ax) + dual(&bx);
    Ok(dual(&r) / scale)
}

/// [`bvp_residual_at`] for a solved growth rate, tested on the doubled mesh.
pub fn bvp_residual(result: &GrowthResult, cfg: &FluidConfig) -> Result<f64> {
    bvp_residual_at(
        result.alpha_at_lambda.argmax_k_sq,
        result.lambda,
        result.lambda * result.lambda,
        &result.eigen.vector,
        result.discretization(),
        cfg,
        2,
    )
}

pub fn write_growth_json<W: std::io::Write>(result: &GrowthResult, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, &result.summary())
        .map_err(|e| Error::InvalidArgument(format!("json output: {e}")))
}
