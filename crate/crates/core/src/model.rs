//! Physical parameters of the two-layer problem and the closed-form
//! quantities that follow directly from them: the critical surface tension
//! and the growth-rate upper bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of two horizontally periodic viscous layers.
///
/// The heavier fluid (`rho_plus`) occupies `0 < y3 < h_plus`, the lighter one
/// `-h_minus < y3 < 0`. Horizontal periods are `2 pi L1` and `2 pi L2`.
/// All quantities are dimensional in whatever consistent unit system the caller uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidConfig {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub g: f64,
    pub theta: f64,
    #[serde(rename = "L1", alias = "l1")]
    pub l1: f64,
    #[serde(rename = "L2", alias = "l2")]
    pub l2: f64,
    pub h_plus: f64,
    pub h_minus: f64,
}

impl FluidConfig {
    /// `rho_plus = 2, rho_minus = 1, mu = 0.1, g = 9.8, L1 = L2 = 1, h = 1, theta = 0`.
    pub fn reference() -> Self {
        FluidConfig {
            rho_plus: 2.0,
            rho_minus: 1.0,
            mu_plus: 0.1,
            mu_minus: 0.1,
            g: 9.8,
            theta: 0.0,
            l1: 1.0,
            l2: 1.0,
            h_plus: 1.0,
            h_minus: 1.0,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Density jump across the interface, upper minus lower.
    pub fn density_jump(&self) -> f64 {
        self.rho_plus - self.rho_minus
    }

    pub fn max_period_sq(&self) -> f64 {
        (self.l1 * self.l1).max(self.l2 * self.l2)
    }

    pub fn total_height(&self) -> f64 {
        self.h_plus + self.h_minus
    }

    pub fn validate(self) -> Result<Self> {
        validate_config(self)
    }
}

/// Parses a flat JSON object and validates it. Unknown, missing or
/// mistyped fields are reported by name.
pub fn config_from_json(text: &str) -> Result<FluidConfig> {
    let raw: FluidConfig = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("malformed config: {e}")))?;
    validate_config(raw)
}

/// Checks every invariant of [`FluidConfig`] with exact comparisons.
pub fn validate_config(raw: FluidConfig) -> Result<FluidConfig> {
    let positive = [
        ("rho_plus", raw.rho_plus),
        ("rho_minus", raw.rho_minus),
        ("mu_plus", raw.mu_plus),
        ("mu_minus", raw.mu_minus),
        ("g", raw.g),
        ("L1", raw.l1),
        ("L2", raw.l2),
        ("h_plus", raw.h_plus),
        ("h_minus", raw.h_minus),
    ];
    for (name, value) in positive {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveParameter(name));
        }
    }
    if raw.theta.is_nan() || raw.theta < 0.0 {
        return Err(Error::NegativeSurfaceTension(raw.theta));
    }
    if !raw.theta.is_finite() {
        return Err(Error::NonPositiveParameter("theta"));
    }
    if raw.rho_plus <= raw.rho_minus {
        return Err(Error::DensityOrderViolation {
            rho_plus: raw.rho_plus,
            rho_minus: raw.rho_minus,
        });
    }
    Ok(raw)
}

/// `theta_c = g [rho] max(L1^2, L2^2)`; instability requires `theta < theta_c`.
pub fn theta_critical(cfg: &FluidConfig) -> f64 {
    cfg.g * cfg.density_jump() * cfg.max_period_sq()
}

/// Fails with [`Error::StableRegime`] unless `theta < theta_c`.
pub fn ensure_unstable(cfg: &FluidConfig) -> Result<f64> {
    let theta_c = theta_critical(cfg);
    if cfg.theta >= theta_c {
        return Err(Error::StableRegime {
            theta: cfg.theta,
            theta_c,
        });
    }
    Ok(theta_c)
}

/// The two branches of the growth-rate bound, kept separate for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBranches {
    /// `(theta_c - theta) / (4 max L^2) * min(h+/mu+, h-/mu-)`.
    pub viscous: f64,
    /// `(4 (g [rho] (theta_c - theta))^2 / (theta_c^2 max(rho+ mu+, rho- mu-)))^(1/3)`.
    pub cubic: f64,
}

impl BoundBranches {
    pub fn min(&self) -> f64 {
        self.viscous.min(self.cubic)
    }
}

pub fn upper_bound_branches(cfg: &FluidConfig) -> Result<BoundBranches> {
    let theta_c = ensure_unstable(cfg)?;
    let gap = theta_c - cfg.theta;
    let viscous = gap / (4.0 * cfg.max_period_sq())
        * (cfg.h_plus / cfg.mu_plus).min(cfg.h_minus / cfg.mu_minus);
    let drive = cfg.g * cfg.density_jump() * gap;
    let rho_mu = (cfg.rho_plus * cfg.mu_plus).max(cfg.rho_minus * cfg.mu_minus);
    let cubic = (4.0 * drive * drive / (theta_c * theta_c * rho_mu)).cbrt();
    Ok(BoundBranches { viscous, cubic })
}

/// Upper bound `m` on the largest growth rate.
pub fn upper_bound_m(cfg: &FluidConfig) -> Result<f64> {
    Ok(upper_bound_branches(cfg)?.min())
}

/// The older bound `h- g [rho] / (4 mu-)`, stated for `h+ = 1`.
pub fn lower_layer_bound(cfg: &FluidConfig) -> f64 {
    cfg.h_minus * cfg.g * cfg.density_jump() / (4.0 * cfg.mu_minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub theta_c: f64,
    pub m: f64,
    pub lower_layer_bound: f64,
}

impl Thresholds {
    pub fn of(cfg: &FluidConfig) -> Result<Self> {
        Ok(Thresholds {
            theta_c: theta_critical(cfg),
            m: upper_bound_m(cfg)?,
            lower_layer_bound: lower_layer_bound(cfg),
        })
    }
}

/// A horizontal lattice wave vector `xi = (n1/L1, n2/L2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    pub n1: i64,
    pub n2: i64,
    xi: (f64, f64),
    k_sq: f64,
}

impl ModeIndex {
    pub fn new(n1: i64, n2: i64, cfg: &FluidConfig) -> Result<Self> {
        if n1 == 0 && n2 == 0 {
            return Err(Error::ZeroWaveNumber);
        }
        let xi = (n1 as f64 / cfg.l1, n2 as f64 / cfg.l2);
        Ok(ModeIndex {
            n1,
            n2,
            xi,
            k_sq: xi.0 * xi.0 + xi.1 * xi.1,
        })
    }

    pub fn xi(&self) -> (f64, f64) {
        self.xi
    }

    pub fn k_sq(&self) -> f64 {
        self.k_sq
    }

    pub fn k(&self) -> f64 {
        self.k_sq.sqrt()
    }
}
