//! Per-wavenumber quadratic forms in the vertical velocity profile.
//!
//! For a horizontal wave vector of magnitude `k`, a divergence-free field with
//! vertical amplitude `psi(y3)` has longitudinal horizontal amplitude
//! `-psi'/k`. Its kinetic energy, viscous dissipation and interface energy
//! reduce to one-dimensional integrals over `[-h_minus, h_plus]`:
//!
//! * kinetic `sum rho int (psi'^2/k^2 + psi^2)`
//! * dissipation `sum mu int (4 psi'^2 + (k psi + psi''/k)^2)`
//! * interface `(g [rho] - theta k^2) psi(0)^2`
//!
//! The horizontal component orthogonal to the wave vector (`tau`) decouples
//! from the interface and only contributes `sum mu int (tau'^2 + k^2 tau^2)`
//! against kinetic `sum rho int tau^2`.
//!
//! Profiles are piecewise cubic Hermite on an arbitrary grid; `psi''` is the
//! exact elementwise second derivative and every integral uses five-point
//! Gauss quadrature, which is exact for these integrands.

use crate::error::{Error, Result};
use crate::hermite::{self, GAUSS5};
use crate::model::FluidConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Lower,
    Upper,
}

fn check_grid(grid: &[f64], cfg: &FluidConfig) -> Result<usize> {
    if grid.len() < 3 {
        return Err(Error::InadmissibleProfile("grid needs at least three nodes".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InadmissibleProfile("grid must be strictly increasing".into()));
    }
    let tol = 1e-12 * cfg.total_height();
    if (grid[0] + cfg.h_minus).abs() > tol || (grid[grid.len() - 1] - cfg.h_plus).abs() > tol {
        return Err(Error::InadmissibleProfile(
            "grid must span [-h_minus, h_plus]".into(),
        ));
    }
    grid.iter()
        .position(|&y| y == 0.0)
        .ok_or_else(|| Error::InadmissibleProfile("grid needs a node at the interface".into()))
}

/// Vertical velocity amplitude `psi` as a C^1 piecewise cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalProfile {
    grid: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    interface: usize,
}

impl VerticalProfile {
    /// Builds a profile from nodal values and slopes, enforcing the clamped walls.
    pub fn new(grid: Vec<f64>, psi: Vec<f64>, dpsi: Vec<f64>, cfg: &FluidConfig) -> Result<Self> {
        let interface = check_grid(&grid, cfg)?;
        if psi.len() != grid.len() || dpsi.len() != grid.len() {
            return Err(Error::InadmissibleProfile("nodal arrays differ in length".into()));
        }
        let last = grid.len() - 1;
        let scale = psi.iter().chain(&dpsi).fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for (name, v) in [
            ("psi(-h_minus)", psi[0]),
            ("psi(h_plus)", psi[last]),
            ("psi'(-h_minus)", dpsi[0]),
            ("psi'(h_plus)", dpsi[last]),
        ] {
            if v.abs() > tol || !v.is_finite() {
                return Err(Error::InadmissibleProfile(format!("{name} = {v} must vanish")));
            }
        }
        Ok(VerticalProfile {
            grid,
            psi,
            dpsi,
            interface,
        })
    }

    pub(crate) fn from_parts_unchecked(
        grid: Vec<f64>,
        psi: Vec<f64>,
        dpsi: Vec<f64>,
        interface: usize,
    ) -> Self {
        VerticalProfile {
            grid,
            psi,
            dpsi,
            interface,
        }
    }

    pub fn zero(grid: Vec<f64>, cfg: &FluidConfig) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], vec![0.0; n], cfg)
    }

    /// Samples a smooth function and its derivative at the grid nodes.
    pub fn from_fn(
        grid: Vec<f64>,
        cfg: &FluidConfig,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let psi = grid.iter().map(|&y| f(y)).collect();
        let dpsi = grid.iter().map(|&y| df(y)).collect();
        Self::new(grid, psi, dpsi, cfg)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn psi_values(&self) -> &[f64] {
        &self.psi
    }

    pub fn psi_derivs(&self) -> &[f64] {
        &self.dpsi
    }

    pub fn interface_index(&self) -> usize {
        self.interface
    }

    pub fn num_elements(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn layer_of(&self, element: usize) -> Layer {
        if element < self.interface {
            Layer::Lower
        } else {
            Layer::Upper
        }
    }

    /// `psi(0)`.
    pub fn interface_value(&self) -> f64 {
        self.psi[self.interface]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.psi.iter_mut().for_each(|v| *v *= c);
        out.dpsi.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self + c * other` on the same grid.
    pub fn axpy(&self, c: f64, other: &VerticalProfile) -> Self {
        assert_eq!(self.grid, other.grid, "profiles on different grids");
        let mut out = self.clone();
        for (a, b) in out.psi.iter_mut().zip(&other.psi) {
            *a += c * b;
        }
        for (a, b) in out.dpsi.iter_mut().zip(&other.dpsi) {
            *a += c * b;
        }
        out
    }

    fn element_dofs(&self, e: usize) -> ([f64; 4], f64) {
        (
            [self.psi[e], self.dpsi[e], self.psi[e + 1], self.dpsi[e + 1]],
            self.grid[e + 1] - self.grid[e],
        )
    }

    /// `[psi, psi', psi'', psi''']` at local coordinate `t` of element `e`.
    pub fn element_eval(&self, e: usize, t: f64) -> [f64; 4] {
        let (dofs, h) = self.element_dofs(e);
        hermite::eval(&dofs, t, h)
    }

    /// `[psi, psi', psi'', psi''']` at height `y`; at a node the element below is used.
    pub fn value_at(&self, y: f64) -> [f64; 4] {
        let last = self.num_elements() - 1;
        let e = match self.grid.partition_point(|&g| g < y) {
            0 => 0,
            i => (i - 1).min(last),
        };
        let (dofs, h) = self.element_dofs(e);
        hermite::eval(&dofs, (y - self.grid[e]) / h, h)
    }

    /// Gauss-quadrature integral of `f(psi, psi', psi'')`, split by layer.
    pub fn integrate_layers(&self, f: impl Fn(f64, f64, f64) -> f64) -> LayerSplit {
        let mut out = LayerSplit::default();
        for e in 0..self.num_elements() {
            let (dofs, h) = self.element_dofs(e);
            let s: f64 = GAUSS5
                .iter()
                .map(|&(t, w)| {
                    let v = hermite::eval(&dofs, t, h);
                    w * f(v[0], v[1], v[2])
                })
                .sum::<f64>()
                * h;
            match self.layer_of(e) {
                Layer::Lower => out.lower += s,
                Layer::Upper => out.upper += s,
            }
        }
        out
    }
}

/// A quantity accumulated separately over the two layers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LayerSplit {
    pub lower: f64,
    pub upper: f64,
}

impl LayerSplit {
    pub fn weighted(&self, lower: f64, upper: f64) -> f64 {
        lower * self.lower + upper * self.upper
    }

    pub fn total(&self) -> f64 {
        self.lower + self.upper
    }

    pub fn get(&self, layer: Layer) -> f64 {
        match layer {
            Layer::Lower => self.lower,
            Layer::Upper => self.upper,
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::ZeroWaveNumber)
    }
}

/// Unweighted `int (4 psi'^2 + (k psi + psi''/k)^2)` per layer.
pub fn dissipation_integrand_split(k: f64, psi: &VerticalProfile) -> Result<LayerSplit> {
    check_k(k)?;
    Ok(psi.integrate_layers(|p, dp, ddp| {
        let t = k * p + ddp / k;
        4.0 * dp * dp + t * t
    }))
}

pub fn kinetic_form(k: f64, psi: &VerticalProfile, cfg: &FluidConfig) -> Result<f64> {
    check_k(k)?;
    let k2 = k * k;
    Ok(psi
        .integrate_layers(|p, dp, _| dp * dp / k2 + p * p)
        .weighted(cfg.rho_minus, cfg.rho_plus))
}

/// Per-mode value of half the viscous dissipation `||sqrt(mu) D w||^2 / 2`.
pub fn dissipation_form(k: f64, psi: &VerticalProfile, cfg: &FluidConfig) -> Result<f64> {
    Ok(dissipation_integrand_split(k, psi)?.weighted(cfg.mu_minus, cfg.mu_plus))
}

/// `c_k = g [rho] - theta k^2`, the coefficient of `psi(0)^2` in the driving energy.
pub fn surface_coefficient(k: f64, cfg: &FluidConfig) -> f64 {
    surface_coefficient_sq(k * k, cfg)
}

pub fn surface_coefficient_sq(k_sq: f64, cfg: &FluidConfig) -> f64 {
    cfg.g * cfg.density_jump() - cfg.theta * k_sq
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormEvaluation {
    pub kinetic: f64,
    pub dissipation: f64,
    pub surface: f64,
}

impl FormEvaluation {
    /// `(c_k surface - s dissipation) / kinetic`.
    pub fn rayleigh_quotient(&self, c_k: f64, s: f64) -> f64 {
        (c_k * self.surface - s * self.dissipation) / self.kinetic
    }
}

pub fn evaluate_forms(k: f64, psi: &VerticalProfile, cfg: &FluidConfig) -> Result<FormEvaluation> {
    Ok(FormEvaluation {
        kinetic: kinetic_form(k, psi, cfg)?,
        dissipation: dissipation_form(k, psi, cfg)?,
        surface: psi.interface_value().powi(2),
    })
}

/// Transverse horizontal amplitude `tau`, continuous piecewise cubic whose slope
/// may jump at nodes (only `H^1` regularity is needed).
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseProfile {
    grid: Vec<f64>,
    tau: Vec<f64>,
    /// Slopes at the left and right end of each element.
    slopes: Vec<[f64; 2]>,
    interface: usize,
}

impl TransverseProfile {
    pub fn new(
        grid: Vec<f64>,
        tau: Vec<f64>,
        slopes: Vec<[f64; 2]>,
        cfg: &FluidConfig,
    ) -> Result<Self> {
        let interface = check_grid(&grid, cfg)?;
        if tau.len() != grid.len() || slopes.len() + 1 != grid.len() {
            return Err(Error::InadmissibleProfile("array lengths do not match grid".into()));
        }
        let scale = tau.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        if tau[0].abs() > tol || tau[tau.len() - 1].abs() > tol {
            return Err(Error::InadmissibleProfile("tau must vanish at the walls".into()));
        }
        Ok(TransverseProfile {
            grid,
            tau,
            slopes,
            interface,
        })
    }

    /// Continuous piecewise-linear profile through the nodal values.
    pub fn piecewise_linear(grid: Vec<f64>, tau: Vec<f64>, cfg: &FluidConfig) -> Result<Self> {
        let slopes = grid
            .windows(2)
            .zip(tau.windows(2))
            .map(|(g, t)| {
                let s = (t[1] - t[0]) / (g[1] - g[0]);
                [s, s]
            })
            .collect();
        Self::new(grid, tau, slopes, cfg)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn tau_values(&self) -> &[f64] {
        &self.tau
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.tau.iter_mut().for_each(|v| *v *= c);
        out.slopes.iter_mut().for_each(|s| {
            s[0] *= c;
            s[1] *= c;
        });
        out
    }

    fn integrate_layers(&self, f: impl Fn(f64, f64) -> f64) -> LayerSplit {
        let mut out = LayerSplit::default();
        for e in 0..self.grid.len() - 1 {
            let h = self.grid[e + 1] - self.grid[e];
            let dofs = [self.tau[e], self.slopes[e][0], self.tau[e + 1], self.slopes[e][1]];
            let s: f64 = GAUSS5
                .iter()
                .map(|&(t, w)| {
                    let v = hermite::eval(&dofs, t, h);
                    w * f(v[0], v[1])
                })
                .sum::<f64>()
                * h;
            if e < self.interface {
                out.lower += s;
            } else {
                out.upper += s;
            }
        }
        out
    }
}

/// `sum mu int (tau'^2 + k^2 tau^2)`.
pub fn transverse_dissipation_form(
    k: f64,
    tau: &TransverseProfile,
    cfg: &FluidConfig,
) -> Result<f64> {
    check_k(k)?;
    let k2 = k * k;
    Ok(tau
        .integrate_layers(|t, dt| dt * dt + k2 * t * t)
        .weighted(cfg.mu_minus, cfg.mu_plus))
}

/// `sum rho int tau^2`.
pub fn transverse_kinetic_form(tau: &TransverseProfile, cfg: &FluidConfig) -> f64 {
    tau.integrate_layers(|t, _| t * t)
        .weighted(cfg.rho_minus, cfg.rho_plus)
}

/// Uniform grid with `n` elements per layer.
pub fn uniform_grid(cfg: &FluidConfig, n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..n)
        .map(|j| -cfg.h_minus + cfg.h_minus * j as f64 / n as f64)
        .collect();
    grid.push(0.0);
    grid.extend((1..=n).map(|j| cfg.h_plus * j as f64 / n as f64));
    grid[0] = -cfg.h_minus;
    grid
}

/// The interface-energy test field used to show that
/// `sup |w3|^2 / |grad_h w3|^2 = max(L1^2, L2^2)`.
///
/// The field is `w = (psi' cos(y/L), 0, psi sin(y/L) / L)` along the longer
/// period direction, with `psi` a clamped bump normalized to `psi(0) = 1`.
/// The ratio is evaluated by trapezoidal quadrature over one full period,
/// which is exact for these trigonometric integrands.
pub fn interface_ratio_profile(cfg: &FluidConfig) -> Result<(VerticalProfile, f64)> {
    let (hm, hp) = (cfg.h_minus, cfg.h_plus);
    let norm = 1.0 / (hm * hm * hp * hp);
    let grid = uniform_grid(cfg, 16);
    let psi = VerticalProfile::from_fn(
        grid,
        cfg,
        |y| norm * (y + hm).powi(2) * (hp - y).powi(2),
        |y| norm * 2.0 * (y + hm) * (hp - y) * ((hp - y) - (y + hm)),
    )?;
    let length = cfg.l1.max(cfg.l2);
    let k = 1.0 / length;
    let amp = psi.interface_value();
    let samples = 64;
    let period = 2.0 * std::f64::consts::PI * length;
    let (mut w3_sq, mut grad_sq) = (0.0, 0.0);
    for i in 0..samples {
        let y = period * i as f64 / samples as f64;
        let w3 = k * amp * (k * y).sin();
        let dw3 = k * k * amp * (k * y).cos();
        w3_sq += w3 * w3;
        grad_sq += dw3 * dw3;
    }
    Ok((psi, w3_sq / grad_sq))
}

/// Per-layer trace inequalities satisfied by every admissible profile:
/// `psi(0)^2 <= (h/4) I` and `int psi'^2 <= I/4`, where
/// `I = int_layer (4 psi'^2 + (k psi + psi''/k)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceLayerCheck {
    pub layer: Layer,
    /// `psi(0)^2 / ((h/4) I)`; at most one when the inequality holds.
    pub trace_ratio: f64,
    /// `int psi'^2 / (I/4)`.
    pub slope_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReport {
    pub lower: TraceLayerCheck,
    pub upper: TraceLayerCheck,
}

impl TraceReport {
    pub fn pass(&self) -> bool {
        self.lower.pass && self.upper.pass
    }
}

pub fn check_trace_inequalities(
    k: f64,
    psi: &VerticalProfile,
    cfg: &FluidConfig,
) -> Result<TraceReport> {
    let diss = dissipation_integrand_split(k, psi)?;
    let slope = psi.integrate_layers(|_, dp, _| dp * dp);
    let trace = psi.interface_value().powi(2);
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    let check = |layer: Layer, h: f64| {
        let i = diss.get(layer);
        let trace_ratio = ratio(trace, 0.25 * h * i);
        let slope_ratio = ratio(slope.get(layer), 0.25 * i);
        TraceLayerCheck {
            layer,
            trace_ratio,
            slope_ratio,
            pass: trace_ratio <= 1.0 + 1e-12 && slope_ratio <= 1.0 + 1e-12,
        }
    };
    Ok(TraceReport {
        lower: check(Layer::Lower, cfg.h_minus),
        upper: check(Layer::Upper, cfg.h_plus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cfg() -> FluidConfig {
        FluidConfig {
            rho_plus: 1.0,
            rho_minus: 1.0,
            mu_plus: 1.0,
            mu_minus: 1.0,
            ..FluidConfig::reference()
        }
    }

    /// Hermite bump: value 1 at the lower node -0.5 of a four-element-per-layer grid.
    fn bump(cfg: &FluidConfig) -> VerticalProfile {
        let grid = uniform_grid(cfg, 4);
        let mut psi = vec![0.0; grid.len()];
        psi[2] = 1.0;
        VerticalProfile::new(grid.clone(), psi, vec![0.0; grid.len()], cfg).unwrap()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    // Independent description of the bump: on [-0.75,-0.5] it rises as
    // 3t^2 - 2t^3 and on [-0.5,-0.25] it falls as 1 - 3t^2 + 2t^3.
    fn bump_exact(y: f64) -> (f64, f64, f64) {
        let h = 0.25;
        if (-0.75..=-0.5).contains(&y) {
            let t = (y + 0.75) / h;
            (3.0 * t * t - 2.0 * t.powi(3), (6.0 * t - 6.0 * t * t) / h, (6.0 - 12.0 * t) / (h * h))
        } else if (-0.5..=-0.25).contains(&y) {
            let t = (y + 0.5) / h;
            (1.0 - 3.0 * t * t + 2.0 * t.powi(3), (-6.0 * t + 6.0 * t * t) / h, (-6.0 + 12.0 * t) / (h * h))
        } else {
            (0.0, 0.0, 0.0)
        }
    }

    fn simpson_bump(f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let g = |y: f64| {
            let (p, dp, ddp) = bump_exact(y);
            f(p, dp, ddp)
        };
        simpson(&g, -0.75, -0.5, 5_000) + simpson(&g, -0.5, -0.25, 5_000)
    }

    #[test]
    fn kinetic_matches_simpson() {
        let cfg = unit_cfg();
        let value = kinetic_form(1.0, &bump(&cfg), &cfg).unwrap();
        let oracle = simpson_bump(|p, dp, _| dp * dp + p * p);
        assert_relative_eq!(value, oracle, max_relative = 1e-10);
    }

    #[test]
    fn dissipation_matches_simpson() {
        let cfg = unit_cfg();
        let value = dissipation_form(1.0, &bump(&cfg), &cfg).unwrap();
        let oracle = simpson_bump(|p, dp, ddp| 4.0 * dp * dp + (p + ddp).powi(2));
        assert_relative_eq!(value, oracle, max_relative = 1e-10);
    }

    #[test]
    fn zero_profile_gives_zero() {
        let cfg = FluidConfig::reference();
        let z = VerticalProfile::zero(uniform_grid(&cfg, 4), &cfg).unwrap();
        assert_eq!(kinetic_form(1.0, &z, &cfg).unwrap(), 0.0);
        assert_eq!(dissipation_form(1.0, &z, &cfg).unwrap(), 0.0);
        let report = check_trace_inequalities(1.0, &z, &cfg).unwrap();
        assert!(report.pass());
        assert_eq!(report.lower.trace_ratio, 0.0);
    }

    #[test]
    fn homogeneity() {
        let cfg = FluidConfig::reference();
        let p = bump(&cfg);
        let k1 = kinetic_form(1.3, &p, &cfg).unwrap();
        let k2 = kinetic_form(1.3, &p.scaled(2.0), &cfg).unwrap();
        assert_relative_eq!(k2, 4.0 * k1, max_relative = 1e-14);
    }

    #[test]
    fn zero_wavenumber_rejected() {
        let cfg = FluidConfig::reference();
        assert_eq!(kinetic_form(0.0, &bump(&cfg), &cfg), Err(Error::ZeroWaveNumber));
        assert_eq!(dissipation_form(0.0, &bump(&cfg), &cfg), Err(Error::ZeroWaveNumber));
    }

    #[test]
    fn surface_coefficient_cases() {
        let cfg = FluidConfig::reference();
        for k in [0.5, 1.0, 7.0] {
            assert_eq!(surface_coefficient(k, &cfg), 9.8);
        }
        let cfg = cfg.with_theta(4.9);
        assert_relative_eq!(surface_coefficient(1.0, &cfg), 4.9, max_relative = 1e-15);
        let k_cut = (cfg.g * cfg.density_jump() / cfg.theta).sqrt();
        assert!(surface_coefficient(k_cut, &cfg).abs() < 1e-14);
    }

    #[test]
    fn transverse_hat_matches_simpson() {
        let cfg = unit_cfg();
        let grid = uniform_grid(&cfg, 4);
        let mut tau = vec![0.0; grid.len()];
        tau[4] = 1.0; // hat centred at the interface, support [-0.25, 0.25]
        let hat = TransverseProfile::piecewise_linear(grid, tau, &cfg).unwrap();
        let value = transverse_dissipation_form(1.0, &hat, &cfg).unwrap();
        let f = |y: f64| {
            let t = 1.0 - y.abs() / 0.25;
            16.0 + t * t
        };
        let oracle = simpson(f, -0.25, 0.0, 10_000) + simpson(f, 0.0, 0.25, 10_000);
        assert_relative_eq!(value, oracle, max_relative = 1e-10);
        let scaled = transverse_dissipation_form(1.0, &hat.scaled(3.0), &cfg).unwrap();
        assert_relative_eq!(scaled, 9.0 * value, max_relative = 1e-14);
        assert_relative_eq!(
            transverse_kinetic_form(&hat, &cfg),
            2.0 * 0.25 / 3.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn interface_ratio_ratios() {
        for (l1, l2, want) in [(1.0, 1.0, 1.0), (3.0, 1.0, 9.0), (1.0, 2.0, 4.0)] {
            let cfg = FluidConfig {
                l1,
                l2,
                ..FluidConfig::reference()
            };
            let (psi, ratio) = interface_ratio_profile(&cfg).unwrap();
            assert_relative_eq!(ratio, want, max_relative = 1e-12);
            assert!(psi.interface_value() != 0.0);
        }
    }

    #[test]
    fn clamped_violation_rejected() {
        let cfg = FluidConfig::reference();
        let grid = uniform_grid(&cfg, 4);
        let mut dpsi = vec![0.0; grid.len()];
        dpsi[0] = 1.0;
        let psi = vec![0.0; grid.len()];
        assert!(matches!(
            VerticalProfile::new(grid, psi, dpsi, &cfg),
            Err(Error::InadmissibleProfile(_))
        ));
    }

    #[test]
    fn grid_without_interface_node_rejected() {
        let cfg = FluidConfig::reference();
        let grid = vec![-1.0, -0.3, 0.4, 1.0];
        assert!(VerticalProfile::zero(grid, &cfg).is_err());
    }
}
