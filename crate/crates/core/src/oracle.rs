//! Exact normal-mode dispersion relation for a single wave number.
//!
//! In each layer the vertical amplitude solves
//! `(D^2 - k^2)(D^2 - q^2) psi = 0` with `q^2 = k^2 + n rho / mu`, so it is a
//! combination of `cosh`/`sinh` of `k z` and `q z`, where `z` is measured from
//! the layer's midplane. The second pair is replaced by divided differences
//! `(f(q z) - f(k z)) / (q - k)`, which stay independent as `q -> k`.
//!
//! Eliminating the pressure from the horizontal momentum balance gives
//! `k^2 beta = mu (psi''' - k^2 psi') - n rho psi'`. The interface conditions
//! become
//!
//! * tangential stress: `[mu (psi'' + k^2 psi)] = 0`
//! * normal stress: `c k^2 psi(0) + n [mu (3 k^2 psi' - psi''')] + n^2 [rho psi'] = 0`
//!
//! with `c = g [rho] - theta k^2` and `[f] = f(0+) - f(0-)`. Together with
//! clamped walls and continuity of `psi` and `psi'` this is an 8x8 system
//! whose determinant vanishes exactly at growth rates `n`.

use nalgebra::{DMatrix, SMatrix};

use crate::error::{Error, Result};
use crate::fixedpoint::{mode_lambda, richardson};
use crate::hermite::GAUSS5;
use crate::model::FluidConfig;
use crate::modeforms::{surface_coefficient, VerticalProfile};
use crate::pencil::Discretization;

/// Points in the default root scan.
pub const SCAN_POINTS: usize = 400;
/// Lower end of the scan relative to `scan_max`.
pub const SCAN_DEPTH: f64 = 1e-10;
const ROOT_RTOL: f64 = 1e-12;
/// Below this `(q - k) a`, divided differences use quadrature of the derivative.
const SERIES_SWITCH: f64 = 0.5;

/// Row and column scaling applied before the determinant is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Every column divided by its value scale at the layer's walls.
    Columns,
    /// Columns as above, then every row divided by its largest entry.
    Equilibrated,
}

/// `value * exp(log_scale)` is the determinant of the unscaled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: f64,
    pub log_scale: f64,
}

impl Determinant {
    pub fn sign(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value.signum()
        }
    }

    pub fn log_abs(&self) -> f64 {
        self.value.abs().ln() + self.log_scale
    }

    /// Relative difference of two representations of the same determinant.
    pub fn rel_diff(&self, other: &Determinant) -> f64 {
        if self.sign() != other.sign() {
            return f64::INFINITY;
        }
        (self.log_abs() - other.log_abs()).exp_m1().abs()
    }
}

// h(x) / cosh(y) for x, y >= 0, with h = sinh when `odd`
fn hyp_ratio(x: f64, y: f64, odd: bool) -> f64 {
    let tail = (-2.0 * x).exp();
    let num = if odd { 1.0 - tail } else { 1.0 + tail };
    (x - y).exp() * num / (1.0 + (-2.0 * y).exp())
}

fn ln_cosh(x: f64) -> f64 {
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// Columns `[cosh kz, sinh kz, dd cosh, dd sinh]`, scaled, with derivatives
/// `0..=3` evaluated at `z = +a`. Values at `z = -a` follow by parity.
struct LayerBlock {
    plus: [[f64; 4]; 4],
    log_scale: [f64; 4],
}

impl LayerBlock {
    fn new(k: f64, n: f64, rho: f64, mu: f64, a: f64) -> Self {
        let q = (k * k + n * rho / mu).sqrt();
        // q - k without cancellation
        let d = n * rho / mu / (q + k);
        let ka = k * a;
        let qa = q * a;
        let mut plus = [[0.0; 4]; 4];
        for (j, row) in plus.iter_mut().enumerate() {
            let kj = k.powi(j as i32);
            row[0] = kj * hyp_ratio(ka, ka, j % 2 == 1);
            row[1] = kj * hyp_ratio(ka, ka, j % 2 == 0);
        }
        let ln_ck = ln_cosh(ka);
        let ln_s;
        if d * a < SERIES_SWITCH {
            // mean over [k, q] of d/dt [t^j h(t a)], relative to cosh(k a)
            let mean = |j: usize, odd: bool| -> f64 {
                GAUSS5
                    .iter()
                    .map(|&(u, w)| {
                        let t = k + u * d;
                        let jf = j as f64;
                        let lead = if j == 0 {
                            0.0
                        } else {
                            jf * t.powi(j as i32 - 1) * hyp_ratio(t * a, ka, odd)
                        };
                        w * (lead + t.powi(j as i32) * a * hyp_ratio(t * a, ka, !odd))
                    })
                    .sum()
            };
            let scale = mean(0, false);
            for (j, row) in plus.iter_mut().enumerate() {
                row[2] = mean(j, j % 2 == 1) / scale;
                row[3] = mean(j, j % 2 == 0) / scale;
            }
            ln_s = ln_ck + scale.ln();
        } else {
            let denom = 1.0 - hyp_ratio(ka, qa, false);
            for (j, row) in plus.iter_mut().enumerate() {
                let (qj, kj) = (q.powi(j as i32), k.powi(j as i32));
                let odd = j % 2 == 1;
                row[2] = (qj * hyp_ratio(qa, qa, odd) - kj * hyp_ratio(ka, qa, odd)) / denom;
                row[3] = (qj * hyp_ratio(qa, qa, !odd) - kj * hyp_ratio(ka, qa, !odd)) / denom;
            }
            ln_s = ln_cosh(qa) + denom.ln() - d.ln();
        }
        LayerBlock {
            plus,
            log_scale: [ln_ck, ln_ck, ln_s, ln_s],
        }
    }

    fn at(&self, j: usize, upper_end: bool) -> [f64; 4] {
        let mut r = self.plus[j];
        if !upper_end {
            // cosh-type columns have parity (-1)^j, sinh-type (-1)^(j+1)
            let even = if j % 2 == 0 { 1.0 } else { -1.0 };
            r[0] *= even;
            r[2] *= even;
            r[1] *= -even;
            r[3] *= -even;
        }
        r
    }
}

/// Column-scaled condition matrix and the log of the removed column scales.
pub fn condition_matrix(k: f64, n: f64, cfg: &FluidConfig) -> Result<(SMatrix<f64, 8, 8>, f64)> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("wave number must be positive, got {k}")));
    }
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("trial growth rate must be positive, got {n}")));
    }
    let up = LayerBlock::new(k, n, cfg.rho_plus, cfg.mu_plus, 0.5 * cfg.h_plus);
    let lo = LayerBlock::new(k, n, cfg.rho_minus, cfg.mu_minus, 0.5 * cfg.h_minus);
    let k2 = k * k;
    let c = surface_coefficient(k, cfg);
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    let mut put = |row: usize, upper: [f64; 4], lower: [f64; 4]| {
        for i in 0..4 {
            m[(row, i)] = upper[i];
            m[(row, 4 + i)] = lower[i];
        }
    };
    let zero = [0.0; 4];
    let neg = |v: [f64; 4]| v.map(|x| -x);
    let comb = |a: [f64; 4], ca: f64, b: [f64; 4], cb: f64| {
        let mut r = [0.0; 4];
        for i in 0..4 {
            r[i] = ca * a[i] + cb * b[i];
        }
        r
    };
    // upper wall at +a, upper interface at -a; lower wall at -a, lower interface at +a
    put(0, up.at(0, true), zero);
    put(1, up.at(1, true), zero);
    put(2, zero, lo.at(0, false));
    put(3, zero, lo.at(1, false));
    put(4, up.at(0, false), neg(lo.at(0, true)));
    put(5, up.at(1, false), neg(lo.at(1, true)));
    put(
        6,
        comb(up.at(2, false), cfg.mu_plus, up.at(0, false), cfg.mu_plus * k2),
        comb(lo.at(2, true), -cfg.mu_minus, lo.at(0, true), -cfg.mu_minus * k2),
    );
    let normal = |b: &LayerBlock, end: bool, rho: f64, mu: f64, sign: f64| {
        let (p0, p1, p3) = (b.at(0, end), b.at(1, end), b.at(3, end));
        let mut r = [0.0; 4];
        for i in 0..4 {
            r[i] = 0.5 * c * k2 * p0[i]
                + sign * (n * mu * (3.0 * k2 * p1[i] - p3[i]) + n * n * rho * p1[i]);
        }
        r
    };
    put(
        7,
        normal(&up, false, cfg.rho_plus, cfg.mu_plus, 1.0),
        normal(&lo, true, cfg.rho_minus, cfg.mu_minus, -1.0),
    );
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateExponents(n));
    }
    let log_scale = up.log_scale.iter().chain(lo.log_scale.iter()).sum();
    Ok((m, log_scale))
}

pub fn determinant(k: f64, n: f64, cfg: &FluidConfig) -> Result<Determinant> {
    determinant_with(k, n, cfg, Normalization::Equilibrated)
}

pub fn determinant_with(
    k: f64,
    n: f64,
    cfg: &FluidConfig,
    norm: Normalization,
) -> Result<Determinant> {
    let (mut m, mut log_scale) = condition_matrix(k, n, cfg)?;
    if norm == Normalization::Equilibrated {
        for mut row in m.row_iter_mut() {
            let s = row.amax();
            if s > 0.0 {
                row /= s;
                log_scale += s.ln();
            }
        }
    }
    let value = m.lu().determinant();
    if !value.is_finite() {
        return Err(Error::DegenerateExponents(n));
    }
    Ok(Determinant { value, log_scale })
}

/// Largest per-mode growth rate any admissible profile allows, `sqrt(c k / (2 rho_min))`.
/// `None` for modes with `c_k <= 0`.
pub fn mode_bound(k: f64, cfg: &FluidConfig) -> Option<f64> {
    let c = surface_coefficient(k, cfg);
    (c > 0.0).then(|| (0.5 * c * k / cfg.rho_plus.min(cfg.rho_minus)).sqrt())
}

/// Default scan ceiling for one mode. Stable modes fall back to the
/// `theta = 0` bound so the scan still looks for spurious roots.
pub fn default_scan_max(k: f64, cfg: &FluidConfig) -> f64 {
    let b = mode_bound(k, cfg)
        .or_else(|| mode_bound(k, &cfg.with_theta(0.0)))
        .unwrap_or(1.0);
    1.01 * b
}

/// Sign changes of the determinant on a log grid over `[depth * scan_max, scan_max]`.
pub fn sign_change_brackets(
    k: f64,
    cfg: &FluidConfig,
    scan_max: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(scan_max > 0.0) || !scan_max.is_finite() {
        return Err(Error::InvalidArgument(format!("scan_max must be positive, got {scan_max}")));
    }
    let points = points.max(2);
    let lo = scan_max * SCAN_DEPTH;
    let ratio = (scan_max / lo).ln() / (points - 1) as f64;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..points {
        let n = if i + 1 == points {
            scan_max
        } else {
            lo * (ratio * i as f64).exp()
        };
        let s = determinant(k, n, cfg)?.sign();
        if let Some((pn, ps)) = prev {
            if s != ps && s != 0.0 && ps != 0.0 {
                out.push((pn, n));
            }
        }
        if s != 0.0 {
            prev = Some((n, s));
        }
    }
    Ok(out)
}

fn bisect_root(k: f64, cfg: &FluidConfig, mut lo: f64, mut hi: f64) -> Result<f64> {
    let s_lo = determinant(k, lo, cfg)?.sign();
    while hi - lo > ROOT_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        let s = determinant(k, mid, cfg)?.sign();
        if s == 0.0 {
            return Ok(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Every root located by the scan, ascending.
pub fn dispersion_roots(k: f64, cfg: &FluidConfig, scan_max: f64, points: usize) -> Result<Vec<f64>> {
    sign_change_brackets(k, cfg, scan_max, points)?
        .into_iter()
        .map(|(a, b)| bisect_root(k, cfg, a, b))
        .collect()
}

/// Largest positive growth rate of mode `k` up to `scan_max`.
pub fn dispersion_root(k: f64, cfg: &FluidConfig, scan_max: f64) -> Result<Option<f64>> {
    let brackets = sign_change_brackets(k, cfg, scan_max, SCAN_POINTS)?;
    match brackets.last() {
        Some(&(a, b)) => bisect_root(k, cfg, a, b).map(Some),
        None => Ok(None),
    }
}

/// Inviscid limit of the growth rate, `n^2 = c k / (rho+ coth k h+ + rho- coth k h-)`.
pub fn inviscid_root(k: f64, cfg: &FluidConfig) -> Option<f64> {
    let c = surface_coefficient(k, cfg);
    let coth = |x: f64| 1.0 / x.tanh();
    let inertia = cfg.rho_plus * coth(k * cfg.h_plus) + cfg.rho_minus * coth(k * cfg.h_minus);
    (c > 0.0).then(|| (c * k / inertia).sqrt())
}

/// Residuals of the two stress-jump conditions for a profile and growth rate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct JumpRowReport {
    pub k: f64,
    pub n: f64,
    pub tangential: f64,
    pub normal: f64,
}

impl JumpRowReport {
    pub fn max(&self) -> f64 {
        self.tangential.max(self.normal)
    }
}

// one-sided values at the interface: [psi, psi', psi'', psi'''] from each side;
// psi''' is constant per element so it is extrapolated linearly from two elements
fn interface_traces(p: &VerticalProfile) -> ([f64; 4], [f64; 4]) {
    let i = p.interface_index();
    let mut up = p.element_eval(i, 0.0);
    let u2 = p.element_eval(i + 1, 0.5)[3];
    let h1 = p.grid()[i + 1] - p.grid()[i];
    let h2 = p.grid()[i + 2] - p.grid()[i + 1];
    up[3] = extrapolate(up[3], u2, h1, h2);
    let mut lo = p.element_eval(i - 1, 1.0);
    let l2 = p.element_eval(i - 2, 0.5)[3];
    let g1 = p.grid()[i] - p.grid()[i - 1];
    let g2 = p.grid()[i - 1] - p.grid()[i - 2];
    lo[3] = extrapolate(lo[3], l2, g1, g2);
    (up, lo)
}

// midpoint values v1 at distance h1/2 and v2 at h1 + h2/2, extrapolated to 0
fn extrapolate(v1: f64, v2: f64, h1: f64, h2: f64) -> f64 {
    let x1 = 0.5 * h1;
    let x2 = h1 + 0.5 * h2;
    v1 + (v1 - v2) * x1 / (x2 - x1)
}

/// Substitutes `(psi, n)` into the two stress rows. Each residual is
/// normalized by the sum of the magnitudes of its terms.
pub fn jump_row_residuals(k: f64, n: f64, p: &VerticalProfile, cfg: &FluidConfig) -> JumpRowReport {
    let (u, l) = interface_traces(p);
    let k2 = k * k;
    let (mp, mm) = (cfg.mu_plus, cfg.mu_minus);
    let t_terms = [mp * u[2], mp * k2 * u[0], -mm * l[2], -mm * k2 * l[0]];
    let c = surface_coefficient(k, cfg);
    let psi0 = 0.5 * (u[0] + l[0]);
    let n_terms = [
        c * k2 * psi0,
        n * mp * 3.0 * k2 * u[1],
        -n * mp * u[3],
        -n * mm * 3.0 * k2 * l[1],
        n * mm * l[3],
        n * n * cfg.rho_plus * u[1],
        -n * n * cfg.rho_minus * l[1],
    ];
    let rel = |t: &[f64]| {
        let scale: f64 = t.iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            t.iter().sum::<f64>().abs() / scale
        }
    };
    JumpRowReport {
        k,
        n,
        tangential: rel(&t_terms),
        normal: rel(&n_terms),
    }
}

/// Jump-row residuals of the variational per-mode eigenprofile at its own
/// growth rate. `None` for modes that cannot grow.
pub fn validate_jump_rows(
    cfg: &FluidConfig,
    k: f64,
    disc: Discretization,
    tol: f64,
) -> Result<Option<JumpRowReport>> {
    let Some(mg) = mode_lambda(k * k, cfg, disc, tol)? else {
        return Ok(None);
    };
    let p = disc.profile_from_vector(&mg.eigen.vector, cfg);
    Ok(Some(jump_row_residuals(k, mg.lambda, &p, cfg)))
}

/// One row of the oracle comparison table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub lambda_oracle: Option<f64>,
    pub lambda_variational: Option<f64>,
    pub rel_diff: Option<f64>,
    /// Richardson value over `N` and `2N`, when requested.
    pub lambda_extrapolated: Option<f64>,
    pub rel_diff_extrapolated: Option<f64>,
}

impl DispersionPoint {
    /// Disagreement beyond `tol`, or a root found by one method only.
    pub fn flagged(&self, tol: f64) -> bool {
        match self.rel_diff {
            Some(r) => r > tol,
            None => self.lambda_oracle.is_some() != self.lambda_variational.is_some(),
        }
    }
}

/// Variational per-mode growth rates compared with determinant roots.
/// With `extrapolate`, a second solve at twice the resolution feeds a
/// fourth-order Richardson estimate.
pub fn dispersion_curve(
    cfg: &FluidConfig,
    ks: &[f64],
    disc: Discretization,
    tol: f64,
    extrapolate: bool,
) -> Result<Vec<DispersionPoint>> {
    use rayon::prelude::*;
    ks.par_iter()
        .map(|&k| {
            let oracle = dispersion_root(k, cfg, default_scan_max(k, cfg))?;
            let var = mode_lambda(k * k, cfg, disc, tol)?.map(|m| m.lambda);
            let rel = |v: Option<f64>| match (oracle, v) {
                (Some(o), Some(v)) => Some((v - o).abs() / o),
                _ => None,
            };
            let extrapolated = match (extrapolate, var) {
                (true, Some(coarse)) => mode_lambda(k * k, cfg, disc.refined(), tol)?
                    .map(|fine| richardson(coarse, fine.lambda, 4)),
                _ => None,
            };
            Ok(DispersionPoint {
                k,
                lambda_oracle: oracle,
                lambda_variational: var,
                rel_diff: rel(var),
                lambda_extrapolated: extrapolated,
                rel_diff_extrapolated: rel(extrapolated),
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(crate::spectrum::fmt_num).unwrap_or_default()
}

/// CSV with columns `k, lambda_oracle, lambda_variational, rel_diff`.
pub fn write_dispersion_csv<W: std::io::Write>(rows: &[DispersionPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["k", "lambda_oracle", "lambda_variational", "rel_diff"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            crate::spectrum::fmt_num(r.k),
            opt(r.lambda_oracle),
            opt(r.lambda_variational),
            opt(r.rel_diff),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}

/// Determinant of a dense matrix by cofactor expansion along the first row.
pub fn cofactor_determinant(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    (0..n)
        .map(|j| {
            let minor = m.clone().remove_row(0).remove_column(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[(0, j)] * cofactor_determinant(&minor)
        })
        .sum()
}
