//! Conforming discretization of one per-mode variational problem.
//!
//! The vertical profile lives in the space of C^1 piecewise cubic Hermite
//! functions on a mesh that is uniform inside each layer and has a node at
//! the interface. Both wall nodes are clamped, leaving `4N - 2` unknowns for
//! `N` elements per layer. The discrete supremum
//! `alpha = max (c_k x0^2 - s x^T A x) / x^T B x` is the largest eigenvalue of
//! the banded pencil `(c_k e0 e0^T - s A, B)`.

use crate::banded::{self, dot, norm2, PencilEigen, SymBanded};
use crate::error::{Error, Result};
use crate::hermite::{shape, GAUSS5};
use crate::model::FluidConfig;
use crate::modeforms::{
    dissipation_form, kinetic_form, surface_coefficient_sq, uniform_grid, VerticalProfile,
};

pub const MIN_ELEMENTS_PER_LAYER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discretization {
    pub elements_per_layer: usize,
}

impl Discretization {
    pub fn new(elements_per_layer: usize) -> Result<Self> {
        if elements_per_layer < MIN_ELEMENTS_PER_LAYER {
            return Err(Error::ResolutionTooSmall {
                given: elements_per_layer,
                min: MIN_ELEMENTS_PER_LAYER,
            });
        }
        Ok(Discretization { elements_per_layer })
    }

    pub fn refined(&self) -> Self {
        Discretization {
            elements_per_layer: 2 * self.elements_per_layer,
        }
    }

    /// Free degrees of freedom of the longitudinal problem, `4N - 2`.
    pub fn free_dofs(&self) -> usize {
        4 * self.elements_per_layer - 2
    }

    pub fn grid(&self, cfg: &FluidConfig) -> Vec<f64> {
        uniform_grid(cfg, self.elements_per_layer)
    }

    /// Index of `psi(0)` among the free unknowns.
    pub fn interface_dof(&self) -> usize {
        2 * (self.elements_per_layer - 1)
    }

    fn node_dofs(&self, node: usize) -> Option<[usize; 2]> {
        let last = 2 * self.elements_per_layer;
        (node != 0 && node != last).then(|| [2 * (node - 1), 2 * (node - 1) + 1])
    }

    /// Coefficient vector of the interpolant of `profile` at this mesh's nodes.
    pub fn vector_from_profile(&self, profile: &VerticalProfile, cfg: &FluidConfig) -> Vec<f64> {
        let grid = self.grid(cfg);
        let mut x = vec![0.0; self.free_dofs()];
        for (node, &y) in grid.iter().enumerate() {
            if let Some([v, d]) = self.node_dofs(node) {
                let val = profile.value_at(y);
                x[v] = val[0];
                x[d] = val[1];
            }
        }
        x
    }

    /// Profile represented by a free-dof coefficient vector.
    pub fn profile_from_vector(&self, x: &[f64], cfg: &FluidConfig) -> VerticalProfile {
        let grid = self.grid(cfg);
        let mut psi = vec![0.0; grid.len()];
        let mut dpsi = vec![0.0; grid.len()];
        for node in 0..grid.len() {
            if let Some([v, d]) = self.node_dofs(node) {
                psi[node] = x[v];
                dpsi[node] = x[d];
            }
        }
        VerticalProfile::from_parts_unchecked(grid, psi, dpsi, self.elements_per_layer)
    }
}

fn layer_props(cfg: &FluidConfig, lower: bool) -> (f64, f64) {
    if lower {
        (cfg.rho_minus, cfg.mu_minus)
    } else {
        (cfg.rho_plus, cfg.mu_plus)
    }
}

/// Assembled kinetic and dissipation matrices for one wavenumber.
#[derive(Debug, Clone)]
pub struct PencilForms {
    pub k: f64,
    pub k_sq: f64,
    /// Surface coefficient `g [rho] - theta k^2`.
    pub c_k: f64,
    pub kinetic: SymBanded,
    pub dissipation: SymBanded,
    pub e0_index: usize,
    pub disc: Discretization,
    pub cfg: FluidConfig,
}

/// Assembles the pencil for wavenumber `k`.
pub fn assemble(k: f64, cfg: &FluidConfig, disc: Discretization) -> Result<PencilForms> {
    assemble_sq(k * k, cfg, disc)
}

/// As [`assemble`], from the exact squared magnitude of a lattice mode.
pub fn assemble_sq(k_sq: f64, cfg: &FluidConfig, disc: Discretization) -> Result<PencilForms> {
    let disc = Discretization::new(disc.elements_per_layer)?;
    if !(k_sq > 0.0 && k_sq.is_finite()) {
        return Err(Error::ZeroWaveNumber);
    }
    let k = k_sq.sqrt();
    let n = disc.elements_per_layer;
    let grid = disc.grid(cfg);
    let dim = disc.free_dofs();
    let mut kinetic = SymBanded::zeros(dim, 3);
    let mut dissipation = SymBanded::zeros(dim, 3);
    for e in 0..2 * n {
        let h = grid[e + 1] - grid[e];
        let (rho, mu) = layer_props(cfg, e < n);
        let mut idx = [None; 4];
        if let Some([v, d]) = disc.node_dofs(e) {
            idx[0] = Some(v);
            idx[1] = Some(d);
        }
        if let Some([v, d]) = disc.node_dofs(e + 1) {
            idx[2] = Some(v);
            idx[3] = Some(d);
        }
        let mut ke = [[0.0; 4]; 4];
        let mut de = [[0.0; 4]; 4];
        for &(t, w) in GAUSS5.iter() {
            let sf = shape(t, h);
            let wh = w * h;
            for a in 0..4 {
                let ta = k * sf[0][a] + sf[2][a] / k;
                for b in 0..4 {
                    let tb = k * sf[0][b] + sf[2][b] / k;
                    ke[a][b] += wh * rho * (sf[1][a] * sf[1][b] / k_sq + sf[0][a] * sf[0][b]);
                    de[a][b] += wh * mu * (4.0 * sf[1][a] * sf[1][b] + ta * tb);
                }
            }
        }
        for a in 0..4 {
            let Some(i) = idx[a] else { continue };
            for b in 0..=a {
                let Some(j) = idx[b] else { continue };
                if i == j && a != b {
                    continue;
                }
                kinetic.add(i, j, ke[a][b]);
                dissipation.add(i, j, de[a][b]);
            }
        }
    }
    Ok(PencilForms {
        k,
        k_sq,
        c_k: surface_coefficient_sq(k_sq, cfg),
        kinetic,
        dissipation,
        e0_index: disc.interface_dof(),
        disc,
        cfg: *cfg,
    })
}

impl PencilForms {
    pub fn dim(&self) -> usize {
        self.kinetic.dim()
    }

    /// Numerator matrix `c_k e0 e0^T - s A`.
    pub fn numerator(&self, s: f64) -> SymBanded {
        let mut t = self.dissipation.combine(-s, &self.dissipation, 0.0);
        t.add(self.e0_index, self.e0_index, self.c_k);
        t
    }

    /// `(x^T B x, x^T A x)` accumulated element by element. Every summand is
    /// nonnegative, so unlike the matrix products nothing cancels against the
    /// `h^-3` stiffness entries.
    pub fn energies(&self, x: &[f64]) -> (f64, f64) {
        let p = self.profile(x, &self.cfg);
        let kin = kinetic_form(self.k, &p, &self.cfg).expect("k > 0 checked at assembly");
        let dis = dissipation_form(self.k, &p, &self.cfg).expect("k > 0 checked at assembly");
        (kin, dis)
    }

    /// Discrete value of `(c_k psi(0)^2 - s D(psi)) / K(psi)`.
    pub fn rayleigh(&self, x: &[f64], s: f64) -> f64 {
        let x0 = x[self.e0_index];
        let (kin, dis) = self.energies(x);
        (self.c_k * x0 * x0 - s * dis) / kin
    }

    /// `|| (c_k e0 e0^T - s A) x - alpha B x || / ||x||`.
    pub fn residual(&self, x: &[f64], s: f64, alpha: f64) -> f64 {
        let tx = self.numerator(s).matvec(x);
        let bx = self.kinetic.matvec(x);
        let r: Vec<f64> = tx.iter().zip(&bx).map(|(a, b)| a - alpha * b).collect();
        norm2(&r) / norm2(x)
    }

    /// Scale used to judge eigen residuals: `|alpha| + s ||A||_max + |c_k|`.
    pub fn residual_scale(&self, s: f64, alpha: f64) -> f64 {
        alpha.abs() + s * self.dissipation.max_abs() + self.c_k.abs()
    }

    pub fn profile(&self, x: &[f64], cfg: &FluidConfig) -> VerticalProfile {
        self.disc.profile_from_vector(x, cfg)
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub alpha: f64,
    /// Coefficients normalized to `x^T B x = 1`, with `psi(0) >= 0`.
    pub vector: Vec<f64>,
    pub residual: f64,
}

impl EigenSolution {
    /// `x^T A x`, the slope of `alpha` in `s` at this maximizer.
    pub fn dissipation(&self, forms: &PencilForms) -> f64 {
        forms.energies(&self.vector).1
    }
}

fn normalize_sign(x: &mut [f64], e0: usize) {
    let pivot = if x[e0] != 0.0 {
        x[e0]
    } else {
        x.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0)
    };
    if pivot < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn finish(forms: &PencilForms, s: f64, raw: PencilEigen) -> EigenSolution {
    let mut vector = raw.vector;
    let nb = forms.energies(&vector).0.sqrt();
    vector.iter_mut().for_each(|v| *v /= nb);
    normalize_sign(&mut vector, forms.e0_index);
    let alpha = forms.rayleigh(&vector, s);
    let residual = forms.residual(&vector, s, alpha);
    EigenSolution {
        alpha,
        vector,
        residual,
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("s must be positive, got {s}")))
    }
}

/// Largest eigenpair of `(c_k e0 e0^T - s A) x = alpha B x` on banded storage.
pub fn largest_eigenpair(forms: &PencilForms, s: f64) -> Result<EigenSolution> {
    check_s(s)?;
    let t = forms.numerator(s);
    let (guess, start) = if forms.c_k > 0.0 {
        let b_fac = forms
            .kinetic
            .cholesky()
            .ok_or(Error::FactorizationFailure("kinetic matrix"))?;
        let mut e = vec![0.0; forms.dim()];
        e[forms.e0_index] = 1.0;
        let y = b_fac.solve(&e);
        (forms.c_k * dot(&e, &y), Some(y))
    } else {
        (0.0, None)
    };
    let raw = banded::largest_eigenpair_banded(&t, &forms.kinetic, guess, start.as_deref())?;
    Ok(finish(forms, s, raw))
}

/// Dense reference for [`largest_eigenpair`].
pub fn largest_eigenpair_dense(forms: &PencilForms, s: f64) -> Result<EigenSolution> {
    check_s(s)?;
    let raw = banded::largest_eigenpair_dense(
        &forms.numerator(s).to_dense(),
        &forms.kinetic.to_dense(),
    )?;
    Ok(finish(forms, s, raw))
}

/// Matrices of the transverse problem `min sum mu int (tau'^2 + k^2 tau^2) / sum rho int tau^2`.
///
/// `tau` only needs `H^1` regularity: walls fix the value but not the slope,
/// and the interface node carries separate slopes for each layer.
#[derive(Debug, Clone)]
pub struct TransversePencil {
    pub stiffness: SymBanded,
    pub mass: SymBanded,
}

pub fn assemble_transverse(k_sq: f64, cfg: &FluidConfig, disc: Discretization) -> Result<TransversePencil> {
    let disc = Discretization::new(disc.elements_per_layer)?;
    if !(k_sq > 0.0 && k_sq.is_finite()) {
        return Err(Error::ZeroWaveNumber);
    }
    let n = disc.elements_per_layer;
    let last = 2 * n;
    let grid = disc.grid(cfg);
    // local dofs per element: [tau_left, slope_left, tau_right, slope_right]
    let mut elems: Vec<[Option<usize>; 4]> = vec![[None; 4]; last];
    let mut next = 0;
    for node in 0..=last {
        let value = if node == 0 || node == last {
            None
        } else {
            next += 1;
            Some(next - 1)
        };
        if node > 0 {
            elems[node - 1][2] = value;
        }
        if node < last {
            elems[node][0] = value;
        }
        if node == n {
            elems[node - 1][3] = Some(next);
            elems[node][1] = Some(next + 1);
            next += 2;
        } else {
            if node > 0 {
                elems[node - 1][3] = Some(next);
            }
            if node < last {
                elems[node][1] = Some(next);
            }
            next += 1;
        }
    }
    let bw = elems
        .iter()
        .map(|ix| {
            let v: Vec<usize> = ix.iter().flatten().copied().collect();
            v.iter().max().unwrap() - v.iter().min().unwrap()
        })
        .max()
        .unwrap_or(0);
    let mut stiffness = SymBanded::zeros(next, bw);
    let mut mass = SymBanded::zeros(next, bw);
    for (e, idx) in elems.iter().enumerate() {
        let h = grid[e + 1] - grid[e];
        let (rho, mu) = layer_props(cfg, e < n);
        let mut se = [[0.0; 4]; 4];
        let mut me = [[0.0; 4]; 4];
        for &(t, w) in GAUSS5.iter() {
            let sf = shape(t, h);
            for a in 0..4 {
                for b in 0..4 {
                    se[a][b] += w * h * mu * (sf[1][a] * sf[1][b] + k_sq * sf[0][a] * sf[0][b]);
                    me[a][b] += w * h * rho * sf[0][a] * sf[0][b];
                }
            }
        }
        for a in 0..4 {
            let Some(i) = idx[a] else { continue };
            for b in 0..=a {
                let Some(j) = idx[b] else { continue };
                stiffness.add(i, j, se[a][b]);
                mass.add(i, j, me[a][b]);
            }
        }
    }
    Ok(TransversePencil { stiffness, mass })
}

/// Smallest value of the transverse quotient at wavenumber squared `k_sq`.
pub fn transverse_lambda_min(k_sq: f64, cfg: &FluidConfig, disc: Discretization) -> Result<f64> {
    let p = assemble_transverse(k_sq, cfg, disc)?;
    let neg = p.stiffness.combine(-1.0, &p.stiffness, 0.0);
    let eig = banded::largest_eigenpair_banded(&neg, &p.mass, 0.0, None)?;
    Ok(-eig.alpha)
}

/// Best value of the transverse branch, `-s lambda_min(k) < 0`.
pub fn transverse_largest(k: f64, cfg: &FluidConfig, disc: Discretization, s: f64) -> Result<f64> {
    check_s(s)?;
    if !(k > 0.0) {
        return Err(Error::ZeroWaveNumber);
    }
    Ok(-s * transverse_lambda_min(k * k, cfg, disc)?)
}
