//! Largest linear Rayleigh-Taylor growth rate for two horizontally periodic
//! layers of viscous fluid with interfacial surface tension.
//!
//! The growth rate is characterized variationally: for a damping parameter
//! `s`, `alpha(s)` is the supremum over all lattice wave vectors and
//! admissible vertical profiles of the driving interface energy minus `s`
//! times the viscous dissipation, per unit kinetic energy. The growth rate
//! `Lambda` solves `Lambda^2 = alpha(Lambda)`. An exact dispersion relation
//! obtained from the normal-mode ODE provides an independent check.

pub mod analysis;
pub mod banded;
pub mod error;
pub mod fixedpoint;
mod hermite;
pub mod model;
pub mod modeforms;
pub mod oracle;
pub mod pencil;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{FluidConfig, ModeIndex, Thresholds};
pub use analysis::{sweep_theta, ThetaSweep};
pub use fixedpoint::{mode_lambda, solve_lambda, GrowthResult};
pub use oracle::{determinant, dispersion_root, validate_jump_rows};
pub use pencil::Discretization;
pub use spectrum::{alpha_curve, global_alpha, AlphaCurve, AlphaValue, Branch, CutoffPolicy, ModeSet};
