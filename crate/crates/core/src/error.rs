use thiserror::Error;

/// Errors produced by the growth-rate solver and its supporting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("density ordering violated: rho_plus ({rho_plus}) must exceed rho_minus ({rho_minus})")]
    DensityOrderViolation { rho_plus: f64, rho_minus: f64 },

    #[error("parameter `{0}` must be strictly positive and finite")]
    NonPositiveParameter(&'static str),

    #[error("surface tension must be non-negative, got {0}")]
    NegativeSurfaceTension(f64),

    #[error("stable regime: theta = {theta} is not below the critical surface tension theta_c = {theta_c}")]
    StableRegime { theta: f64, theta_c: f64 },

    #[error("wave number must be strictly positive")]
    ZeroWaveNumber,

    #[error("profile is not admissible: {0}")]
    InadmissibleProfile(String),

    #[error("resolution too small: {given} elements per layer, need at least {min}")]
    ResolutionTooSmall { given: usize, min: usize },

    #[error("matrix is not numerically positive definite ({0})")]
    FactorizationFailure(&'static str),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("no lattice mode with magnitude <= {k_max} (smallest is {k_min})")]
    EmptyModeSet { k_max: f64, k_min: f64 },

    #[error("mode cutoff ran away: k_max = {k_max} exceeds the escalation limit {limit}")]
    CutoffRunaway { k_max: f64, limit: f64 },

    #[error("monotonicity violated: {0}")]
    MonotonicityViolation(String),

    #[error("could not find s with alpha(s) > s^2 (lowest probe s = {s})")]
    BracketFailureLow { s: f64 },

    #[error("could not find s with alpha(s) < s^2 (highest probe s = {s})")]
    BracketFailureHigh { s: f64 },

    #[error("dispersion basis degenerate: |q - k|(h+ + h-) = {0:e}")]
    DegenerateExponents(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at theta = {theta}: {source}")]
    AtTheta { theta: f64, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input or a stable configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::FactorizationFailure(_)
                | Error::NoConvergence { .. }
                | Error::CutoffRunaway { .. }
                | Error::MonotonicityViolation(_)
                | Error::BracketFailureLow { .. }
                | Error::BracketFailureHigh { .. }
                | Error::DegenerateExponents(_)
        )
    }

    /// The underlying error, with any location context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTheta { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn at_theta(self, theta: f64) -> Error {
        Error::AtTheta {
            theta,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
