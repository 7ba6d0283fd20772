//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("grid resolution {given} too small, need at least {minimum}")]
    ResolutionTooSmall { given: usize, minimum: usize },

    #[error("resolution {given} is not a power of two")]
    ResolutionNotPowerOfTwo { given: usize },

    #[error("density not strictly positive at node {index} (value {value})")]
    NonPositiveDensity { index: usize, value: f64 },

    #[error("symplectic potential not strictly convex at m = {m} (w'' = {value})")]
    ConvexityFailure { m: f64, value: f64 },

    #[error("field shape {found} does not match manifold grid {expected}")]
    ShapeMismatch { expected: String, found: String },

    #[error("Poisson data violates compatibility: ∫ρ = {integral}, tolerance {tolerance}")]
    CompatibilityViolation { integral: f64, tolerance: f64 },

    #[error("vector field kind is not supported on this manifold")]
    UnsupportedField,

    #[error("contraction is not ∂̄-exact, obstruction norm {obstruction}")]
    NotExact { obstruction: f64 },

    #[error("imaginary part of the field is not Hamiltonian, obstruction norm {obstruction}")]
    NonHamiltonian { obstruction: f64 },

    #[error("Kähler positivity lost at node {index} (density {value}) at time index {time_index}")]
    PositivityLoss {
        index: usize,
        value: f64,
        time_index: usize,
    },

    #[error("time index {index} is a boundary node; interior node required")]
    BoundaryTimeNode { index: usize },

    #[error("leaf left the resolvable region at t = {t} (position {position})")]
    LeafOutOfDomain { t: f64, position: f64 },

    #[error("need at least {minimum} nodes, got {given}")]
    TooFewNodes { given: usize, minimum: usize },

    #[error("vector fields do not commute or tuple is unsupported")]
    NonCommutingTuple,

    #[error("histogram bin configuration is empty")]
    EmptyBins,

    #[error("measures have incompatible supports and no common refinement")]
    IncompatibleMeasures,

    #[error("family member {index} fails the memberwise curvature bound (margin {margin})")]
    MemberBoundFailed { index: usize, margin: f64 },

    #[error("mismatched grids in metric family")]
    MismatchedGrids,

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
