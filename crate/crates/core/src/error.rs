use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the geometry routines.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// so that frontends can report failures without parsing messages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point lies on the hyperplane at infinity of the chart")]
    AtInfinity,

    #[error("degenerate pencil: the two hyperplanes are proportional")]
    DegeneratePencil,

    #[error("domain is not properly convex: {reason}")]
    NotProperlyConvex {
        reason: String,
        /// A direction (chart coordinates) or point certifying the failure.
        witness: Vec<f64>,
    },

    #[error("degenerate chord: the two points coincide")]
    DegenerateChord,

    #[error("point is not on the frontier (margin {margin:e})")]
    NotOnFrontier { margin: f64 },

    #[error("point is within the frontier guard band; distance would be infinite")]
    InfiniteDistance,

    #[error("projection along the pencil core is undefined (condition {condition:e})")]
    ProjectionUndefined { condition: f64 },

    #[error("functional is not in the open dual cone (min pairing {min_pairing:e})")]
    OutsideDualCone { min_pairing: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("element is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("fixed points inconsistent with the domain: {0}")]
    AutomorphismInconsistency(String),

    #[error("basepoint is fixed by the word {0}")]
    InvalidBasepoint(String),

    #[error("origin lies in the affine hull of simplices {simplices:?}")]
    TransversalityFailure { simplices: Vec<usize> },

    #[error("adjacent simplices {0} and {1} are coplanar")]
    Coplanarity(usize, usize),

    #[error("generic-convexity certification failed: {0}")]
    NotCertified(String),

    #[error("PL approximation failed: {0}")]
    ApproximationFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable identifier for reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::AtInfinity => "at-infinity",
            Error::DegeneratePencil => "degenerate-pencil",
            Error::NotProperlyConvex { .. } => "not-properly-convex",
            Error::DegenerateChord => "degenerate-chord",
            Error::NotOnFrontier { .. } => "not-on-frontier",
            Error::InfiniteDistance => "infinite-distance",
            Error::ProjectionUndefined { .. } => "projection-undefined",
            Error::OutsideDualCone { .. } => "outside-dual-cone",
            Error::ConvergenceFailure { .. } => "convergence-failure",
            Error::DegenerateDomain(_) => "degenerate-domain",
            Error::NotHyperbolic(_) => "not-hyperbolic",
            Error::AutomorphismInconsistency(_) => "automorphism-inconsistency",
            Error::InvalidBasepoint(_) => "invalid-basepoint",
            Error::TransversalityFailure { .. } => "transversality-failure",
            Error::Coplanarity(..) => "coplanarity",
            Error::NotCertified(_) => "not-certified",
            Error::ApproximationFailure(_) => "approximation-failure",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
