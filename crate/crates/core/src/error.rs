use thiserror::Error;

/// Errors raised by the geometric primitives and the iteration drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs do not belong to the space, or a point violates its variant invariant.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two spherical points are (nearly) antipodal, so the geodesic between them is not unique.
    #[error("geodesic between points at distance {distance} is not unique")]
    NonUniqueGeodesic { distance: f64 },

    /// A comparison triangle does not exist for the requested side lengths.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A projection was requested too far from the target set.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// `A = B` or `C = D` (or their product of lengths is below the rejection threshold).
    #[error("degenerate quadruple: {0}")]
    DegenerateQuadruple(String),

    /// Some pairwise distance of a quadruple reaches pi/2.
    #[error("quadruple out of regime: max pairwise distance {max_distance} >= pi/2")]
    OutOfRegime { max_distance: f64 },

    /// The fixed-point oracle failed to contract.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A hypothesis of the convergence theorem (or a sequence condition) does not hold.
    #[error("config error [{hypothesis}]: {detail}")]
    Config { hypothesis: String, detail: String },

    /// An iterate left the admissible region during a run.
    #[error("runtime invariant violated at n = {step}: {detail}")]
    RuntimeInvariant { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(hypothesis: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            hypothesis: hypothesis.into(),
            detail: detail.into(),
        }
    }
}
