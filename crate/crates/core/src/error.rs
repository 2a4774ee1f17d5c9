use thiserror::Error;

/// Errors raised by the analysis and synthesis routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("contact normal has (near) zero length")]
    ZeroNormal,
    #[error("cone discretization needs at least 3 edges, got {0}")]
    BadDiscretization(usize),
    #[error("grasp record has no hand Jacobian")]
    MissingJacobian,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("origin is not strictly inside the convex hull")]
    OriginOutside,
    #[error("point set too large for the brute-force oracle ({points} points in R^{dim})")]
    TooLarge { points: usize, dim: usize },
    #[error("Minkowski enumeration needs {count} combinations, above the cap of {cap}")]
    CombinatorialCap { count: u128, cap: u128 },
    #[error("task matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("pull trial {0} has no samples")]
    EmptyTrial(usize),
    #[error("displacements span only {rank} dimension(s); need 3")]
    RankDeficient { rank: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear program failed: {0}")]
    Numerical(&'static str),
    #[error("no force-closure grasp after {} iterations (best measure {})", .0.iterations, .0.final_measure)]
    NoConvergence(Box<crate::synthesis::SynthesisResult>),
}

pub type Result<T> = std::result::Result<T, Error>;
