use thiserror::Error;

/// Everything that can go wrong across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    Asymmetric { row: usize, col: usize },

    #[error("matrix data has {got} entries, expected {expected}")]
    BadShape { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("expected nullity 1, found {nullity}")]
    NullityNotOne { nullity: usize },

    #[error("invalid squared edge lengths: {0}")]
    InvalidLengths(String),

    #[error("invalid face: {0}")]
    InvalidFace(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("no Euclidean simplex has these squared edge lengths (smallest Gram eigenvalue {smallest_eigenvalue:e})")]
    NotRealizable { smallest_eigenvalue: f64 },

    #[error("facet opposite vertex {0} is degenerate")]
    DegenerateFacet(usize),

    #[error("cofactor for vertex {0} is too close to zero")]
    NearZeroCofactor(usize),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("face of dimension {k} has zero volume")]
    ZeroFaceVolume { k: usize },

    #[error("objective face dimension {k} out of range 1..={n}")]
    BadObjective { k: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampled point at t = {t} is not a valid simplex")]
    ProbeLeftCone { t: f64 },

    #[error("optimizer hit the iteration cap ({0})")]
    MaxIterations(usize),

    #[error("line search exhausted at iteration {iteration}: every trial step left the valid region or failed to ascend")]
    StepIntoInvalidRegion { iteration: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
