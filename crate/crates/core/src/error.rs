use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom {index} has non-positive weight {weight}")]
    DegenerateAtom { index: usize, weight: f64 },
    #[error("probability space has no atoms")]
    EmptySpace,
    #[error("objects live on different probability spaces")]
    SpaceMismatch,
    #[error("empty family")]
    EmptyFamily,
    #[error("expected {expected} pieces, got {got}")]
    PieceCountMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("expected {expected} atom entries, got {got}")]
    AtomCountMismatch { expected: usize, got: usize },
    #[error("non-finite value at atom {0}")]
    NonFinite(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("atom index {0} out of range")]
    InvalidAtom(usize),
    #[error("ball radius must be positive at every atom")]
    NonPositiveRadius,
    #[error("empty section at atom {0}")]
    EmptySection(usize),
    #[error("epsilon must be positive at every atom")]
    BadEpsilon,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("prefix exhausted while satisfying rate {k} at atom {atom}")]
    PrefixExhausted { k: usize, atom: usize },
    #[error("rates must be positive and nonincreasing at every atom")]
    InvalidRates,
    #[error("random index entries must be at least 1")]
    InvalidIndex,
    #[error("weights are not convex at atom {0}")]
    NotConvexWeights(usize),
    #[error("point lies outside the enlargement on atoms {0:?}")]
    OutsideEnlargement(Vec<usize>),
    #[error("mapping leaves its domain at atom {atom} (excess {excess:e})")]
    NotSelfMap { atom: usize, excess: f64 },
    #[error("no convergence, best residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("certificate violation: {0}")]
    CertificateViolation(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("contraction modulus must lie in [0, 1) at every atom")]
    BadModulus,
}
