use thiserror::Error;

/// Everything that can go wrong while building, analysing or classifying a state.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("total dimension {0} exceeds the supported maximum of {1}")]
    TooLarge(usize, usize),

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {min:.3e}, max {max:.3e})")]
    NotPositive { min: f64, max: f64 },

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("subset mask {0:#b} addresses parties outside 1..={1}")]
    InvalidSubset(u32, usize),

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("eigendecomposition failed")]
    EigFailure,

    #[error("every party has a rank-one reduced state")]
    AllPartiesTrivial,

    #[error("vector is zero")]
    ZeroVector,

    #[error("state is the zero operator")]
    ZeroState,

    #[error("operation requires a bipartite state, got {0} parties")]
    NotBipartite(usize),

    #[error("basis rows are linearly dependent")]
    RankDeficientBasis,

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("index {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),

    #[error("no Chow form available for system {0:?}")]
    UnsupportedSystem(Vec<usize>),

    #[error("map is not a bijection on 1..={0}")]
    NotBijective(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("subspace has dimension {got}, the Chow form needs {expected}")]
    WrongDimension { expected: usize, got: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("length bounds are only defined for separable verdicts")]
    NotSeparableVerdict,

    #[error("product vectors are linearly dependent")]
    DependentVectors,

    #[error("orthogonal complement is zero")]
    DegenerateComplement,

    #[error("invalid tolerance {0}: {1}")]
    InvalidTolerance(&'static str, f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
