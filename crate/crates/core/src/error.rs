//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, GptError>;

#[derive(Debug, Clone, Error)]
pub enum GptError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("pairing {value} outside [0,1] beyond tolerance")]
    OutOfRange { value: f64 },

    #[error("map output fails the cone oracle (margin {margin:.3e})")]
    NotAState { margin: f64 },

    #[error("LP solver did not converge: {0}")]
    LpNumericalFailure(String),

    #[error("effect is not proportional to an atomic effect: {0}")]
    NotFineGrained(String),

    #[error("effect is not atomic: {0}")]
    NotAtomic(String),

    #[error("state is not pure: {0}")]
    NotPure(String),

    #[error("no filter exists for this face: {0}")]
    NotProjective(String),

    #[error("supplied effects do not form a basis")]
    NotABasis,

    #[error("no decomposition into perfectly distinguishable pure states: {0}")]
    DecompositionUnavailable(String),

    #[error("operation not supported for this model: {0}")]
    ModelUnsupported(String),

    #[error("grid violates the required bounds: {0}")]
    GridOutOfBounds(String),

    #[error("filter units do not sum to the order unit (deviation {0:.3e})")]
    FiltersIncomplete(f64),

    #[error("no reversible map takes the given pure state to the target")]
    NoReversibleMap,

    #[error("face lattice too large to enumerate ({0} faces)")]
    LatticeTooLarge(usize),

    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudgetExceeded(String),

    #[error("vertices are not full-dimensional (affine hull has dimension {hull_dim})")]
    DegenerateInput { hull_dim: usize },

    #[error("inner product matrix is singular")]
    SingularInnerProduct,

    #[error("point is not in the cone (margin {margin:.3e})")]
    NotInCone { margin: f64 },

    #[error("functional is not permutation symmetric (deviation {0:.3e})")]
    AsymmetricFunction(f64),

    #[error("invalid axis length: {0}")]
    InvalidAxis(f64),

    #[error("matrix entry {value:.3e} is negative beyond tolerance")]
    NegativeEntry { value: f64 },

    #[error("{0}")]
    Invalid(String),
}
