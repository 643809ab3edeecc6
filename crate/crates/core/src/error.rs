use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    #[error("multiplicity is not invariant under the reflection group: {0}")]
    NonInvariantMultiplicity(String),

    #[error("reflection group exceeds the element cap of {cap}")]
    GroupCapExceeded { cap: usize },

    #[error("invalid quadrature specification: {0}")]
    InvalidQuadrature(String),

    #[error("non-finite integrand value at a point off the reflection hyperplanes")]
    NonFiniteSample,

    #[error("improper integral did not stabilise: |I(2R) - I(R)| = {delta:e}")]
    TruncationNotConverged { delta: f64 },

    #[error("no closed-form Dunkl kernel for this root system (need rank one or a product of rank-one systems)")]
    NoClosedForm,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("the Dunkl operator needs a gradient for this function")]
    MissingDerivative,

    #[error("invalid kernel specification: {0}")]
    InvalidKernel(String),

    #[error("two-point kernel is undefined on the orbit diagonal (d(x, y) = 0)")]
    OrbitDiagonal,

    #[error("degenerate set: zero measure")]
    DegenerateSet,

    #[error("no ball in the family contains the point")]
    UncoveredPoint,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel level {0} is not available in the level tables")]
    MissingLevel(i32),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("commutator did not converge within the level cap; differences: {diffs:?}")]
    NotConverged { diffs: Vec<f64> },
}
