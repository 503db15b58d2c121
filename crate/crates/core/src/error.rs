use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (deviation {0:e})")]
    NotNormalized(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("POVM element eigenvalue {0} outside [0, 1]")]
    InvalidPovmElement(f64),

    #[error("invalid projection-valued measure: {0}")]
    InvalidPvm(String),

    #[error("purity {0} outside [0, 1]")]
    PurityOutOfRange(f64),

    #[error("post-selection probability {0:e} is numerically zero")]
    VanishingPostSelection(f64),

    #[error("response denominator {0:e} is numerically zero")]
    DegenerateDenominator(f64),

    #[error("observable does not square to a multiple of identity (deviation {0:e})")]
    NonInvolutory(f64),

    #[error("spread of the coupled meter variable must be positive, got {0}")]
    NonPositiveSpread(f64),

    #[error("basis is not orthonormal (deviation {0:e})")]
    NonOrthonormalBasis(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("<F^2> vanishes")]
    ZeroSecondMoment,

    #[error("mean of the coupled meter variable vanishes")]
    ZeroMean,

    #[error("measurement angles are degenerate (difference {0:e} mod pi)")]
    DegenerateAngles(f64),

    #[error("no real root")]
    NoRoot,

    #[error("root selection is ambiguous")]
    AmbiguousRoot,

    #[error("quantity not measurable with these meters: {0}")]
    Unmeasurable(String),

    #[error("zero deflection: ensemble size is infinite")]
    InfiniteEnsemble,

    #[error("zero overlap between pre- and post-selected states")]
    ZeroOverlap,

    #[error("unsupported meter: {0}")]
    UnsupportedMeter(String),

    #[error("grid too coarse: tail mass {0:e}")]
    GridTooCoarse(f64),

    #[error("product dimension {0} exceeds limit")]
    DimensionOverflow(usize),

    #[error("no sample accepted after {0} trials")]
    ZeroAcceptance(u64),

    #[error("profile is not bell-shaped at its maximum")]
    NonBellProfile,

    #[error("profile cannot be normalized")]
    UnnormalizableProfile,

    #[error("eigendecomposition failed")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
