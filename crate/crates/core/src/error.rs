use thiserror::Error;

/// Errors shared by the exact and floating-point halves of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix rows have unequal length or the matrix is not square")]
    NotSquare,

    #[error("matrix is not self-adjoint at entry ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("exact division leaves a remainder")]
    InexactDivision,

    #[error("variation step must be nonzero")]
    ZeroDelta,

    #[error("clock index {n} is outside the stored window [{lo}, {hi}]")]
    OutOfWindow { n: i64, lo: i64, hi: i64 },

    #[error("clock index {n} lies on the window boundary; no equation of motion is defined there")]
    BoundarySite { n: i64 },

    #[error("window must hold at least {required} slices, found {found}")]
    WindowTooSmall { required: usize, found: usize },

    #[error("trajectory violates the equation of motion at n = {n}")]
    NotASolution { n: i64 },

    #[error("factor trajectory for clock {clock} does not cover [{lo}, {hi}]")]
    WindowNotCovered { clock: usize, lo: i64, hi: i64 },

    #[error("trajectories must share the Hamiltonian and the clock window")]
    MismatchedTrajectories,

    #[error("clock window has no interior in direction {clock}")]
    DegenerateWindow { clock: usize },

    #[error("clock tuple {tuple:?} is outside the window")]
    TupleOutOfWindow { tuple: Vec<i64> },

    #[error("clock tuple {tuple:?} touches the window boundary")]
    BoundaryTuple { tuple: Vec<i64> },

    #[error("tensor shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("tensor axis {axis} is invalid for a rank-{rank} tensor")]
    InvalidAxis { axis: usize, rank: usize },

    #[error("bipartition leaves the {side} side empty")]
    EmptyBipartition { side: &'static str },

    #[error("initial slices are linearly dependent; the antisymmetric wave vanishes identically")]
    DependentInitialData,

    #[error("a composite with an interaction term cannot be marched as a single-clock recursion")]
    InteractionNotSupported,

    #[error("a multipartite system needs at least one subsystem")]
    NoSubsystems,

    #[error("integer value {value} does not convert to a float exactly")]
    PrecisionLoss { value: String },

    #[error("discreteness scale must be positive and finite")]
    NonPositiveScale,

    #[error("sample window is empty")]
    EmptyWindow,

    #[error("evaluation point {t} lies outside the reliable region [{lo}, {hi}]")]
    UnreliableRegion { t: f64, lo: f64, hi: f64 },

    #[error("mode frequency {omega} exceeds the band limit pi (in clock units)")]
    OutOfBand { omega: f64 },

    #[error("scale list must be nonempty and strictly positive")]
    BadScaleList,
}

pub type Result<T> = std::result::Result<T, CaError>;
