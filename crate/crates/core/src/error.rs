use thiserror::Error;

/// Reasons a breakpoint/value table is not the lift of a piecewise
/// monotone circle map.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("need at least two breakpoints, got {0}")]
    TooFewBreakpoints(usize),
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("first breakpoint must be 0, got {0}")]
    FirstBreakpoint(String),
    #[error("last breakpoint must be 1, got {0}")]
    LastBreakpoint(String),
    #[error("breakpoints not strictly increasing at index {index} ({prev} then {next})")]
    Unsorted {
        index: usize,
        prev: String,
        next: String,
    },
    #[error("f(0) = {0} is outside [0,1)")]
    StartOutOfRange(String),
    #[error("f(1) - f(0) = {0} is not an integer")]
    NonIntegerDegree(String),
    #[error("zero slope on segment {index} [{from}, {to}]")]
    ZeroSlope {
        index: usize,
        from: String,
        to: String,
    },
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// the input violates a documented precondition
    Precondition,
    /// a configured size cap was hit
    ResourceLimit,
    /// an internal cross-check failed; indicates a bug or an unsupported input
    Inconsistency,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid lift: {0}")]
    InvalidLift(#[from] LiftError),
    #[error("segment {index} is fixed pointwise (slope 1, integer offset)")]
    DegeneratePiece { index: usize },
    #[error("map is locally injective (no critical points)")]
    LocallyInjective,
    #[error("map is not surjective (lift range {0} < 1)")]
    NotSurjective(String),
    #[error("map is not Markov: critical value {0} is not a critical point")]
    NotMarkov(String),
    #[error("map does not give a simple algebra: {0}")]
    NotSimple(String),
    #[error("resource limit: {what} exceeded cap {cap}")]
    ResourceLimit { what: &'static str, cap: usize },
    #[error("signed index set D(±) changed between order {k} and {next}")]
    StabilityViolation { k: usize, next: usize },
    #[error("matrix does not leave the lattice invariant: {0}")]
    NotInvariant(String),
    #[error("label ({0}) is not in the index set")]
    LabelOutsideIndex(String),
    #[error("unit vector {0} is not in ker(I0 - U0)")]
    UnitNotInKernel(String),
    #[error("interval {0} has no critical-point-free lap")]
    NoValidSubinterval(String),
    #[error("partition check failed: {0}")]
    BadPartition(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidLift(_)
            | Error::DegeneratePiece { .. }
            | Error::LocallyInjective
            | Error::NotSurjective(_)
            | Error::NotMarkov(_)
            | Error::NotSimple(_) => ErrorClass::Precondition,
            Error::ResourceLimit { .. } => ErrorClass::ResourceLimit,
            Error::StabilityViolation { .. }
            | Error::NotInvariant(_)
            | Error::LabelOutsideIndex(_)
            | Error::UnitNotInKernel(_)
            | Error::NoValidSubinterval(_)
            | Error::BadPartition(_) => ErrorClass::Inconsistency,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
