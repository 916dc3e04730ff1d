use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("state is not normalized (norm {norm:.15})")]
    NotNormalized { norm: f64 },

    #[error("basis is not orthonormal (Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("times are not strictly increasing at index {index}")]
    NonMonotoneTimes { index: usize },

    #[error("a history needs at least 2 fixed points, got {0}")]
    TooFewPoints(usize),

    #[error("schedule pieces do not tile a contiguous interval at piece {index}")]
    ScheduleGap { index: usize },

    #[error("time {t} lies outside schedule coverage [{start}, {end}]")]
    OutsideCoverage { t: f64, start: f64, end: f64 },

    #[error("length mismatch: {left} times vs {right} bases")]
    LengthMismatch { left: usize, right: usize },

    #[error("selection index {index} out of range for basis of size {size}")]
    SelectionOutOfRange { index: usize, size: usize },

    #[error("fixed point times must satisfy {0}")]
    TimeOrder(&'static str),

    #[error("delta psi is not a non-negative real number: {re:e}{im:+e}i")]
    RealnessViolation { re: f64, im: f64 },

    #[error("schedule has a branch-dependent Hamiltonian; measures cannot be normalized")]
    BranchDependent,

    #[error("post-selection is unreachable from the preparation (normalizer {normalizer:e})")]
    ImpossiblePostSelection { normalizer: f64 },

    #[error("normalizer {normalizer:e} is degenerate; outcome set is not a complete basis")]
    DegenerateNormalizer { normalizer: f64 },

    #[error("oracle denominator vanishes")]
    ZeroDenominator,

    #[error("instance too large for brute-force evaluation: {0}")]
    TooLarge(String),

    #[error("internal numerical check failed: {0}")]
    NumericalCheck(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Machine-readable code for domain errors surfaced at the command line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RealnessViolation { .. } | Error::BranchDependent => "REALNESS_VIOLATION",
            Error::ImpossiblePostSelection { .. } => "IMPOSSIBLE_POST_SELECTION",
            Error::DegenerateNormalizer { .. } => "DEGENERATE_NORMALIZER",
            Error::ZeroDenominator => "ZERO_DENOMINATOR",
            Error::NumericalCheck(_) => "NUMERICAL_CHECK_FAILED",
            _ => "VALIDATION_ERROR",
        }
    }

    /// True for the three measure-module errors that indicate a physically
    /// meaningless query rather than malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::RealnessViolation { .. }
                | Error::BranchDependent
                | Error::ImpossiblePostSelection { .. }
                | Error::DegenerateNormalizer { .. }
        )
    }
}
