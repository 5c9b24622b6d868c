use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("operator {index} is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { index: usize, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation dimension {dim} is below the perturbation support {support}")]
    TruncationTooSmall { dim: usize, support: usize },

    #[error("integer overflow while computing the dimension budget")]
    Overflow,

    /// `needed` and `available` count frame columns, or ambient dimensions when
    /// a solve is refused below its budget.
    #[error("insufficient dimension: needed {needed}, available {available}")]
    InsufficientDimension { needed: usize, available: usize },

    #[error("pool too small: need {needed} columns, largest sign class has {largest}")]
    PoolTooSmall { needed: usize, largest: usize },

    #[error("blend hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("non-positive input at index {0}")]
    NonPositiveInput(usize),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("expected an even number of columns, found {0}")]
    OddColumns(usize),

    #[error("degenerate simplex")]
    DegenerateSimplex,

    #[error("point is not interior to the hull (margin {margin:e})")]
    NotInterior { margin: f64 },

    #[error("no interior: {0}")]
    NoInterior(String),

    #[error("target is not a cluster vector")]
    TargetNotCluster,

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::simplex_geometry::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedFile(_) => "MalformedFile",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::Overflow => "Overflow",
            Error::InsufficientDimension { .. } => "InsufficientDimension",
            Error::PoolTooSmall { .. } => "PoolTooSmall",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NonPositiveInput(_) => "NonPositiveInput",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::OddColumns(_) => "OddColumns",
            Error::DegenerateSimplex => "DegenerateSimplex",
            Error::NotInterior { .. } => "NotInterior",
            Error::NoInterior(_) => "NoInterior",
            Error::TargetNotCluster => "TargetNotCluster",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Whether the error means "no solution exists under these inputs" rather
    /// than "the inputs are wrong".
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InsufficientDimension { .. }
                | Error::PoolTooSmall { .. }
                | Error::NotInterior { .. }
                | Error::NoInterior(_)
        )
    }
}
