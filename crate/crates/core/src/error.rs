use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("eigensolver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e} relative to norm)")]
    NotHermitian { deviation: f64 },

    #[error("Kraus set violates canonical form (max deviation {deviation:e})")]
    NotCanonical { deviation: f64 },

    #[error("every eigenvalue of the transfer matrix is peripheral; spectral gap undefined")]
    DegenerateSpectrum,

    #[error("transfer matrix has no eigenvalue within tolerance of 1")]
    NoFixedPoint,

    #[error("fixed-point positivization removed {clipped:e} of the total weight")]
    NotPositive { clipped: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("explicit density matrix of dimension {dim} exceeds the cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("eigenvalues at the spectral-gap magnitude are nearly degenerate; Jordan constants unavailable")]
    NearDegenerate,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no |B| up to {limit} satisfies the sufficient conditions")]
    ScanRangeExceeded { limit: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("QCMI already below 1e-{k} at |B| = 2")]
    EmptyCurve { k: u32 },

    #[error("need at least {needed} curve points, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("benchmark failed: {quantity} = {actual:.17e}, expected {expected:.17e} (tolerance {tolerance:e})")]
    BenchmarkFailed {
        quantity: String,
        expected: f64,
        actual: f64,
        tolerance: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Numerical failures (as opposed to degenerate or invalid inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NotHermitian { .. } | Error::NotPositive { .. } | Error::Singular
        )
    }
}
