use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("invalid weights: |a|^2 + |b|^2 = {0} exceeds 1")]
    InvalidWeights(f64),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("coefficient p[{pattern}] = {value} is negative; alpha lies outside the admissible cone")]
    NotPositive { pattern: String, value: f64 },

    #[error("all coefficients vanish; cannot normalize")]
    ZeroSpec,

    #[error("radicand {0} is negative beyond roundoff; spec is not admissible")]
    NegativeRadicand(f64),

    #[error("construction not applicable: {0}")]
    Inapplicable(String),

    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),

    #[error("matrix is not an isometry (Gram deviation {0})")]
    NotIsometry(f64),

    #[error("invalid mixed state: {0}")]
    InvalidMixedState(String),

    #[error("spec fails the non-positive alpha criterion")]
    SpecNotSufficient,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl std::fmt::Debug, found: impl std::fmt::Debug) -> Self {
        Error::DimensionMismatch {
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        }
    }
}
