use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample needs at least {needed} observations, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("sample contains a non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("all observations are equal")]
    ConstantSample,

    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel derivative of order {0} is not implemented (supported: 4, 6)")]
    UnsupportedDerivative(u32),

    #[error("kernel estimators are built on different samples")]
    SampleMismatch,

    #[error("no sign change of the bandwidth equation on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("non-positive density functional estimate {value} at pilot bandwidth {pilot}")]
    NonPositiveFunctional { value: f64, pilot: f64 },

    #[error("curvature estimate {gamma_hat} is not positive (pilot bandwidth {pilot})")]
    DegenerateCurvature { gamma_hat: f64, pilot: f64 },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("{got} weights requested but enumeration supports at most {max}")]
    TooManyExperts { got: usize, max: usize },

    #[error("duplicate bandwidth label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown {kind} {name:?}; expected one of: {expected}")]
    UnknownName {
        kind: &'static str,
        name: String,
        expected: String,
    },

    #[error("density {0} has no second-derivative implementation")]
    MissingSecondDerivative(String),
}

impl Error {
    /// Short machine-readable reason, used in failure records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SampleTooSmall { .. } => "sample_too_small",
            Error::NonFinite { .. } => "non_finite",
            Error::ConstantSample => "constant_sample",
            Error::InvalidBandwidth(_) => "invalid_bandwidth",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnsupportedDerivative(_) => "unsupported_derivative",
            Error::SampleMismatch => "sample_mismatch",
            Error::NoBracket { .. } => "no_bracket",
            Error::NonPositiveFunctional { .. } => "non_positive_functional",
            Error::DegenerateCurvature { .. } => "degenerate_curvature",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::TooManyExperts { .. } => "too_many_experts",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::UnknownName { .. } => "unknown_name",
            Error::MissingSecondDerivative(_) => "missing_second_derivative",
        }
    }
}
