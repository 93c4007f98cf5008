use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{x} lies outside the support [{lower}, {upper}]")]
    Domain { x: f64, lower: f64, upper: f64 },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("every candidate is flagged out of bounds")]
    AllOutOfBounds,

    #[error("budget exceeded: requested {requested}, remaining {remaining}")]
    OverBudget { requested: f64, remaining: f64 },

    #[error("all sanitized proportions are zero; cannot renormalize")]
    DegenerateNormalization,

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
