use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable name `{0}` already used in chart")]
    NameCollision(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("unsupported substitution: {0}")]
    UnsupportedSubstitution(String),
    #[error("operator is not skew-symmetric: {0}")]
    NotSkew(String),
    #[error("not a base chart: {0}")]
    NotBaseChart(String),
    #[error("missing fiber variables: {0}")]
    MissingFiber(String),
    #[error("function is not fiber-linear: {0}")]
    NotLinear(String),
    #[error("not a polynomial in the fiber variables: {0}")]
    NonPolynomialFiber(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
