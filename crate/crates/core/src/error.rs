use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the field's domain box")]
    OutOfDomain { point: Vec<f64> },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("|grad f| = {grad_norm:e} is below the regular-point floor {floor:e}")]
    CriticalPoint { grad_norm: f64, floor: f64 },
    #[error("check requires dimension {expected}, instance has dimension {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("warping function is non-positive (phi = {phi:e})")]
    PhiNonPositive { phi: f64 },
    #[error("radius {r} is outside the profile range [{lo}, {hi}]")]
    OutOfProfileRange { r: f64, lo: f64, hi: f64 },
    #[error("profile has {nodes} interior nodes, at least {needed} needed")]
    ProfileTooShort { nodes: usize, needed: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
