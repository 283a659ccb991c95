use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A jump intensity with infinite total mass was handed to a consumer
    /// that only simulates finitely many events per unit time.
    #[error("jump intensity has infinite total mass: {0}")]
    InfiniteIntensity(String),

    #[error("adaptive quadrature exceeded {limit} subdivisions (estimated error {error:e})")]
    QuadratureCap { limit: usize, error: f64 },

    #[error("non-finite rate: {0}")]
    NonFiniteRate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
