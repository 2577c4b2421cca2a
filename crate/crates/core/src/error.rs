use thiserror::Error;

use crate::hilbert::Label;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero vector has no witness")]
    EmptyState,
    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("input {0} appears more than once")]
    DuplicateInput(Label),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("{value} lies outside {range}")]
    OutOfRange { value: String, range: String },
    #[error("({cos}, {sin}) is not a point on the unit circle")]
    NotOnUnitCircle { cos: Box<Label>, sin: Box<Label> },
    #[error("phase function slope must be nonzero")]
    DegeneratePhase,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
