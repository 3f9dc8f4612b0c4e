use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("cannot bisect a degenerate box")]
    DegenerateBox,

    #[error("unknown activation `{0}`")]
    UnknownActivation(String),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("uniform partition would need {cells} cells (limit {limit})")]
    TooManyCells { cells: f64, limit: f64 },

    #[error("sampling grid would need {points} points (limit {limit})")]
    GridTooLarge { points: f64, limit: f64 },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
