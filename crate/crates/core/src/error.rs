//! Error type shared across the crate.

use crate::ids::UserId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A coordinate or other numeric input is outside its valid range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Midpoint of an empty point list.
    #[error("midpoint requires at least one point")]
    EmptyMidpoint,

    /// The points average to a (near-)zero vector, so no midpoint exists.
    #[error("degenerate midpoint: points cancel out on the sphere")]
    DegenerateMidpoint,

    /// Bad configuration: overlapping windows, impossible strategy sizes, ...
    #[error("configuration error: {0}")]
    Config(String),

    /// Data integrity violation: venue without a city, duplicate pair, ...
    #[error("data error: {0}")]
    Data(String),

    /// A linear system could not be solved.
    #[error("numerical error solving row for user {user:?}: {detail}")]
    Numerical {
        user: Option<UserId>,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class: 2 config, 3 data/io, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerical { .. } => 4,
            _ => 3,
        }
    }
}
