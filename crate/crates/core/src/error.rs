use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// One side of a negative/positive comparison has no scores.
    #[error("undefined AUC: empty {side} side")]
    EmptySide { side: &'static str },

    #[error("score {score} is not a finite value in [0, 1]")]
    ScoreOutOfRange { score: f64 },

    #[error("score is NaN")]
    NanScore,

    #[error("duplicate example id `{0}`")]
    DuplicateId(String),

    #[error("invalid subgroup tag `{0}`")]
    InvalidTag(String),

    #[error("unknown subgroup `{0}`")]
    UnknownSubgroup(String),

    #[error("unsatisfiable sample policy: requested {requested} from a pool of {available} without replacement")]
    UnsatisfiablePolicy { requested: usize, available: usize },

    #[error("invalid pinned set: {0}")]
    InvalidPinnedSet(String),

    #[error("invalid template `{pattern}`: {reason}")]
    InvalidTemplate { pattern: String, reason: String },

    #[error("invalid template spec: {0}")]
    InvalidTemplateSpec(String),

    #[error("unknown term `{0}`")]
    UnknownTerm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closed form unavailable for the {0} family")]
    UnsupportedFamily(&'static str),

    #[error("no negative/positive pairs (N = 0)")]
    ZeroPairs,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: {message}")]
    Range {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate id `{id}` (first on line {first_line})")]
    DuplicateRecord {
        path: PathBuf,
        line: usize,
        id: String,
        first_line: usize,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("remote scoring: {0}")]
    Remote(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
