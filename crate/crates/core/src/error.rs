use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by estimation, selection and ingestion routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("predictor and response lengths differ ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("predictor value at index {index} is not finite")]
    NonFinitePredictor { index: usize },

    #[error("response at index {index} is {value}, expected 0 or 1")]
    NonBinaryResponse { index: usize, value: f64 },

    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("probability must lie strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),

    #[error("invalid count: {successes} successes out of {trials} trials")]
    InvalidCount { successes: u64, trials: u64 },

    #[error("no kernel weight reaches x = {x} with h = {h}")]
    NoLocalData { x: f64, h: f64 },

    #[error("effective sample size is zero")]
    ZeroEffectiveSample,

    #[error("no admissible bandwidth in the search grid")]
    NoValidBandwidth,

    #[error("all predictor values are equal")]
    DegenerateSample,

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("logistic fit diverged (complete or quasi-complete separation)")]
    Separation,

    #[error("all responses are identical; the logistic model is not identifiable")]
    DegenerateResponses,

    #[error("information matrix is singular")]
    SingularInformation,

    #[error("logistic fit did not converge")]
    NotConverged,

    #[error("goodness-of-fit needs more than 2 covariate groups, got {0}")]
    TooFewGroups(usize),

    #[error("missing or malformed header in {path}: expected `{expected}`")]
    Schema { path: String, expected: String },

    #[error("line {line}, column `{column}`: {reason}")]
    Parse {
        line: u64,
        column: String,
        reason: String,
    },

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
