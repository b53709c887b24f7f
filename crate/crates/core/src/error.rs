use thiserror::Error;

/// Errors produced by tree, map, sampler and statistics operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("malformed contour: {0}")]
    MalformedContour(String),

    #[error("inconsistent labels: {0}")]
    InconsistentLabels(String),

    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("Euler characteristic {chi} does not give an integer genus")]
    NonIntegerGenus { chi: i64 },

    #[error("not a quadrangulation: {0}")]
    NotQuadrangulation(String),

    #[error("labeled tree is not well labeled: {0}")]
    NotWellLabeled(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rejection budget of {attempts} attempts exceeded")]
    RejectionBudgetExceeded { attempts: u64 },

    #[error("enumeration budget exceeded: n = {n} > {max}")]
    BudgetExceeded { n: usize, max: usize },

    #[error("empty sample")]
    EmptySample,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
