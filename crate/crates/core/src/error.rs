//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by data ingestion, model fitting, estimation, inference,
/// and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value error at row {row}: {msg}")]
    Value { row: usize, msg: String },
    #[error("design matrix is rank deficient (singular information matrix)")]
    RankDeficient,
    #[error("separation detected: coefficients diverging with probabilities pinned at 0/1")]
    Separation,
    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged { what: String, iterations: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate estimand: {0}")]
    DegenerateEstimand(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("singular jacobian while solving {0}")]
    SingularJacobian(String),
    #[error("invalid probability in data generation: {0}")]
    InvalidProbability(String),
    #[error("unknown scenario id {0} (valid: 1..=8)")]
    UnknownScenario(u32),
    #[error("too many bootstrap failures: {failed} of {total} replicates")]
    TooManyFailures { failed: usize, total: usize },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable process exit code for the CLI; one code per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            Error::Csv(_) => 3,
            Error::Schema(_) => 4,
            Error::Value { .. } => 5,
            Error::RankDeficient => 6,
            Error::Separation => 7,
            Error::NotConverged { .. } => 8,
            Error::DimensionMismatch(_) => 9,
            Error::DegenerateEstimand(_) => 10,
            Error::DegenerateData(_) => 11,
            Error::SingularJacobian(_) => 12,
            Error::InvalidProbability(_) => 13,
            Error::UnknownScenario(_) => 14,
            Error::TooManyFailures { .. } => 15,
            Error::Config(_) => 16,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
