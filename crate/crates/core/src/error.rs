//! Crate-wide error type.

use crate::panel::ActivityType;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Input file header or structure does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Duplicate (date, vendor, activity type) key in the input rows.
    #[error("duplicate row for ({date}, {vendor_id}, {activity_type})")]
    DuplicateRow {
        date: chrono::NaiveDate,
        vendor_id: String,
        activity_type: ActivityType,
    },

    /// Strict alignment requested but series ranges differ.
    #[error("alignment mismatch for activity types {0:?}")]
    Alignment(Vec<ActivityType>),

    /// No series supplied at all.
    #[error("no activity series supplied")]
    MissingActivityType,

    /// A date or window falls outside the available data.
    #[error("range error: {0}")]
    Range(String),

    /// Invalid configuration or parameter value.
    #[error("config error: {0}")]
    Config(String),

    /// Correlation is undefined because one input has zero variance.
    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    /// Too few observations for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Mismatched lengths or feature layout.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Optimizer produced a non-finite loss.
    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    /// A dataset build yielded zero eligible examples.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
