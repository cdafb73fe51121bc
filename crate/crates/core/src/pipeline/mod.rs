//! Leakage-safe dataset preparation.
//!
//! Order of operations is fixed: split first, then fit the scaler (and,
//! when configured, PCA) on training rows only, then apply the fitted
//! transforms to both partitions. Fitted transforms are immutable and
//! safely shareable across threads.

pub mod dataset;
pub mod pca;
pub mod scaler;
pub mod split;

use std::path::PathBuf;

use thiserror::Error;

pub use dataset::Dataset;
pub use pca::PcaModel;
pub use scaler::Scaler;
pub use split::{stratified_split, stratified_split_by_experiment, Split, SplitMode};

/// Dataset preparation failure.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("only one class present; cannot stratify or train")]
    SingleClass,
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("k = {k} exceeds the maximum {max} for this matrix")]
    KTooLarge { k: usize, max: usize },
    #[error("PCA mask selects no columns")]
    EmptyMask,
    #[error("family '{0}' has no columns in this schema")]
    UnknownFamily(String),
    #[error("row/label/id counts disagree: {rows} rows, {labels} labels, {ids} ids")]
    LengthMismatch { rows: usize, labels: usize, ids: usize },
    #[error("matrix contains non-finite values")]
    NonFinite,
    #[error("column count {got} does not match fitted width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("{path}:{line}: {reason}")]
    Csv { path: PathBuf, line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
