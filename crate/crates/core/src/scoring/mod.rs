//! Metrics over a dataset and prediction files, and table-shaped reports.
//!
//! All ratios are exact ([`Tally`] counts, [`Percent`] rationals); rounding
//! to one decimal happens only when a report is rendered.

mod fol;
mod metrics;
mod qa;
mod report;

pub use fol::{score_fol, taxonomy_keys, FolMetrics, FolPrediction, MISSING, UNPARSEABLE};
pub use metrics::{Percent, Tally};
pub use qa::{score_predarg_from_qa, score_qa, Frame, PredArgQaMetrics, PredictedAnswer, QaMetrics, QaPrediction};
pub use report::{emit_report, merge_reports, DatasetMetrics, MergeError, MetricsReport, ReportFormat, CSV_COLUMNS};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("prediction for unknown question '{0}'")]
    UnknownQuestionId(String),
    #[error("prediction for unknown instance '{0}'")]
    UnknownInstanceId(String),
    #[error("more than one prediction for '{0}'")]
    DuplicatePrediction(String),
    #[error("gold formula of {instance_id} is unusable: {message}")]
    BadGold { instance_id: String, message: String },
}
