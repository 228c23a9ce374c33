//! Detection, recognition and end-to-end metrics.
//!
//! Counting metrics are kept as [`Fraction`]s; detection AP/AR are
//! computed over any [`Scalar`](crate::Scalar), exactly for [`Exact`].

mod detection;
mod e2e;
mod fraction;
mod recognition;

pub use detection::{
    detection_ap, detection_ar, detection_report, evaluate_detection, DetMetric, DetectionReport, DetectionRow,
    IouSetting, ThresholdEval,
};
pub use e2e::{e2e_sign_metrics, E2EReport};
pub use fraction::Fraction;
pub use recognition::{
    aggregated_precision_recall, evaluate_recognition, per_kind_success_rate, per_sign_success_rate, CueCounts,
    KindScores, ModeScores, RecognitionReport, SignOutcome,
};

use crate::scalar::Exact;

/// Renders an optional metric with `decimals` places, or `n/a`.
pub fn format_value(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) => format!("{v:.decimals$}"),
        None => "n/a".to_string(),
    }
}

/// Exact value as `p/q` text.
pub fn exact_to_string(value: &Exact) -> String {
    value.to_string()
}
