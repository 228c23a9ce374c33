use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Text place comparison rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TextMode {
    /// Normalized, case-folded equality.
    #[default]
    Strict,
    /// Prediction must be a contiguous substring of the ground truth.
    Relaxed,
}

impl TextMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TextMode::Strict => "strict",
            TextMode::Relaxed => "relaxed",
        }
    }
}

impl std::str::FromStr for TextMode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(TextMode::Strict),
            "relaxed" => Ok(TextMode::Relaxed),
            other => Err(ModelError::InvalidConfig(format!("unknown text mode {other:?}"))),
        }
    }
}

/// Bucket of ground-truth box area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeBucket {
    All,
    Small,
    Medium,
    Large,
}

impl SizeBucket {
    pub const ALL: [SizeBucket; 4] = [
        SizeBucket::All,
        SizeBucket::Small,
        SizeBucket::Medium,
        SizeBucket::Large,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SizeBucket::All => "all",
            SizeBucket::Small => "S",
            SizeBucket::Medium => "M",
            SizeBucket::Large => "L",
        }
    }
}

/// Area boundaries splitting `[0, inf)` into small `[0, small_below)`,
/// medium `[small_below, large_from)` and large `[large_from, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeBuckets {
    pub small_below: f64,
    pub large_from: f64,
}

impl Default for SizeBuckets {
    fn default() -> Self {
        Self {
            small_below: 32.0 * 32.0,
            large_from: 96.0 * 96.0,
        }
    }
}

impl SizeBuckets {
    pub fn contains(&self, bucket: SizeBucket, area: f64) -> bool {
        match bucket {
            SizeBucket::All => true,
            SizeBucket::Small => area < self.small_below,
            SizeBucket::Medium => area >= self.small_below && area < self.large_from,
            SizeBucket::Large => area >= self.large_from,
        }
    }

    pub fn classify(&self, area: f64) -> SizeBucket {
        if area < self.small_below {
            SizeBucket::Small
        } else if area < self.large_from {
            SizeBucket::Medium
        } else {
            SizeBucket::Large
        }
    }
}

/// Evaluation knobs. Every report echoes the instance it was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub text_mode: TextMode,
    /// Cosine-similarity cutoff for symbol places (inclusive).
    pub symbol_threshold: f64,
    /// Single IoU thresholds reported as separate AP rows.
    pub ap_thresholds: Vec<f64>,
    /// Range threshold grid `start..=end` with `step`, averaged for AP/AR.
    pub iou_range_start: f64,
    pub iou_range_end: f64,
    pub iou_range_step: f64,
    pub max_dets: Vec<usize>,
    pub size_buckets: SizeBuckets,
    /// IoU gate between predicted and ground-truth boxes for end-to-end scoring.
    pub e2e_iou: f64,
    /// Count predictions matched to no ground truth in the sign-precision denominator.
    pub e2e_count_unmatched: bool,
    /// Embedding provider id used for symbol equivalence.
    pub embedder: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            text_mode: TextMode::Strict,
            symbol_threshold: 0.8,
            ap_thresholds: vec![0.5, 0.75],
            iou_range_start: 0.25,
            iou_range_end: 0.75,
            iou_range_step: 0.05,
            max_dets: vec![1, 10, 100],
            size_buckets: SizeBuckets::default(),
            e2e_iou: 0.5,
            e2e_count_unmatched: false,
            embedder: crate::matching::MOCK_EMBEDDER_ID.to_string(),
        }
    }
}

impl EvalConfig {
    /// The range grid, snapped to 1e-6 so `0.25 + 2*0.05` prints as `0.35`.
    pub fn iou_thresholds(&self) -> Vec<f64> {
        let start = (self.iou_range_start * 1e6).round() as i64;
        let end = (self.iou_range_end * 1e6).round() as i64;
        let step = (self.iou_range_step * 1e6).round() as i64;
        if step <= 0 || end < start {
            return vec![self.iou_range_start];
        }
        (0..)
            .map(|k| start + k * step)
            .take_while(|v| *v <= end)
            .map(|v| v as f64 / 1e6)
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidConfig(msg));
        if !(self.symbol_threshold > 0.0 && self.symbol_threshold <= 1.0) {
            return bad(format!("symbol_threshold {} outside (0,1]", self.symbol_threshold));
        }
        let open_unit = |t: f64| t > 0.0 && t < 1.0;
        for t in self
            .ap_thresholds
            .iter()
            .chain([&self.iou_range_start, &self.iou_range_end, &self.e2e_iou])
        {
            if !open_unit(*t) {
                return bad(format!("IoU threshold {t} outside (0,1)"));
            }
        }
        if self.iou_range_step.is_nan() || self.iou_range_step <= 0.0 || self.iou_range_end < self.iou_range_start {
            return bad("IoU range must have start <= end and a positive step".into());
        }
        let grid = self.iou_thresholds();
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("IoU thresholds must be strictly increasing".into());
        }
        if self.max_dets.is_empty() || self.max_dets.contains(&0) {
            return bad("max_dets must be a non-empty list of positive integers".into());
        }
        let sb = self.size_buckets;
        if !(sb.small_below > 0.0 && sb.small_below < sb.large_from && sb.large_from.is_finite()) {
            return bad(format!(
                "size buckets need 0 < small_below < large_from, got {} and {}",
                sb.small_below, sb.large_from
            ));
        }
        if self.embedder.trim().is_empty() {
            return bad("embedder id is empty".into());
        }
        Ok(())
    }
}
