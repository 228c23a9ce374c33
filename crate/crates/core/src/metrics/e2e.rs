use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Fraction;
use crate::dataset::{Dataset, PredictionSet};
use crate::error::EmbedError;
use crate::matching::{match_cue_sets, match_detections, EmbeddingProvider, MatchRule};
use crate::model::{BBox, EvalConfig, SignPrediction, TextMode};
use crate::scalar::Exact;

/// Sign-level scores of the detect-then-parse pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2EReport {
    pub iou_threshold: f64,
    pub text_mode: TextMode,
    pub symbol_threshold: f64,
    pub count_unmatched: bool,
    /// Readable ground-truth signs detected and parsed exactly.
    pub perfect: u64,
    /// Predictions assigned to a readable ground-truth sign.
    pub assigned_readable: u64,
    /// Predictions assigned to an unreadable sign; excluded from both scores.
    pub assigned_unreadable: u64,
    /// Predictions assigned to no ground-truth sign.
    pub unmatched_predictions: u64,
    pub readable_ground_truth: u64,
    pub precision_sign: Fraction,
    pub recall_sign: Fraction,
}

/// Boxes are matched greedily at `cfg.e2e_iou`; a matched readable sign is
/// perfect when its cue matching under `cfg` pairs every cue on both sides.
pub fn e2e_sign_metrics(
    dataset: &Dataset,
    predictions: &PredictionSet,
    cfg: &EvalConfig,
    provider: &dyn EmbeddingProvider,
) -> Result<E2EReport, EmbedError> {
    let rule = MatchRule::from(cfg);
    let mut images: BTreeMap<&str, (&[_], &[SignPrediction])> = BTreeMap::new();
    for img in &dataset.entries {
        images.insert(img.image_id.as_str(), (img.signs.as_slice(), &[]));
    }
    for entry in &predictions.entries {
        images.entry(entry.image_id.as_str()).or_insert((&[], &[])).1 = entry.signs.as_slice();
    }

    let mut perfect = 0u64;
    let mut assigned_readable = 0u64;
    let mut assigned_unreadable = 0u64;
    let mut unmatched = 0u64;
    let mut readable = 0u64;
    for (gt, preds) in images.values() {
        readable += gt.iter().filter(|s| s.readable).count() as u64;
        let boxes: Vec<BBox> = gt.iter().map(|s| s.bbox.clone()).collect();
        let m = match_detections::<Exact>(&boxes, preds, cfg.e2e_iou);
        unmatched += m.unmatched_pred.len() as u64;
        for (p, g, _) in &m.assignments {
            let sign = &gt[*g];
            if !sign.readable {
                assigned_unreadable += 1;
                continue;
            }
            assigned_readable += 1;
            if match_cue_sets(&sign.cues, &preds[*p].cues, &rule, provider)?.is_perfect() {
                perfect += 1;
            }
        }
    }
    if unmatched > 0 {
        log::info!("{unmatched} predicted signs matched no ground-truth box");
    }

    let denominator = assigned_readable + if cfg.e2e_count_unmatched { unmatched } else { 0 };
    Ok(E2EReport {
        iou_threshold: cfg.e2e_iou,
        text_mode: cfg.text_mode,
        symbol_threshold: cfg.symbol_threshold,
        count_unmatched: cfg.e2e_count_unmatched,
        perfect,
        assigned_readable,
        assigned_unreadable,
        unmatched_predictions: unmatched,
        readable_ground_truth: readable,
        precision_sign: Fraction::new(perfect, denominator),
        recall_sign: Fraction::new(perfect, readable),
    })
}
