use serde::{Deserialize, Serialize};

use super::embedding::{cosine_similarity, embed, EmbeddingProvider};
use crate::error::EmbedError;
use crate::model::{EvalConfig, LabelKind, NavCue, TextMode};

/// The settings that decide whether two cues match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchRule {
    pub text_mode: TextMode,
    pub symbol_threshold: f64,
}

impl MatchRule {
    pub fn new(text_mode: TextMode, symbol_threshold: f64) -> Self {
        Self {
            text_mode,
            symbol_threshold,
        }
    }
}

impl From<&EvalConfig> for MatchRule {
    fn from(cfg: &EvalConfig) -> Self {
        Self::new(cfg.text_mode, cfg.symbol_threshold)
    }
}

/// Compares normalized places, ignoring case.
///
/// Strict requires equality. Relaxed accepts the prediction as any
/// contiguous substring of the ground truth, so strict matches are also
/// relaxed matches.
pub fn text_equivalent(gt_place: &str, pred_place: &str, mode: TextMode) -> bool {
    let gt = gt_place.to_lowercase();
    let pred = pred_place.to_lowercase();
    match mode {
        TextMode::Strict => gt == pred,
        TextMode::Relaxed => !pred.is_empty() && gt.contains(&pred),
    }
}

/// Symbol places match when their embeddings' cosine similarity reaches
/// `threshold` (inclusive).
pub fn symbol_equivalent(
    gt_place: &str,
    pred_place: &str,
    provider: &dyn EmbeddingProvider,
    threshold: f64,
) -> Result<bool, EmbedError> {
    let gt = embed(provider, gt_place)?;
    let pred = embed(provider, pred_place)?;
    Ok(cosine_similarity(&gt, &pred)? >= threshold)
}

/// Kind and direction must agree exactly; the place is compared by the
/// rule for its kind.
pub fn cue_match_predicate(
    gt: &NavCue,
    pred: &NavCue,
    rule: &MatchRule,
    provider: &dyn EmbeddingProvider,
) -> Result<bool, EmbedError> {
    if gt.kind != pred.kind || gt.direction != pred.direction {
        return Ok(false);
    }
    match gt.kind {
        LabelKind::Text => Ok(text_equivalent(&gt.place, &pred.place, rule.text_mode)),
        LabelKind::Symbol => symbol_equivalent(&gt.place, &pred.place, provider, rule.symbol_threshold),
    }
}
