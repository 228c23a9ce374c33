use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::Fraction;
use crate::dataset::{Dataset, PredictionSet};
use crate::error::EmbedError;
use crate::matching::{match_cue_sets, CueMatching, EmbeddingProvider, MatchRule};
use crate::model::{EvalConfig, LabelKind, NavCue, TextMode};

/// One sign's cue lists and their matching.
#[derive(Debug, Clone)]
pub struct SignOutcome<'a> {
    pub gt: &'a [NavCue],
    pub pred: &'a [NavCue],
    pub matching: CueMatching,
}

impl SignOutcome<'_> {
    fn counts(&self, kind: Option<LabelKind>) -> CueCounts {
        let keep = |c: &NavCue| kind.is_none_or(|k| c.kind == k);
        CueCounts {
            matched: self.matching.pairs.iter().filter(|(g, _)| keep(&self.gt[*g])).count() as u64,
            predicted: self.pred.iter().filter(|c| keep(c)).count() as u64,
            ground_truth: self.gt.iter().filter(|c| keep(c)).count() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CueCounts {
    pub matched: u64,
    pub predicted: u64,
    pub ground_truth: u64,
}

impl CueCounts {
    pub fn precision(&self) -> Fraction {
        Fraction::new(self.matched, self.predicted)
    }

    pub fn recall(&self) -> Fraction {
        Fraction::new(self.matched, self.ground_truth)
    }

    fn add(&mut self, other: CueCounts) {
        self.matched += other.matched;
        self.predicted += other.predicted;
        self.ground_truth += other.ground_truth;
    }
}

/// Matched pairs over predicted and over ground-truth cues, pooled across
/// signs. `kind` restricts all three counts to cues of that kind.
pub fn aggregated_precision_recall(outcomes: &[SignOutcome], kind: Option<LabelKind>) -> CueCounts {
    let mut total = CueCounts::default();
    for o in outcomes {
        total.add(o.counts(kind));
    }
    total
}

/// Fraction of signs whose matching pairs every cue on both sides.
pub fn per_sign_success_rate(outcomes: &[SignOutcome]) -> Fraction {
    let perfect = outcomes.iter().filter(|o| o.matching.is_perfect()).count();
    Fraction::new(perfect as u64, outcomes.len() as u64)
}

/// Success restricted to one kind, over the signs that carry at least one
/// cue of that kind in the ground truth or the prediction.
pub fn per_kind_success_rate(outcomes: &[SignOutcome], kind: LabelKind) -> Fraction {
    let mut hits = 0;
    let mut total = 0;
    for o in outcomes {
        let c = o.counts(Some(kind));
        if c.ground_truth == 0 && c.predicted == 0 {
            continue;
        }
        total += 1;
        if c.matched == c.ground_truth && c.matched == c.predicted {
            hits += 1;
        }
    }
    Fraction::new(hits, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KindScores {
    pub counts: CueCounts,
    pub precision: Fraction,
    pub recall: Fraction,
    pub success_rate: Fraction,
}

impl KindScores {
    fn new(counts: CueCounts, success_rate: Fraction) -> Self {
        Self {
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            success_rate,
        }
    }
}

/// Scores under one text equivalence mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModeScores {
    pub text: KindScores,
    pub symbol: KindScores,
    pub overall: KindScores,
}

impl ModeScores {
    pub fn from_outcomes(outcomes: &[SignOutcome]) -> Self {
        Self {
            text: KindScores::new(
                aggregated_precision_recall(outcomes, Some(LabelKind::Text)),
                per_kind_success_rate(outcomes, LabelKind::Text),
            ),
            symbol: KindScores::new(
                aggregated_precision_recall(outcomes, Some(LabelKind::Symbol)),
                per_kind_success_rate(outcomes, LabelKind::Symbol),
            ),
            overall: KindScores::new(
                aggregated_precision_recall(outcomes, None),
                per_sign_success_rate(outcomes),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionReport {
    /// Mode treated as the headline result.
    pub text_mode: TextMode,
    pub symbol_threshold: f64,
    pub embedder: String,
    /// Readable ground-truth signs scored.
    pub signs_evaluated: u64,
    /// Readable signs with no prediction entry; scored as empty predictions.
    pub signs_without_prediction: u64,
    /// Predicted signs ignored because they reference no readable annotated sign.
    pub predictions_excluded: u64,
    pub strict: ModeScores,
    pub relaxed: ModeScores,
}

impl RecognitionReport {
    pub fn headline(&self) -> &ModeScores {
        match self.text_mode {
            TextMode::Strict => &self.strict,
            TextMode::Relaxed => &self.relaxed,
        }
    }
}

/// Scores predicted cues against readable annotated signs, keyed by
/// `(image_id, sign_id)`, under both text modes.
pub fn evaluate_recognition(
    dataset: &Dataset,
    predictions: &PredictionSet,
    cfg: &EvalConfig,
    provider: &dyn EmbeddingProvider,
) -> Result<RecognitionReport, EmbedError> {
    let mut predicted: HashMap<(&str, &str), &[NavCue]> = HashMap::new();
    let mut excluded = 0u64;
    for entry in &predictions.entries {
        for sign in &entry.signs {
            let Some(sign_id) = sign.sign_id.as_deref() else {
                log::warn!("prediction in image {:?} has no sign_id; excluded", entry.image_id);
                excluded += 1;
                continue;
            };
            let known = dataset
                .image(&entry.image_id)
                .and_then(|img| img.signs.iter().find(|s| s.sign_id == sign_id));
            match known {
                Some(s) if s.readable => {
                    predicted.insert((entry.image_id.as_str(), sign_id), &sign.cues);
                }
                Some(_) => {
                    log::info!("prediction for unreadable sign {}/{} ignored", entry.image_id, sign_id);
                    excluded += 1;
                }
                None => {
                    log::warn!("prediction for unknown sign {}/{} excluded", entry.image_id, sign_id);
                    excluded += 1;
                }
            }
        }
    }

    // image-id order keeps any logging and folding deterministic
    let mut images: BTreeMap<&str, _> = BTreeMap::new();
    for img in &dataset.entries {
        images.insert(img.image_id.as_str(), img);
    }

    let mut pairs = Vec::new();
    let mut missing = 0u64;
    for (image_id, img) in &images {
        for sign in img.signs.iter().filter(|s| s.readable) {
            let pred = match predicted.get(&(*image_id, sign.sign_id.as_str())) {
                Some(p) => *p,
                None => {
                    missing += 1;
                    &[]
                }
            };
            pairs.push((sign.cues.as_slice(), pred));
        }
    }

    let score = |mode: TextMode| -> Result<ModeScores, EmbedError> {
        let rule = MatchRule::new(mode, cfg.symbol_threshold);
        let outcomes = pairs
            .iter()
            .map(|(gt, pred)| {
                Ok(SignOutcome {
                    gt,
                    pred,
                    matching: match_cue_sets(gt, pred, &rule, provider)?,
                })
            })
            .collect::<Result<Vec<_>, EmbedError>>()?;
        Ok(ModeScores::from_outcomes(&outcomes))
    };

    Ok(RecognitionReport {
        text_mode: cfg.text_mode,
        symbol_threshold: cfg.symbol_threshold,
        embedder: provider.model_id().to_string(),
        signs_evaluated: pairs.len() as u64,
        signs_without_prediction: missing,
        predictions_excluded: excluded,
        strict: score(TextMode::Strict)?,
        relaxed: score(TextMode::Relaxed)?,
    })
}
