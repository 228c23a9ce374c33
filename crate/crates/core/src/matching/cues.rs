use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteGraph;
use super::embedding::EmbeddingProvider;
use super::equivalence::{cue_match_predicate, MatchRule};
use crate::error::EmbedError;
use crate::model::{LabelKind, NavCue, TextMode};

/// One-to-one matching between a sign's ground-truth and predicted cues.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CueMatching {
    /// `(gt_index, pred_index)`, ascending by ground-truth index.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_pred: Vec<usize>,
}

impl CueMatching {
    pub fn from_pairs(pairs: Vec<(usize, usize)>, n_gt: usize, n_pred: usize) -> Self {
        let mut gt_used = vec![false; n_gt];
        let mut pred_used = vec![false; n_pred];
        for &(g, p) in &pairs {
            gt_used[g] = true;
            pred_used[p] = true;
        }
        let free = |used: Vec<bool>| used.iter().enumerate().filter(|(_, u)| !**u).map(|(i, _)| i).collect();
        Self {
            pairs,
            unmatched_gt: free(gt_used),
            unmatched_pred: free(pred_used),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every cue on both sides is paired.
    pub fn is_perfect(&self) -> bool {
        self.unmatched_gt.is_empty() && self.unmatched_pred.is_empty()
    }
}

/// Admissibility graph between two cue lists under `rule`.
///
/// Edge weights are the predicted place length (in characters) for text
/// pairs in relaxed mode and zero otherwise, which makes the matcher prefer
/// the longest admissible substring.
pub fn admissibility_graph(
    gt: &[NavCue],
    pred: &[NavCue],
    rule: &MatchRule,
    provider: &dyn EmbeddingProvider,
) -> Result<BipartiteGraph, EmbedError> {
    let mut graph = BipartiteGraph::new(gt.len(), pred.len());
    for (i, g) in gt.iter().enumerate() {
        for (j, p) in pred.iter().enumerate() {
            if cue_match_predicate(g, p, rule, provider)? {
                let weight = match (rule.text_mode, p.kind) {
                    (TextMode::Relaxed, LabelKind::Text) => p.place.chars().count() as u64,
                    _ => 0,
                };
                graph.add_edge(i, j, weight);
            }
        }
    }
    Ok(graph)
}

/// Maximum one-to-one matching of predicted cues to ground-truth cues.
///
/// Among maximum matchings the one with the largest total matched
/// substring length wins (relaxed mode only); remaining ties go to the
/// lexicographically smallest `(gt_index, pred_index)` list.
pub fn match_cue_sets(
    gt: &[NavCue],
    pred: &[NavCue],
    rule: &MatchRule,
    provider: &dyn EmbeddingProvider,
) -> Result<CueMatching, EmbedError> {
    let graph = admissibility_graph(gt, pred, rule, provider)?;
    Ok(CueMatching::from_pairs(graph.canonical(), gt.len(), pred.len()))
}
