//! Equivalence predicates, cue matching, IoU and detection assignment.

pub mod bipartite;
mod cues;
mod detection;
mod embedding;
mod equivalence;
mod iou;

pub use cues::{admissibility_graph, match_cue_sets, CueMatching};
pub use detection::{greedy_assign, match_detections, rank_by_confidence, DetectionMatching};
pub use embedding::{
    cosine_similarity, embed, EmbeddingProvider, EmbeddingVector, MockBigramEmbedder, MOCK_EMBEDDER_ID,
};
pub use equivalence::{cue_match_predicate, symbol_equivalent, text_equivalent, MatchRule};
pub use iou::{box_iou, iou_matrix};
