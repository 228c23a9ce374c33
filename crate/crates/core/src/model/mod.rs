//! Domain vocabulary: cues, directions, boxes, signs and evaluation settings.

mod bbox;
mod config;
mod cue;
mod direction;
mod sign;

pub use bbox::BBox;
pub use config::{EvalConfig, SizeBucket, SizeBuckets, TextMode};
pub use cue::{normalize_place, validate_cue, CueViolation, LabelKind, NavCue};
pub use direction::{canonicalize_direction, resolve_direction, Direction, Resolution, SYNONYM_TABLE_VERSION};
pub use sign::{check_confidence, SignAnnotation, SignPrediction, DEFAULT_CONFIDENCE};
