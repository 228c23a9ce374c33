//! Baseline inference: an open-vocabulary detector proposes sign boxes, a
//! vision-language model reads each crop, and the answers are parsed into
//! navigational cues.
//!
//! Backends are reached over HTTP; responses are cached on disk by content
//! so a warm cache replays a run without network access.

pub mod backend;
pub mod cache;
pub mod parse;
pub mod prompt;
pub mod run;

pub use backend::{
    BackendError, DetectorBackend, HttpDetector, HttpEmbeddingProvider, HttpRecognizer, RecognizerBackend, RetryPolicy,
};
pub use cache::{cache_key, ResponseCache};
pub use parse::{parse_recognition_response, DropReason, DroppedItem, ParseDiagnostics};
pub use prompt::{build_recognition_prompt, DEFAULT_DETECTION_QUERY, PROMPT_VERSION};
pub use run::{
    detect, encode_png, parse_detector_response, recognize, run_end_to_end, run_recognition, RunError, RunManifest,
    RunOptions, RunOutput, RunStats,
};
