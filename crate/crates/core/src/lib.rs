//! Evaluation toolkit for navigational sign understanding.
//!
//! The crate covers the domain model ([`model`]), annotation and
//! prediction files ([`dataset`]), cue and box matching ([`matching`]),
//! detection / recognition / end-to-end metrics ([`metrics`]) and report
//! rendering ([`report`]).
//!
//! Geometry and metric routines are generic over [`Scalar`]; the aliases
//! below fix the instantiations used in practice.

pub mod dataset;
pub mod error;
pub mod matching;
pub mod metrics;
pub mod model;
pub mod report;
pub mod scalar;

pub use error::{EmbedError, ModelError};
pub use scalar::{Exact, Scalar};

/// Box in the coordinates read from annotation files.
pub type BBox = model::BBox<f64>;
/// Box with exact rational coordinates.
pub type ExactBBox = model::BBox<Exact>;
/// Detection report with exact values.
pub type DetectionReport = metrics::DetectionReport<Exact>;
/// Detection report computed in double precision.
pub type DetectionReportF64 = metrics::DetectionReport<f64>;
/// Detection report computed in single precision.
pub type DetectionReportF32 = metrics::DetectionReport<f32>;
/// Embedding in double precision.
pub type Embedding = matching::EmbeddingVector<f64>;
