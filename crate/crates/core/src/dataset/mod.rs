//! Dataset files: loading, validation, canonical writing and cropping.

use std::path::PathBuf;

use thiserror::Error;

mod crop;
mod io;
mod types;
mod validate;

pub use crop::{crop_sign, pixel_rect, CropWarning, PixelRect};
pub use io::{
    load_ground_truth, load_ground_truth_lenient, load_predictions, parse_ground_truth, parse_ground_truth_lenient,
    parse_predictions, to_canonical_json, write_ground_truth, write_predictions,
};
pub use types::{Dataset, ImageEntry, PredictionEntry, PredictionSet};
pub use validate::{validate_dataset, DatasetSummary, ValidationReport, Violation, ViolationCode};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid value at {pointer}: {message}")]
    Invariant { pointer: String, message: String },
    #[error("duplicate id at {pointer}: {message}")]
    DuplicateId { pointer: String, message: String },
    #[error("cannot decode image {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("box {bbox:?} has no pixels inside {width}x{height} image")]
    EmptyCrop { bbox: [f64; 4], width: u32, height: u32 },
}

impl From<Violation> for DatasetError {
    fn from(v: Violation) -> Self {
        match v.code {
            ViolationCode::DuplicateId => DatasetError::DuplicateId {
                pointer: v.pointer,
                message: v.message,
            },
            _ => DatasetError::Invariant {
                pointer: v.pointer,
                message: v.message,
            },
        }
    }
}

/// Decodes the image file for `entry`.
pub fn open_image(dataset: &Dataset, entry: &ImageEntry) -> Result<image::DynamicImage, DatasetError> {
    let path = dataset.image_path(entry);
    image::open(&path).map_err(|e| match e {
        image::ImageError::IoError(source) => DatasetError::Io { path, source },
        other => DatasetError::Image {
            path,
            message: other.to_string(),
        },
    })
}
