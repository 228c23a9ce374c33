use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::model::{SignAnnotation, SignPrediction};

/// One annotated image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub image_id: String,
    /// Path relative to the dataset file's directory.
    pub file: String,
    pub width: u32,
    pub height: u32,
    pub signs: Vec<SignAnnotation>,
}

/// Ground truth for a set of images.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    #[serde(rename = "images")]
    pub entries: Vec<ImageEntry>,
    /// Directory image paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Dataset {
    pub fn new(entries: Vec<ImageEntry>) -> Self {
        Self {
            entries,
            base_dir: PathBuf::from("."),
        }
    }

    pub fn image(&self, image_id: &str) -> Option<&ImageEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }

    pub fn image_path(&self, entry: &ImageEntry) -> PathBuf {
        self.base_dir.join(&entry.file)
    }

    pub fn sign_count(&self) -> usize {
        self.entries.iter().map(|e| e.signs.len()).sum()
    }

    pub fn cue_count(&self) -> usize {
        self.entries.iter().flat_map(|e| &e.signs).map(|s| s.cues.len()).sum()
    }
}

/// Predictions for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionEntry {
    pub image_id: String,
    pub signs: Vec<SignPrediction>,
}

/// Predictions keyed by image id, in file order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionSet {
    #[serde(rename = "images", default)]
    pub entries: Vec<PredictionEntry>,
}

impl PredictionSet {
    pub fn get(&self, image_id: &str) -> Option<&[SignPrediction]> {
        self.entries
            .iter()
            .find(|e| e.image_id == image_id)
            .map(|e| e.signs.as_slice())
    }

    /// Map from image id to predictions.
    pub fn by_image(&self) -> HashMap<&str, &[SignPrediction]> {
        self.entries
            .iter()
            .map(|e| (e.image_id.as_str(), e.signs.as_slice()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
