use serde::{Deserialize, Serialize};

use super::{BBox, NavCue};
use crate::error::ModelError;

/// Ground-truth sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignAnnotation {
    pub sign_id: String,
    pub bbox: BBox,
    /// Annotator consensus that the sign can be parsed by a person.
    pub readable: bool,
    pub cues: Vec<NavCue>,
}

/// Predicted sign: a box, a score and (after recognition) cues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPrediction {
    /// Ties the prediction to an annotated sign for recognition-only runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_id: Option<String>,
    pub bbox: BBox,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub cues: Vec<NavCue>,
}

pub const DEFAULT_CONFIDENCE: f64 = 1.0;

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

pub fn check_confidence(confidence: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&confidence) {
        Ok(confidence)
    } else {
        Err(ModelError::InvalidConfidence(confidence))
    }
}

impl SignPrediction {
    pub fn new(bbox: BBox, confidence: Option<f64>) -> Result<Self, ModelError> {
        Ok(Self {
            sign_id: None,
            bbox,
            confidence: check_confidence(confidence.unwrap_or(DEFAULT_CONFIDENCE))?,
            cues: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confidence_defaults_and_bounds() {
        let b = BBox::new(0.0, 0.0, 4.0, 4.0).unwrap();
        assert_eq!(SignPrediction::new(b.clone(), None).unwrap().confidence, 1.0);
        assert!(SignPrediction::new(b.clone(), Some(1.5)).is_err());
        assert!(SignPrediction::new(b, Some(-0.1)).is_err());
    }
}
