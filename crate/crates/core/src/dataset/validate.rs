use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::types::Dataset;
use crate::model::{validate_cue, CueViolation, Direction, LabelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    InvalidBbox,
    BboxOutOfBounds,
    InvalidDimensions,
    EmptyPlace,
    NotNormalized,
    UnmappedDirection,
    BadKind,
    InvalidConfidence,
    DuplicateId,
}

/// One broken invariant, located by JSON pointer into the source file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub pointer: String,
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    pub fn new(pointer: impl Into<String>, code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub images: usize,
    pub signs: usize,
    pub readable_signs: usize,
    pub cues: usize,
    pub cues_by_kind: BTreeMap<String, usize>,
    pub cues_by_direction: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub summary: DatasetSummary,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks dataset-level invariants and tallies what the dataset holds.
///
/// Reports rather than enforces: the summary is filled even when
/// violations are present.
pub fn validate_dataset(dataset: &Dataset) -> ValidationReport {
    let mut violations = Vec::new();
    let mut summary = DatasetSummary {
        images: dataset.entries.len(),
        ..Default::default()
    };
    for kind in LabelKind::ALL {
        summary.cues_by_kind.insert(kind.to_string(), 0);
    }
    for d in Direction::ALL {
        summary.cues_by_direction.insert(d.to_string(), 0);
    }

    let mut image_ids = HashSet::new();
    for (i, entry) in dataset.entries.iter().enumerate() {
        let ptr = format!("/images/{i}");
        if !image_ids.insert(entry.image_id.as_str()) {
            violations.push(Violation::new(
                format!("{ptr}/image_id"),
                ViolationCode::DuplicateId,
                format!("image_id {:?} repeated", entry.image_id),
            ));
        }
        if entry.width == 0 || entry.height == 0 {
            violations.push(Violation::new(
                ptr.clone(),
                ViolationCode::InvalidDimensions,
                format!("image size {}x{} must be positive", entry.width, entry.height),
            ));
        }
        let mut sign_ids = HashSet::new();
        for (s, sign) in entry.signs.iter().enumerate() {
            let sptr = format!("{ptr}/signs/{s}");
            summary.signs += 1;
            summary.readable_signs += sign.readable as usize;
            if !sign_ids.insert(sign.sign_id.as_str()) {
                violations.push(Violation::new(
                    format!("{sptr}/sign_id"),
                    ViolationCode::DuplicateId,
                    format!("sign_id {:?} repeated in image {:?}", sign.sign_id, entry.image_id),
                ));
            }
            if !sign.bbox.within(entry.width as f64, entry.height as f64) {
                violations.push(Violation::new(
                    format!("{sptr}/bbox"),
                    ViolationCode::BboxOutOfBounds,
                    format!(
                        "bbox {:?} exceeds image bounds {}x{}",
                        sign.bbox.to_array(),
                        entry.width,
                        entry.height
                    ),
                ));
            }
            for (c, cue) in sign.cues.iter().enumerate() {
                summary.cues += 1;
                *summary.cues_by_kind.entry(cue.kind.to_string()).or_default() += 1;
                *summary.cues_by_direction.entry(cue.direction.to_string()).or_default() += 1;
                for v in validate_cue(cue) {
                    let code = match v {
                        CueViolation::EmptyPlace => ViolationCode::EmptyPlace,
                        CueViolation::NotNormalized => ViolationCode::NotNormalized,
                    };
                    violations.push(Violation::new(
                        format!("{sptr}/cues/{c}/place"),
                        code,
                        format!("place {:?} violates {v:?}", cue.place),
                    ));
                }
            }
        }
    }
    ValidationReport { violations, summary }
}
