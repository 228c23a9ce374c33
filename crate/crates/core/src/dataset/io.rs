//! Reading and writing ground-truth and prediction JSON.
//!
//! Parsing happens in two stages. Serde checks the shape of the document
//! (field names and JSON types) and reports the failing location as a JSON
//! pointer. The raw records are then converted into domain types, which
//! is where value invariants (box geometry, cue vocabulary, unique ids)
//! are checked and reported as [`Violation`]s.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::types::{Dataset, ImageEntry, PredictionEntry, PredictionSet};
use super::validate::{validate_dataset, Violation, ViolationCode};
use super::DatasetError;
use crate::model::{canonicalize_direction, check_confidence, BBox, LabelKind, NavCue, SignAnnotation, SignPrediction};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCue {
    place: String,
    kind: String,
    direction: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSign {
    sign_id: String,
    bbox: [f64; 4],
    readable: bool,
    cues: Vec<RawCue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImage {
    image_id: String,
    file: String,
    width: u32,
    height: u32,
    signs: Vec<RawSign>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    images: Vec<RawImage>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPredSign {
    #[serde(default)]
    sign_id: Option<String>,
    bbox: [f64; 4],
    #[serde(default)]
    confidence: Option<f64>,
    #[serde(default)]
    cues: Vec<RawCue>,
}

#[derive(Debug, Deserialize)]
struct RawPredImage {
    image_id: String,
    signs: Vec<RawPredSign>,
}

#[derive(Debug, Deserialize)]
struct RawPredictions {
    #[serde(default)]
    images: Vec<RawPredImage>,
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DatasetError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let pointer = json_pointer(err.path());
        DatasetError::Schema {
            pointer,
            message: err.into_inner().to_string(),
        }
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn convert_cue(raw: &RawCue, pointer: &str, violations: &mut Vec<Violation>) -> Option<NavCue> {
    let kind = match raw.kind.parse::<LabelKind>() {
        Ok(k) => k,
        Err(e) => {
            violations.push(Violation::new(
                format!("{pointer}/kind"),
                ViolationCode::BadKind,
                e.to_string(),
            ));
            return None;
        }
    };
    let direction = match canonicalize_direction(&raw.direction) {
        Ok(d) => d,
        Err(e) => {
            violations.push(Violation::new(
                format!("{pointer}/direction"),
                ViolationCode::UnmappedDirection,
                e.to_string(),
            ));
            return None;
        }
    };
    match NavCue::new(&raw.place, kind, direction) {
        Ok(c) => Some(c),
        Err(e) => {
            violations.push(Violation::new(
                format!("{pointer}/place"),
                ViolationCode::EmptyPlace,
                e.to_string(),
            ));
            None
        }
    }
}

fn convert_bbox(raw: [f64; 4], pointer: &str, violations: &mut Vec<Violation>) -> Option<BBox> {
    match BBox::from_array(raw) {
        Ok(b) => Some(b),
        Err(e) => {
            violations.push(Violation::new(
                format!("{pointer}/bbox"),
                ViolationCode::InvalidBbox,
                e.to_string(),
            ));
            None
        }
    }
}

/// Parses ground truth, keeping every record that converts and listing
/// the ones that do not. Dataset-level checks (ids, bounds) are left to
/// [`validate_dataset`].
pub fn parse_ground_truth_lenient(text: &str) -> Result<(Dataset, Vec<Violation>), DatasetError> {
    let raw: RawDataset = parse(text)?;
    let mut violations = Vec::new();
    let mut entries = Vec::with_capacity(raw.images.len());
    for (i, img) in raw.images.into_iter().enumerate() {
        let mut signs = Vec::with_capacity(img.signs.len());
        for (s, sign) in img.signs.into_iter().enumerate() {
            let ptr = format!("/images/{i}/signs/{s}");
            let bbox = convert_bbox(sign.bbox, &ptr, &mut violations);
            let cues: Vec<NavCue> = sign
                .cues
                .iter()
                .enumerate()
                .filter_map(|(c, cue)| convert_cue(cue, &format!("{ptr}/cues/{c}"), &mut violations))
                .collect();
            if let Some(bbox) = bbox {
                signs.push(SignAnnotation {
                    sign_id: sign.sign_id,
                    bbox,
                    readable: sign.readable,
                    cues,
                });
            }
        }
        entries.push(ImageEntry {
            image_id: img.image_id,
            file: img.file,
            width: img.width,
            height: img.height,
            signs,
        });
    }
    Ok((Dataset::new(entries), violations))
}

fn first_violation(violations: Vec<Violation>) -> Result<(), DatasetError> {
    match violations.into_iter().next() {
        None => Ok(()),
        Some(v) => Err(v.into()),
    }
}

pub fn parse_ground_truth(text: &str) -> Result<Dataset, DatasetError> {
    let (dataset, violations) = parse_ground_truth_lenient(text)?;
    first_violation(violations)?;
    first_violation(validate_dataset(&dataset).violations)?;
    Ok(dataset)
}

/// Loads and fully validates a ground-truth file. Image paths resolve
/// against the file's directory.
pub fn load_ground_truth(path: &Path) -> Result<Dataset, DatasetError> {
    let mut dataset = parse_ground_truth(&read(path)?)?;
    dataset.base_dir = base_dir(path);
    Ok(dataset)
}

/// Like [`load_ground_truth`] but returns the readable part of the file
/// together with every violation found.
pub fn load_ground_truth_lenient(path: &Path) -> Result<(Dataset, Vec<Violation>), DatasetError> {
    let (mut dataset, mut violations) = parse_ground_truth_lenient(&read(path)?)?;
    dataset.base_dir = base_dir(path);
    violations.extend(validate_dataset(&dataset).violations);
    Ok((dataset, violations))
}

fn base_dir(path: &Path) -> std::path::PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    }
}

pub fn parse_predictions(text: &str) -> Result<PredictionSet, DatasetError> {
    let raw: RawPredictions = parse(text)?;
    let mut violations = Vec::new();
    let mut seen_images = HashSet::new();
    let mut entries = Vec::with_capacity(raw.images.len());
    for (i, img) in raw.images.into_iter().enumerate() {
        if !seen_images.insert(img.image_id.clone()) {
            violations.push(Violation::new(
                format!("/images/{i}/image_id"),
                ViolationCode::DuplicateId,
                format!("image_id {:?} repeated", img.image_id),
            ));
        }
        let mut seen_signs = HashSet::new();
        let mut signs = Vec::with_capacity(img.signs.len());
        for (s, sign) in img.signs.into_iter().enumerate() {
            let ptr = format!("/images/{i}/signs/{s}");
            if let Some(id) = &sign.sign_id {
                if !seen_signs.insert(id.clone()) {
                    violations.push(Violation::new(
                        format!("{ptr}/sign_id"),
                        ViolationCode::DuplicateId,
                        format!("sign_id {id:?} repeated"),
                    ));
                }
            }
            let confidence = match sign.confidence.map(check_confidence).transpose() {
                Ok(c) => c,
                Err(e) => {
                    violations.push(Violation::new(
                        format!("{ptr}/confidence"),
                        ViolationCode::InvalidConfidence,
                        e.to_string(),
                    ));
                    continue;
                }
            };
            let cues: Vec<NavCue> = sign
                .cues
                .iter()
                .enumerate()
                .filter_map(|(c, cue)| convert_cue(cue, &format!("{ptr}/cues/{c}"), &mut violations))
                .collect();
            let Some(bbox) = convert_bbox(sign.bbox, &ptr, &mut violations) else {
                continue;
            };
            let mut pred = SignPrediction::new(bbox, confidence).expect("confidence checked");
            pred.sign_id = sign.sign_id;
            pred.cues = cues;
            signs.push(pred);
        }
        entries.push(PredictionEntry {
            image_id: img.image_id,
            signs,
        });
    }
    first_violation(violations)?;
    Ok(PredictionSet { entries })
}

pub fn load_predictions(path: &Path) -> Result<PredictionSet, DatasetError> {
    parse_predictions(&read(path)?)
}

/// Pretty-printed JSON with a trailing newline. Stable for equal inputs.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("dataset types serialize");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), DatasetError> {
    fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_ground_truth(path: &Path, dataset: &Dataset) -> Result<(), DatasetError> {
    write(path, &to_canonical_json(dataset))
}

pub fn write_predictions(path: &Path, predictions: &PredictionSet) -> Result<(), DatasetError> {
    write(path, &to_canonical_json(predictions))
}
