use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use signeval_core::model::{resolve_direction, LabelKind, NavCue, Resolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DropReason {
    UnmappedDirection,
    EmptyPlace,
    BadKind,
    NotAnObject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedItem {
    pub item: Value,
    pub reason: DropReason,
}

/// What happened while turning one model response into cues.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ParseDiagnostics {
    #[serde(skip)]
    pub raw_response: String,
    /// Byte range of the array that was used, within `raw_response`.
    pub extracted_json_span: Option<(usize, usize)>,
    pub dropped_items: Vec<DroppedItem>,
    /// Directions accepted through the synonym table.
    pub synonym_mapped: usize,
}

/// Extracts cues from a free-form model response. Never fails: anything
/// unusable is reported in the diagnostics.
pub fn parse_recognition_response(raw: &str) -> (Vec<NavCue>, ParseDiagnostics) {
    let mut diag = ParseDiagnostics {
        raw_response: raw.to_string(),
        ..Default::default()
    };
    let Some((start, end, items)) = fenced_regions(raw)
        .into_iter()
        .chain(std::iter::once((0, raw.len())))
        .find_map(|(a, b)| first_array(raw, a, b))
    else {
        return (Vec::new(), diag);
    };
    diag.extracted_json_span = Some((start, end));

    let mut cues = Vec::new();
    for item in items {
        match convert_item(&item, &mut diag.synonym_mapped) {
            Ok(cue) => cues.push(cue),
            Err(reason) => diag.dropped_items.push(DroppedItem { item, reason }),
        }
    }
    (cues, diag)
}

/// Byte ranges between Markdown code fences, excluding the info string.
fn fenced_regions(raw: &str) -> Vec<(usize, usize)> {
    let mut regions = Vec::new();
    let mut rest = 0;
    while let Some(open) = raw[rest..].find("```") {
        let open = rest + open + 3;
        let body = match raw[open..].find('\n') {
            Some(nl) => open + nl + 1,
            None => break,
        };
        match raw[body..].find("```") {
            Some(close) => {
                regions.push((body, body + close));
                rest = body + close + 3;
            }
            None => {
                regions.push((body, raw.len()));
                break;
            }
        }
    }
    regions
}

/// First `[` in `raw[from..to]` that starts a complete JSON array.
fn first_array(raw: &str, from: usize, to: usize) -> Option<(usize, usize, Vec<Value>)> {
    let region = &raw[from..to];
    for (i, _) in region.match_indices('[') {
        let mut stream = serde_json::Deserializer::from_str(&region[i..]).into_iter::<Value>();
        if let Some(Ok(Value::Array(items))) = stream.next() {
            let len = stream.byte_offset();
            return Some((from + i, from + i + len, items));
        }
    }
    None
}

fn convert_item(item: &Value, synonyms: &mut usize) -> Result<NavCue, DropReason> {
    let Value::Object(map) = item else {
        return Err(DropReason::NotAnObject);
    };
    let text = |k: &str| map.get(k).and_then(Value::as_str);
    let kind = text("kind")
        .and_then(|k| LabelKind::from_str(k).ok())
        .ok_or(DropReason::BadKind)?;
    let (direction, how) = text("direction")
        .and_then(|d| resolve_direction(d).ok())
        .ok_or(DropReason::UnmappedDirection)?;
    let place = text("place").ok_or(DropReason::EmptyPlace)?;
    let cue = NavCue::new(place, kind, direction).map_err(|_| DropReason::EmptyPlace)?;
    if how == Resolution::Synonym {
        *synonyms += 1;
    }
    Ok(cue)
}
