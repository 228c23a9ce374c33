use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::Direction;
use crate::error::ModelError;

/// Whether a place appeared on the sign as written text or as a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Text,
    Symbol,
}

impl LabelKind {
    pub const ALL: [LabelKind; 2] = [LabelKind::Text, LabelKind::Symbol];

    pub fn as_str(self) -> &'static str {
        match self {
            LabelKind::Text => "text",
            LabelKind::Symbol => "symbol",
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "text" => Ok(LabelKind::Text),
            "symbol" => Ok(LabelKind::Symbol),
            _ => Err(ModelError::BadKind(s.to_string())),
        }
    }
}

/// NFC, trimmed, with internal whitespace runs collapsed to one space.
pub fn normalize_place(raw: &str) -> Result<String, ModelError> {
    let nfc: String = raw.nfc().collect();
    let collapsed = nfc.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        Err(ModelError::EmptyPlace)
    } else {
        Ok(collapsed)
    }
}

/// One navigational cue: a place, how it was shown, and where it lies.
///
/// Fields are public so that raw data can be inspected with
/// [`validate_cue`]; [`NavCue::new`] is the normalizing constructor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NavCue {
    pub place: String,
    pub kind: LabelKind,
    pub direction: Direction,
}

impl NavCue {
    pub fn new(place: &str, kind: LabelKind, direction: Direction) -> Result<Self, ModelError> {
        Ok(Self {
            place: normalize_place(place)?,
            kind,
            direction,
        })
    }

    pub fn text(place: &str, direction: Direction) -> Result<Self, ModelError> {
        Self::new(place, LabelKind::Text, direction)
    }

    pub fn symbol(place: &str, direction: Direction) -> Result<Self, ModelError> {
        Self::new(place, LabelKind::Symbol, direction)
    }

    pub fn is_locational(&self) -> bool {
        self.direction == Direction::NoDirection
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CueViolation {
    EmptyPlace,
    NotNormalized,
}

/// Lists every invariant the cue breaks. Empty means valid.
pub fn validate_cue(cue: &NavCue) -> Vec<CueViolation> {
    match normalize_place(&cue.place) {
        Err(_) => vec![CueViolation::EmptyPlace],
        Ok(norm) if norm != cue.place => vec![CueViolation::NotNormalized],
        Ok(_) => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn whitespace_is_collapsed() {
        assert_eq!(normalize_place("  Ward  63 ").unwrap(), "Ward 63");
        assert_eq!(normalize_place("Tower B").unwrap(), "Tower B");
        assert_eq!(normalize_place("Lift\tto\n platform").unwrap(), "Lift to platform");
        assert_eq!(normalize_place("   "), Err(ModelError::EmptyPlace));
    }

    #[test]
    fn nfc_composition() {
        // "e" + combining acute accent composes to U+00E9
        assert_eq!(normalize_place("Cafe\u{301}").unwrap(), "Caf\u{e9}");
    }

    #[test]
    fn validate() {
        let lobby = NavCue::text("Lobby", Direction::Left).unwrap();
        assert!(validate_cue(&lobby).is_empty());
        let empty = NavCue {
            place: String::new(),
            kind: LabelKind::Text,
            direction: Direction::Left,
        };
        assert_eq!(validate_cue(&empty), vec![CueViolation::EmptyPlace]);
        let lift = NavCue::symbol("Lift", Direction::NoDirection).unwrap();
        assert!(validate_cue(&lift).is_empty());
        let padded = NavCue {
            place: " Lift".into(),
            ..lift
        };
        assert_eq!(validate_cue(&padded), vec![CueViolation::NotNormalized]);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("Symbol".parse::<LabelKind>().unwrap(), LabelKind::Symbol);
        assert!("icon".parse::<LabelKind>().is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in "\\PC{0,24}") {
            if let Ok(once) = normalize_place(&raw) {
                prop_assert_eq!(normalize_place(&once).unwrap(), once);
            }
        }
    }
}
