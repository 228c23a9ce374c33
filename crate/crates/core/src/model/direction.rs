use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Immediate direction toward a place, as shown by a sign's arrow.
///
/// Eight arrow categories plus [`Direction::NoDirection`] for purely
/// locational cues. The wire spelling is the lowercase hyphenated token
/// returned by [`Direction::as_str`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Straight,
    Back,
    Left,
    Right,
    StraightLeft,
    StraightRight,
    BackLeft,
    BackRight,
    NoDirection,
}

/// Version tag of the synonym table below. Bump when the table changes.
pub const SYNONYM_TABLE_VERSION: &str = "directions-v1";

const SYNONYMS: &[(&str, Direction)] = &[
    ("forward", Direction::Straight),
    ("forwards", Direction::Straight),
    ("up", Direction::Straight),
    ("ahead", Direction::Straight),
    ("front", Direction::Straight),
    ("straight-ahead", Direction::Straight),
    ("down", Direction::Back),
    ("behind", Direction::Back),
    ("backward", Direction::Back),
    ("backwards", Direction::Back),
    ("none", Direction::NoDirection),
    ("here", Direction::NoDirection),
    ("location", Direction::NoDirection),
    ("upper-right", Direction::StraightRight),
    ("front-right", Direction::StraightRight),
    ("forward-right", Direction::StraightRight),
    ("up-right", Direction::StraightRight),
    ("ahead-right", Direction::StraightRight),
    ("upper-left", Direction::StraightLeft),
    ("front-left", Direction::StraightLeft),
    ("forward-left", Direction::StraightLeft),
    ("up-left", Direction::StraightLeft),
    ("ahead-left", Direction::StraightLeft),
    ("lower-right", Direction::BackRight),
    ("down-right", Direction::BackRight),
    ("behind-right", Direction::BackRight),
    ("backward-right", Direction::BackRight),
    ("lower-left", Direction::BackLeft),
    ("down-left", Direction::BackLeft),
    ("behind-left", Direction::BackLeft),
    ("backward-left", Direction::BackLeft),
];

impl Direction {
    pub const ALL: [Direction; 9] = [
        Direction::Straight,
        Direction::Back,
        Direction::Left,
        Direction::Right,
        Direction::StraightLeft,
        Direction::StraightRight,
        Direction::BackLeft,
        Direction::BackRight,
        Direction::NoDirection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Straight => "straight",
            Direction::Back => "back",
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::StraightLeft => "straight-left",
            Direction::StraightRight => "straight-right",
            Direction::BackLeft => "back-left",
            Direction::BackRight => "back-right",
            Direction::NoDirection => "no-direction",
        }
    }

    /// True for the eight arrow categories.
    pub fn is_arrow(self) -> bool {
        self != Direction::NoDirection
    }

    /// Synonym-table entries, exposed for documentation and tests.
    pub fn synonyms() -> &'static [(&'static str, Direction)] {
        SYNONYMS
    }
}

/// Lowercases and folds spaces/underscores into single hyphens.
fn fold_token(raw: &str) -> String {
    let lowered = raw.trim().to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for ch in lowered.chars() {
        let ch = if ch.is_whitespace() || ch == '_' { '-' } else { ch };
        if ch == '-' && (out.is_empty() || out.ends_with('-')) {
            continue;
        }
        out.push(ch);
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

/// How a raw token was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Canonical,
    Synonym,
}

/// Like [`canonicalize_direction`] but also reports whether the synonym
/// table was needed.
pub fn resolve_direction(raw: &str) -> Result<(Direction, Resolution), ModelError> {
    let token = fold_token(raw);
    if let Some(d) = Direction::ALL.iter().find(|d| d.as_str() == token) {
        return Ok((*d, Resolution::Canonical));
    }
    if let Some((_, d)) = SYNONYMS.iter().find(|(name, _)| *name == token) {
        return Ok((*d, Resolution::Synonym));
    }
    Err(ModelError::UnmappedDirection(raw.to_string()))
}

/// Maps free text from an annotation file or a model response onto the
/// direction vocabulary.
pub fn canonicalize_direction(raw: &str) -> Result<Direction, ModelError> {
    resolve_direction(raw).map(|(d, _)| d)
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        canonicalize_direction(s)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        canonicalize_direction(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_tokens_map_to_themselves() {
        assert_eq!(
            canonicalize_direction("straight-right").unwrap(),
            Direction::StraightRight
        );
        for d in Direction::ALL {
            assert_eq!(canonicalize_direction(d.as_str()).unwrap(), d);
        }
    }

    #[test]
    fn synonyms() {
        assert_eq!(canonicalize_direction("forward").unwrap(), Direction::Straight);
        assert_eq!(canonicalize_direction("Behind").unwrap(), Direction::Back);
        assert_eq!(canonicalize_direction("None").unwrap(), Direction::NoDirection);
        assert_eq!(canonicalize_direction("upper right").unwrap(), Direction::StraightRight);
        assert_eq!(canonicalize_direction(" Front_Left ").unwrap(), Direction::StraightLeft);
        assert_eq!(
            canonicalize_direction("straight right").unwrap(),
            Direction::StraightRight
        );
    }

    #[test]
    fn unmapped_tokens_are_named() {
        match canonicalize_direction("northwest") {
            Err(ModelError::UnmappedDirection(tok)) => assert_eq!(tok, "northwest"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(canonicalize_direction("slight left").is_err());
        assert!(canonicalize_direction("").is_err());
    }

    #[test]
    fn synonym_table_is_closed_over_the_vocabulary() {
        assert_eq!(Direction::ALL.len(), 9);
        for (name, d) in Direction::synonyms() {
            assert!(Direction::ALL.contains(d));
            // no synonym shadows a canonical token
            assert!(Direction::ALL.iter().all(|c| c.as_str() != *name));
            assert_eq!(canonicalize_direction(name).unwrap(), *d);
        }
        let arrows = Direction::ALL.iter().filter(|d| d.is_arrow()).count();
        assert_eq!(arrows, 8);
    }

    #[test]
    fn idempotent_on_printed_names() {
        for d in Direction::ALL {
            let once = canonicalize_direction(&d.to_string()).unwrap();
            let twice = canonicalize_direction(&once.to_string()).unwrap();
            assert_eq!(once, d);
            assert_eq!(twice, d);
        }
    }
}
