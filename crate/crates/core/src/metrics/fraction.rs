use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{exact_ratio, Exact, Scalar};

/// Count ratio kept unreduced so reports can show both counts.
/// A zero denominator means the metric is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn is_defined(&self) -> bool {
        self.den != 0
    }

    pub fn value<S: Scalar>(&self) -> Option<S> {
        self.is_defined().then(|| S::ratio(self.num, self.den))
    }

    pub fn exact(&self) -> Option<Exact> {
        self.is_defined().then(|| exact_ratio(self.num, self.den))
    }

    /// Nearest `f64` to the exact value.
    pub fn to_f64(&self) -> Option<f64> {
        self.is_defined().then(|| self.num as f64 / self.den as f64)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    num: u64,
    den: u64,
    #[serde(default)]
    value: Option<f64>,
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Repr {
            num: self.num,
            den: self.den,
            value: self.to_f64(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    /// The `value` field is derived; it is recomputed, not trusted.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(deserializer)?;
        if r.num > r.den && r.den != 0 {
            return Err(serde::de::Error::custom(format!(
                "fraction {}/{} exceeds 1",
                r.num, r.den
            )));
        }
        Ok(Fraction::new(r.num, r.den))
    }
}
