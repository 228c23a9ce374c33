use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::scalar::Scalar;

/// Axis-aligned box in image pixels, origin top-left.
///
/// Construction enforces finite, non-negative coordinates with strictly
/// positive width and height.
#[derive(Debug, Clone, PartialEq)]
pub struct BBox<S = f64> {
    x_min: S,
    y_min: S,
    x_max: S,
    y_max: S,
}

impl BBox<f64> {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, ModelError> {
        let coords = [x_min, y_min, x_max, y_max];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::InvalidBox(format!("non-finite coordinate in {coords:?}")));
        }
        if coords.iter().any(|c| *c < 0.0) {
            return Err(ModelError::InvalidBox(format!("negative coordinate in {coords:?}")));
        }
        if x_min >= x_max {
            return Err(ModelError::InvalidBox(format!("x_min {x_min} >= x_max {x_max}")));
        }
        if y_min >= y_max {
            return Err(ModelError::InvalidBox(format!("y_min {y_min} >= y_max {y_max}")));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn from_array(c: [f64; 4]) -> Result<Self, ModelError> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    /// Converts to another scalar, exactly when the target is rational.
    pub fn cast<T: Scalar>(&self) -> BBox<T> {
        BBox {
            x_min: T::from_real(self.x_min),
            y_min: T::from_real(self.y_min),
            x_max: T::from_real(self.x_max),
            y_max: T::from_real(self.y_max),
        }
    }

    /// Clips to `[0,width]x[0,height]`. `None` if nothing with positive
    /// area remains.
    pub fn clamp_to(&self, width: f64, height: f64) -> Option<BBox<f64>> {
        let x_min = self.x_min.clamp(0.0, width);
        let x_max = self.x_max.clamp(0.0, width);
        let y_min = self.y_min.clamp(0.0, height);
        let y_max = self.y_max.clamp(0.0, height);
        BBox::new(x_min, y_min, x_max, y_max).ok()
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        self.x_max <= width && self.y_max <= height
    }
}

impl<S: Scalar> BBox<S> {
    pub fn x_min(&self) -> &S {
        &self.x_min
    }
    pub fn y_min(&self) -> &S {
        &self.y_min
    }
    pub fn x_max(&self) -> &S {
        &self.x_max
    }
    pub fn y_max(&self) -> &S {
        &self.y_max
    }

    pub fn width(&self) -> S {
        self.x_max.clone() - self.x_min.clone()
    }

    pub fn height(&self) -> S {
        self.y_max.clone() - self.y_min.clone()
    }

    pub fn area(&self) -> S {
        self.width() * self.height()
    }

    /// Area of the overlap, zero when disjoint or touching.
    pub fn intersection_area(&self, other: &BBox<S>) -> S {
        let w = (S::min_of(self.x_max.clone(), other.x_max.clone())
            - S::max_of(self.x_min.clone(), other.x_min.clone()))
        .non_negative();
        let h = (S::min_of(self.y_max.clone(), other.y_max.clone())
            - S::max_of(self.y_min.clone(), other.y_min.clone()))
        .non_negative();
        w * h
    }
}

impl Serialize for BBox<f64> {
    fn serialize<Se: Serializer>(&self, serializer: Se) -> Result<Se::Ok, Se::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BBox<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = <[f64; 4]>::deserialize(deserializer)?;
        BBox::from_array(raw).map_err(serde::de::Error::custom)
    }
}
