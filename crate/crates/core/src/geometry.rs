//! Waveguide cross-section, slab position and truncation length.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("cross-section lengths must be positive (L2 = {l2}, L3 = {l3})")]
    NonPositiveCrossSection { l2: f64, l3: f64 },
    #[error("slab interface position must be positive, got {0}")]
    NonPositiveSlab(f64),
    #[error("truncation length X = {x} must exceed the slab interface {slab_end}")]
    TruncationInsideSlab { x: f64, slab_end: f64 },
    #[error("mode indices start at 1, got ({n2}, {n3})")]
    ZeroModeIndex { n2: u32, n3: u32 },
}

/// Length of the guide along x₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Infinite,
    Finite(f64),
}

impl Truncation {
    pub fn length(&self) -> Option<f64> {
        match *self {
            Truncation::Infinite => None,
            Truncation::Finite(x) => Some(x),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Truncation::Infinite)
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Infinite => write!(f, "inf"),
            Truncation::Finite(x) => write!(f, "{x}"),
        }
    }
}

// Serialized as a number or the string "inf".
impl Serialize for Truncation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Truncation::Infinite => s.serialize_str("inf"),
            Truncation::Finite(x) => s.serialize_f64(x),
        }
    }
}

impl<'de> Deserialize<'de> for Truncation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Truncation::Finite(x)),
            Repr::Text(s) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinite") => {
                Ok(Truncation::Infinite)
            }
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// The guide (0, X) × (0, L2) × (0, L3) with the metamaterial occupying
/// (0, slab_end) × (0, L2) × (0, L3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    pub l2: f64,
    pub l3: f64,
    pub slab_end: f64,
    pub truncation: Truncation,
}

impl WaveguideGeometry {
    pub fn new(l2: f64, l3: f64, slab_end: f64, truncation: Truncation) -> Result<Self, GeometryError> {
        let g = WaveguideGeometry { l2, l3, slab_end, truncation };
        g.validate()?;
        Ok(g)
    }

    /// Cross-section (0, 1) × (0, π), unit slab, infinite guide.
    pub fn reference() -> Self {
        WaveguideGeometry { l2: 1.0, l3: PI, slab_end: 1.0, truncation: Truncation::Infinite }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.l2 > 0.0 && self.l3 > 0.0) || !self.l2.is_finite() || !self.l3.is_finite() {
            return Err(GeometryError::NonPositiveCrossSection { l2: self.l2, l3: self.l3 });
        }
        if !(self.slab_end > 0.0) || !self.slab_end.is_finite() {
            return Err(GeometryError::NonPositiveSlab(self.slab_end));
        }
        if let Truncation::Finite(x) = self.truncation {
            if !(x > self.slab_end) || !x.is_finite() {
                return Err(GeometryError::TruncationInsideSlab { x, slab_end: self.slab_end });
            }
        }
        Ok(())
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Result<Self, GeometryError> {
        self.truncation = truncation;
        self.validate()?;
        Ok(self)
    }

    /// Vacuum length X − slab_end, `None` for the infinite guide.
    pub fn vacuum_length(&self) -> Option<f64> {
        self.truncation.length().map(|x| x - self.slab_end)
    }

    /// Bottom of σ_e(curl curl₀): (π / max{L2, L3})².
    pub fn essential_threshold_sq(&self) -> f64 {
        let c = PI / self.l2.max(self.l3);
        c * c
    }

    /// κ_n² = π²n₂²/L₂² + π²n₃²/L₃².
    pub fn cutoff(&self, mode: ModeIndex) -> f64 {
        let a = PI * f64::from(mode.n2) / self.l2;
        let b = PI * f64::from(mode.n3) / self.l3;
        a * a + b * b
    }

    /// All modes with 1 ≤ n2, n3 ≤ n_max, ordered by (n2, n3).
    pub fn modes(n_max: u32) -> Vec<ModeIndex> {
        (1..=n_max)
            .flat_map(|n2| (1..=n_max).map(move |n3| ModeIndex { n2, n3 }))
            .collect()
    }
}

/// Transverse mode (n2, n3), both indices ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n2: u32,
    pub n3: u32,
}

impl ModeIndex {
    pub fn new(n2: u32, n3: u32) -> Result<Self, GeometryError> {
        if n2 == 0 || n3 == 0 {
            return Err(GeometryError::ZeroModeIndex { n2, n3 });
        }
        Ok(ModeIndex { n2, n3 })
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n2, self.n3)
    }
}
