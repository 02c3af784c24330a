use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RootError;

pub const DEFAULT_MAX_DEPTH: u32 = 40;
pub const DEFAULT_BOUNDARY_SAMPLES: u32 = 32;

/// Axis-aligned rectangle [re_min, re_max] × [im_min, im_max] of the
/// complex plane with subdivision limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    #[serde(default = "default_depth")]
    pub max_depth: u32,
    #[serde(default = "default_samples")]
    pub boundary_samples: u32,
}

fn default_depth() -> u32 {
    DEFAULT_MAX_DEPTH
}

fn default_samples() -> u32 {
    DEFAULT_BOUNDARY_SAMPLES
}

impl SearchRegion {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        max_depth: u32,
        boundary_samples: u32,
    ) -> Result<Self, RootError> {
        let r = SearchRegion { re_min, re_max, im_min, im_max, max_depth, boundary_samples };
        r.validate()?;
        Ok(r)
    }

    /// Rectangle with the default subdivision limits.
    pub fn rect(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RootError> {
        Self::new(re_min, re_max, im_min, im_max, DEFAULT_MAX_DEPTH, DEFAULT_BOUNDARY_SAMPLES)
    }

    pub fn validate(&self) -> Result<(), RootError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(RootError::InvalidRegion(format!(
                "[{}, {}] × [{}, {}] is empty or unbounded",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.max_depth < 1 {
            return Err(RootError::InvalidRegion("max_depth must be at least 1".into()));
        }
        if self.boundary_samples < 16 {
            return Err(RootError::InvalidRegion(format!(
                "boundary_samples must be at least 16, got {}",
                self.boundary_samples
            )));
        }
        Ok(())
    }

    /// Same limits, new bounds.
    pub fn with_bounds(&self, re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        SearchRegion { re_min, re_max, im_min, im_max, ..*self }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_with_margin(z, 0.0)
    }

    pub fn contains_with_margin(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    pub fn intersects(&self, other: &SearchRegion) -> bool {
        self.re_min < other.re_max && other.re_min < self.re_max && self.im_min < other.im_max && other.im_min < self.im_max
    }

    /// Corners in counter-clockwise order starting at the lower left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    /// Splits at fractions `fx` of the width and `fy` of the height.
    pub fn quadrisect(&self, fx: f64, fy: f64) -> [SearchRegion; 4] {
        let xm = self.re_min + fx * self.width();
        let ym = self.im_min + fy * self.height();
        [
            self.with_bounds(self.re_min, xm, self.im_min, ym),
            self.with_bounds(xm, self.re_max, self.im_min, ym),
            self.with_bounds(xm, self.re_max, ym, self.im_max),
            self.with_bounds(self.re_min, xm, ym, self.im_max),
        ]
    }

    /// Grows every side by `frac` of the diameter.
    pub fn grow(&self, frac: f64) -> SearchRegion {
        let d = frac * self.diameter();
        self.with_bounds(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)
    }
}
