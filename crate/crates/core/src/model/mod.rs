//! Closed-form symbols and sets of the Drude-Lorentz pencil.
//!
//! Everything here is a pure function of [`MaterialParams`] (and, for the
//! essential numerical range, of the guide cross-section). The quadratic
//! pencils Θ(ω) = ω² + iγω − θ², the scalar symbol
//! f(ω) = Θ_e(ω)Θ_m(ω) / ((ω + iγ_e)(ω + iγ_m)), the Σ₁/Σ₂ sign regions, the
//! numerical-range strip, the non-convex enclosure and its refinement Γ, and
//! the essential-spectrum sets all live in this module.

mod asymptotics;
mod essential;
mod regions;
mod symbols;

pub use asymptotics::{asymptotic_root, asymptotic_root_with, near_pole_coefficient, AsymptoticBranch, AsymptoticConvention};
pub use essential::{
    essential_curve_s_infty, s_infty_quartic, s_infty_roots, sigma_e_g_curve, sigma_e_g_points, we_s_infty,
    we_s_infty_contains, HalfLinePair,
};
pub use regions::{classify_sigma, enc_bound, enc_contains, gamma_set_contains, strip_contains, RegionTag};
pub use symbols::{f_eval, reflect, theta_pencil, Coefficients, POLE_TOLERANCE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rootfinding::RootError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("ω = {re} + {im}i lies on a pole of the Drude-Lorentz symbol")]
    PoleAtOmega { re: f64, im: f64 },
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("degenerate quartic (vanishing leading coefficient)")]
    DegenerateQuartic,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Damping constants and squared coupling strengths.
///
/// `alpha_*` are the values of θ² inside the slab, `theta_*_inf_sq` the
/// values far out in the guide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub gamma_e: f64,
    pub gamma_m: f64,
    pub alpha_e: f64,
    pub alpha_m: f64,
    #[serde(default)]
    pub theta_e_inf_sq: f64,
    #[serde(default)]
    pub theta_m_inf_sq: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl MaterialParams {
    pub fn new(
        gamma_e: f64,
        gamma_m: f64,
        alpha_e: f64,
        alpha_m: f64,
        theta_e_inf_sq: f64,
        theta_m_inf_sq: f64,
    ) -> Result<Self, ModelError> {
        let p = MaterialParams { gamma_e, gamma_m, alpha_e, alpha_m, theta_e_inf_sq, theta_m_inf_sq };
        p.validate()?;
        Ok(p)
    }

    /// γ_e = 4, γ_m = 1, α_e = 400, α_m = 10, vacuum outside the slab.
    pub fn reference() -> Self {
        MaterialParams {
            gamma_e: 4.0,
            gamma_m: 1.0,
            alpha_e: 400.0,
            alpha_m: 10.0,
            theta_e_inf_sq: 0.0,
            theta_m_inf_sq: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.gamma_e,
            self.gamma_m,
            self.alpha_e,
            self.alpha_m,
            self.theta_e_inf_sq,
            self.theta_m_inf_sq,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParams("all parameters must be finite".into()));
        }
        if !(self.gamma_e > 0.0 && self.gamma_m > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "damping constants must be positive (gamma_e = {}, gamma_m = {})",
                self.gamma_e, self.gamma_m
            )));
        }
        if self.alpha_e < 0.0 || self.alpha_m < 0.0 || self.theta_e_inf_sq < 0.0 || self.theta_m_inf_sq < 0.0 {
            return Err(ModelError::InvalidParams("squared couplings must be nonnegative".into()));
        }
        Ok(())
    }

    /// M = max{γ_e, γ_m}, the depth of the numerical-range strip.
    pub fn max_damping(&self) -> f64 {
        self.gamma_e.max(self.gamma_m)
    }

    /// ‖θ_e²‖_∞ over slab and exterior.
    pub fn theta_e_sup(&self) -> f64 {
        self.alpha_e.max(self.theta_e_inf_sq)
    }

    /// ‖θ_m²‖_∞ over slab and exterior.
    pub fn theta_m_sup(&self) -> f64 {
        self.alpha_m.max(self.theta_m_inf_sq)
    }

    pub fn vacuum_at_infinity(&self) -> bool {
        self.theta_e_inf_sq == 0.0 && self.theta_m_inf_sq == 0.0
    }

    /// The two poles −iγ_e, −iγ_m of f.
    pub fn poles(&self) -> [num_complex::Complex64; 2] {
        [
            num_complex::Complex64::new(0.0, -self.gamma_e),
            num_complex::Complex64::new(0.0, -self.gamma_m),
        ]
    }
}
