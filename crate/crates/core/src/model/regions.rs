//! Sign regions Σ₁/Σ₂ and the spectral enclosures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MaterialParams;

/// Tolerance on Re ω · Im(ω + iγ_m/2) below which ω is treated as lying on
/// iℝ ∪ (−iγ_m/2 + ℝ).
const SIGMA_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    Sigma1,
    Sigma2,
    Excluded,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::Sigma1 => "Sigma1",
            RegionTag::Sigma2 => "Sigma2",
            RegionTag::Excluded => "Excluded",
        }
    }
}

/// Σ₁ where Re ω · Im(ω + iγ_m/2) > 0, Σ₂ where it is negative.
pub fn classify_sigma(omega: Complex64, gamma_m: f64) -> RegionTag {
    let product = omega.re * (omega.im + 0.5 * gamma_m);
    if product.abs() <= SIGMA_TOLERANCE {
        RegionTag::Excluded
    } else if product > 0.0 {
        RegionTag::Sigma1
    } else {
        RegionTag::Sigma2
    }
}

/// −max{γ_e, γ_m} ≤ Im ω ≤ 0.
pub fn strip_contains(omega: Complex64, params: &MaterialParams) -> bool {
    omega.im <= 0.0 && omega.im >= -params.max_damping()
}

/// Upper bound on −Im ω allowed by the non-convex enclosure at the given
/// real part.
pub fn enc_bound(re: f64, params: &MaterialParams) -> f64 {
    let strip = params.max_damping();
    if re == 0.0 {
        return strip;
    }
    let k = params.gamma_e * params.theta_e_sup() + params.gamma_m * params.theta_m_sup();
    strip.min(k / (re * re))
}

/// 0 ≤ −Im ω ≤ min(M, (γ_e‖θ_e²‖_∞ + γ_m‖θ_m²‖_∞) / (Re ω)²).
pub fn enc_contains(omega: Complex64, params: &MaterialParams) -> bool {
    let depth = -omega.im;
    depth >= 0.0 && depth <= enc_bound(omega.re, params)
}

/// The refined enclosure Γ.
///
/// On the imaginary axis: Im ω ∈ (−γ_e, 0) with −iγ_m removed. Off the
/// axis: Im ω ≥ −(γ_e + γ_m)/2 together with the non-convex enclosure.
pub fn gamma_set_contains(omega: Complex64, params: &MaterialParams) -> bool {
    if omega.re == 0.0 {
        omega.im > -params.gamma_e && omega.im < 0.0 && omega.im != -params.gamma_m
    } else {
        omega.im >= -0.5 * (params.gamma_e + params.gamma_m) && enc_contains(omega, params)
    }
}
