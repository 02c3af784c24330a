use num_complex::Complex64;

use super::{MaterialParams, ModelError};

/// Absolute distance to −iγ_e or −iγ_m below which f is not evaluated.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Which θ² values enter a symbol: the slab (α) or the exterior (θ⁰).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Slab,
    Infinity,
}

/// Θ(ω) = ω² + iγω − θ².
#[inline]
pub fn theta_pencil(omega: Complex64, gamma: f64, theta_sq: f64) -> Complex64 {
    omega * (omega + Complex64::new(0.0, gamma)) - theta_sq
}

/// f(ω) = Θ_e(ω)Θ_m(ω) / ((ω + iγ_e)(ω + iγ_m)).
///
/// Written as (ω − θ_e²/(ω + iγ_e))(ω − θ_m²/(ω + iγ_m)), which is the same
/// rational function and keeps the reflection symmetry exact in floating
/// point.
pub fn f_eval(omega: Complex64, params: &MaterialParams, which: Coefficients) -> Result<Complex64, ModelError> {
    let (te, tm) = match which {
        Coefficients::Slab => (params.alpha_e, params.alpha_m),
        Coefficients::Infinity => (params.theta_e_inf_sq, params.theta_m_inf_sq),
    };
    let de = omega + Complex64::new(0.0, params.gamma_e);
    let dm = omega + Complex64::new(0.0, params.gamma_m);
    if de.norm() <= POLE_TOLERANCE || dm.norm() <= POLE_TOLERANCE {
        return Err(ModelError::PoleAtOmega { re: omega.re, im: omega.im });
    }
    Ok((omega - te / de) * (omega - tm / dm))
}

/// ω ↦ −ω̄, the reflection across the imaginary axis.
#[inline]
pub fn reflect(omega: Complex64) -> Complex64 {
    Complex64::new(-omega.re, omega.im)
}
