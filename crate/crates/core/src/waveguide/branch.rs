//! Square roots and hyperbolic functions with controlled branches and
//! overflow.

use num_complex::Complex64;

/// Below this modulus the even hyperbolic combinations use Taylor series.
pub(crate) const SERIES_RADIUS: f64 = 1e-4;

/// √z with Re √z ≥ 0; a negative real argument maps to +i√|z|.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::new(0.0, (-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

/// cosh z = e^{log_scale}·cosh, sinh z / z = e^{log_scale}·sinhc with
/// log_scale = |Re z|.
///
/// Both functions are even in z, so the sign of z is irrelevant. The scale
/// factor is applied everywhere, not only where overflow threatens, so that
/// mantissas stay O(1) and depend smoothly on z.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EvenHyperbolic {
    pub log_scale: f64,
    pub cosh: Complex64,
    pub sinhc: Complex64,
}

pub(crate) fn even_hyperbolic(z: Complex64) -> EvenHyperbolic {
    let z = if z.re < 0.0 { -z } else { z };
    let damp = (-z.re).exp();
    if z.norm() < SERIES_RADIUS {
        let z2 = z * z;
        // remainders are O(z⁸)
        let cosh = 1.0 + z2 * (0.5 + z2 * (1.0 / 24.0 + z2 / 720.0));
        let sinhc = 1.0 + z2 * (1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 / 5040.0));
        return EvenHyperbolic { log_scale: z.re, cosh: cosh * damp, sinhc: sinhc * damp };
    }
    let phase = Complex64::from_polar(0.5, z.im);
    // e^{−2z} − 1 without cancellation
    let m = expm1(-2.0 * z);
    EvenHyperbolic { log_scale: z.re, cosh: phase * (2.0 + m), sinhc: -phase * m / z }
}

/// e^z − 1, accurate for small |z|.
fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// z coth z, even in z, finite at z = 0.
pub(crate) fn z_coth_z(z: Complex64) -> Complex64 {
    let z = if z.re < 0.0 { -z } else { z };
    if z.norm() < SERIES_RADIUS {
        let z2 = z * z;
        return 1.0 + z2 * (1.0 / 3.0 + z2 * (-1.0 / 45.0 + z2 * 2.0 / 945.0));
    }
    let e2 = (-2.0 * z).exp();
    z * (1.0 + e2) / (1.0 - e2)
}
