use num_complex::Complex64;

use super::branch::{even_hyperbolic, principal_sqrt, z_coth_z};
use super::WaveguideError;
use crate::geometry::{ModeIndex, WaveguideGeometry};
use crate::model::{f_eval, Coefficients, MaterialParams, ModelError};
use crate::rootfinding::Polisher;

/// Distance to the λ₂ branch cut below which the full-guide function is not
/// evaluated.
pub const BRANCH_CUT_GAP: f64 = 1e-10;

/// A dispersion value e^{log_scale}·mantissa together with the size of the
/// two terms whose sum it is (in mantissa units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
    pub term_scale: f64,
}

impl ScaledValue {
    /// The unscaled value; overflows for large log_scale.
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// mantissa / term_scale: same argument as the value, modulus at most 1
    /// and small where the two terms cancel.
    pub fn normalized(&self) -> Complex64 {
        if self.term_scale > 0.0 {
            self.mantissa / self.term_scale
        } else {
            self.mantissa
        }
    }

    /// self / other as an ordinary complex number.
    pub fn ratio(&self, other: &ScaledValue) -> Complex64 {
        self.mantissa / other.mantissa * (self.log_scale - other.log_scale).exp()
    }
}

/// λ₂² = κ² − ω².
pub fn lambda2_sq(omega: Complex64, mode: ModeIndex, geometry: &WaveguideGeometry) -> Complex64 {
    geometry.cutoff(mode) - omega * omega
}

/// λ₁² = κ² − f_slab(ω).
pub fn lambda1_sq(
    omega: Complex64,
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<Complex64, ModelError> {
    Ok(geometry.cutoff(mode) - f_eval(omega, params, Coefficients::Slab)?)
}

/// Dispersion relation of one transverse mode, full or truncated according
/// to the geometry.
///
/// With slab length s and vacuum length L = X − s the relations are
///
/// * full: λ₁ coth(λ₁s) + λ₂ = 0, regularized to
///   G = cosh(λ₁s) + s·λ₂·sinh(λ₁s)/(λ₁s);
/// * truncated: λ₁ coth(λ₁s) + λ₂ coth(λ₂L) = 0, regularized to
///   H = L·cosh(λ₁s)·sinh(λ₂L)/(λ₂L) + s·cosh(λ₂L)·sinh(λ₁s)/(λ₁s).
///
/// G is even in λ₁, H is even in λ₁ and λ₂, so only the full relation needs
/// a branch of λ₂ (principal, Re λ₂ ≥ 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub mode: ModeIndex,
    kappa_sq: f64,
    slab: f64,
    vacuum: Option<f64>,
    params: MaterialParams,
}

impl Dispersion {
    pub fn new(mode: ModeIndex, geometry: &WaveguideGeometry, params: &MaterialParams) -> Result<Self, WaveguideError> {
        geometry.validate()?;
        params.validate()?;
        ModeIndex::new(mode.n2, mode.n3)?;
        if !params.vacuum_at_infinity() {
            return Err(ModelError::UnsupportedParams("the guide outside the slab must be vacuum (θ∞ = 0)".into()).into());
        }
        Ok(Dispersion {
            mode,
            kappa_sq: geometry.cutoff(mode),
            slab: geometry.slab_end,
            vacuum: geometry.vacuum_length(),
            params: *params,
        })
    }

    pub fn kappa_sq(&self) -> f64 {
        self.kappa_sq
    }

    pub fn is_truncated(&self) -> bool {
        self.vacuum.is_some()
    }

    pub fn lambda1_sq(&self, omega: Complex64) -> Result<Complex64, ModelError> {
        Ok(self.kappa_sq - f_eval(omega, &self.params, Coefficients::Slab)?)
    }

    pub fn lambda2_sq(&self, omega: Complex64) -> Complex64 {
        self.kappa_sq - omega * omega
    }

    /// Principal λ₂, refusing points on or next to the cut.
    pub fn lambda2(&self, omega: Complex64) -> Result<Complex64, WaveguideError> {
        if omega.im.abs() <= BRANCH_CUT_GAP && omega.re.abs() >= self.kappa_sq.sqrt() - BRANCH_CUT_GAP {
            return Err(WaveguideError::BranchCut { re: omega.re, im: omega.im });
        }
        Ok(principal_sqrt(self.lambda2_sq(omega)))
    }

    /// Regularized dispersion function in log-scaled form.
    pub fn eval(&self, omega: Complex64) -> Result<ScaledValue, WaveguideError> {
        let s = self.slab;
        let l1 = principal_sqrt(self.lambda1_sq(omega)?);
        let slab = even_hyperbolic(l1 * s);
        match self.vacuum {
            None => {
                let l2 = self.lambda2(omega)?;
                let t2 = s * l2 * slab.sinhc;
                Ok(ScaledValue {
                    mantissa: slab.cosh + t2,
                    log_scale: slab.log_scale,
                    term_scale: slab.cosh.norm() + t2.norm(),
                })
            }
            Some(len) => {
                let l2 = principal_sqrt(self.lambda2_sq(omega));
                let vac = even_hyperbolic(l2 * len);
                let t1 = len * slab.cosh * vac.sinhc;
                let t2 = s * vac.cosh * slab.sinhc;
                Ok(ScaledValue {
                    mantissa: t1 + t2,
                    log_scale: slab.log_scale + vac.log_scale,
                    term_scale: t1.norm() + t2.norm(),
                })
            }
        }
    }

    /// The mantissa: the dispersion function times the smooth positive factor
    /// e^{−log_scale}, used for the argument principle. NaN where the
    /// dispersion function cannot be evaluated.
    pub fn hunt(&self, omega: Complex64) -> Complex64 {
        match self.eval(omega) {
            Ok(v) => v.mantissa,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// The unregularized left-hand side λ₁ coth(λ₁s) + λ₂ [coth(λ₂L)].
    pub fn raw_residual(&self, omega: Complex64) -> Result<Complex64, WaveguideError> {
        let s = self.slab;
        let l1 = principal_sqrt(self.lambda1_sq(omega)?);
        let slab = z_coth_z(l1 * s) / s;
        match self.vacuum {
            None => Ok(slab + self.lambda2(omega)?),
            Some(len) => {
                let l2 = principal_sqrt(self.lambda2_sq(omega));
                Ok(slab + z_coth_z(l2 * len) / len)
            }
        }
    }
}

impl Polisher for Dispersion {
    fn newton_step(&self, z: Complex64) -> Option<Complex64> {
        let h = 1e-7 * (1.0 + z.norm());
        let v0 = self.eval(z).ok()?;
        let vp = self.eval(z + h).ok()?;
        let vm = self.eval(z - h).ok()?;
        // F′/F from ratios, so the exponential scale cancels
        let logd = (vp.ratio(&v0) - vm.ratio(&v0)) / (2.0 * h);
        let step = logd.inv();
        step.is_finite().then_some(step)
    }

    fn residual(&self, z: Complex64) -> f64 {
        self.raw_residual(z).map(|r| r.norm()).unwrap_or(f64::INFINITY)
    }
}

/// Regularized full-guide function G.
pub fn dispersion_full(
    omega: Complex64,
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<ScaledValue, WaveguideError> {
    let g = geometry.with_truncation(crate::Truncation::Infinite)?;
    Dispersion::new(mode, &g, params)?.eval(omega)
}

/// λ₁ coth(λ₁s) + λ₂ for the full guide.
pub fn dispersion_full_raw(
    omega: Complex64,
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<Complex64, WaveguideError> {
    let g = geometry.with_truncation(crate::Truncation::Infinite)?;
    Dispersion::new(mode, &g, params)?.raw_residual(omega)
}

/// Regularized truncated-guide function H; the geometry must be finite.
pub fn dispersion_truncated(
    omega: Complex64,
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<ScaledValue, WaveguideError> {
    finite_dispersion(mode, geometry, params)?.eval(omega)
}

/// λ₁ coth(λ₁s) + λ₂ coth(λ₂L) for the truncated guide.
pub fn dispersion_truncated_raw(
    omega: Complex64,
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<Complex64, WaveguideError> {
    finite_dispersion(mode, geometry, params)?.raw_residual(omega)
}

fn finite_dispersion(
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
) -> Result<Dispersion, WaveguideError> {
    if geometry.truncation.is_infinite() {
        return Err(WaveguideError::InvalidInput("truncated dispersion needs a finite X".into()));
    }
    Dispersion::new(mode, geometry, params)
}
