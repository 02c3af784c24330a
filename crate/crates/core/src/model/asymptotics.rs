//! Large-t behaviour of the solutions of f_∞(ω) = t.
//!
//! Two families exist: roots that stay bounded collapse onto the poles
//! −iγ_e, −iγ_m like 1/t, and roots with growing real part approach the real
//! axis like 1/(Re ω)².
//!
//! The published coefficients for both families disagree with a direct
//! expansion of the quartic. Both forms are kept: [`AsymptoticConvention::AsStated`]
//! reproduces the printed formulas, [`AsymptoticConvention::Rederived`] is the
//! form confirmed by the quartic solver and is what [`asymptotic_root`] uses.
//!
//! | family     | as stated                          | rederived                       |
//! |------------|------------------------------------|---------------------------------|
//! | near pole  | c = θ_x²(−γ_x + θ_x²θ_y²/(γ_y−γ_x)) | c = θ_x²(−γ_x + θ_y²/(γ_y−γ_x)) |
//! | large real | Im ω = −K/(Re ω)²                  | Im ω = −K/(2 (Re ω)²)           |
//!
//! with K = θ_e⁰²γ_e + θ_m⁰²γ_m.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MaterialParams, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymptoticBranch {
    NearPoleE,
    NearPoleM,
    LargeRealPos,
    LargeRealNeg,
}

impl AsymptoticBranch {
    pub const ALL: [AsymptoticBranch; 4] = [
        AsymptoticBranch::NearPoleE,
        AsymptoticBranch::NearPoleM,
        AsymptoticBranch::LargeRealPos,
        AsymptoticBranch::LargeRealNeg,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AsymptoticBranch::NearPoleE => "near_pole_e",
            AsymptoticBranch::NearPoleM => "near_pole_m",
            AsymptoticBranch::LargeRealPos => "large_real_pos",
            AsymptoticBranch::LargeRealNeg => "large_real_neg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymptoticConvention {
    AsStated,
    Rederived,
}

/// The constant c in ω ≈ −iγ_x − ic/t for the pole branches.
pub fn near_pole_coefficient(
    branch: AsymptoticBranch,
    params: &MaterialParams,
    convention: AsymptoticConvention,
) -> Result<f64, ModelError> {
    let (gx, tx, gy, ty) = match branch {
        AsymptoticBranch::NearPoleE => (params.gamma_e, params.theta_e_inf_sq, params.gamma_m, params.theta_m_inf_sq),
        AsymptoticBranch::NearPoleM => (params.gamma_m, params.theta_m_inf_sq, params.gamma_e, params.theta_e_inf_sq),
        _ => {
            return Err(ModelError::InvalidInput(format!("{} has no pole coefficient", branch.as_str())));
        }
    };
    if gx == gy {
        return Err(ModelError::DegenerateParams("γ_e = γ_m: the pole coefficient is undefined".into()));
    }
    let coupling = match convention {
        AsymptoticConvention::AsStated => tx * ty,
        AsymptoticConvention::Rederived => ty,
    };
    Ok(tx * (-gx + coupling / (gy - gx)))
}

/// Leading-order root of f_∞(ω) = t on the requested branch, using the
/// coefficients confirmed against the quartic.
pub fn asymptotic_root(t: f64, branch: AsymptoticBranch, params: &MaterialParams) -> Result<Complex64, ModelError> {
    asymptotic_root_with(t, branch, params, AsymptoticConvention::Rederived)
}

pub fn asymptotic_root_with(
    t: f64,
    branch: AsymptoticBranch,
    params: &MaterialParams,
    convention: AsymptoticConvention,
) -> Result<Complex64, ModelError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ModelError::InvalidInput(format!("t must be positive, got {t}")));
    }
    match branch {
        AsymptoticBranch::NearPoleE | AsymptoticBranch::NearPoleM => {
            let c = near_pole_coefficient(branch, params, convention)?;
            let gx = if branch == AsymptoticBranch::NearPoleE { params.gamma_e } else { params.gamma_m };
            Ok(Complex64::new(0.0, -gx - c / t))
        }
        AsymptoticBranch::LargeRealPos | AsymptoticBranch::LargeRealNeg => {
            let k = params.theta_e_inf_sq * params.gamma_e + params.theta_m_inf_sq * params.gamma_m;
            // t = x² − θ_e⁰² − θ_m⁰² + o(1)
            let x = (t + params.theta_e_inf_sq + params.theta_m_inf_sq).sqrt();
            let x = if branch == AsymptoticBranch::LargeRealPos { x } else { -x };
            let y = match convention {
                AsymptoticConvention::AsStated => -k / (x * x),
                AsymptoticConvention::Rederived => -k / (2.0 * x * x),
            };
            Ok(Complex64::new(x, y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surrogate() -> MaterialParams {
        MaterialParams { theta_e_inf_sq: 400.0, theta_m_inf_sq: 10.0, ..MaterialParams::reference() }
    }

    #[test]
    fn stated_pole_coefficient() {
        let c = near_pole_coefficient(AsymptoticBranch::NearPoleE, &surrogate(), AsymptoticConvention::AsStated).unwrap();
        assert!((c - (-534_933.333_333_333_3)).abs() < 1e-6, "{c}");
    }

    #[test]
    fn rederived_pole_coefficient() {
        let c = near_pole_coefficient(AsymptoticBranch::NearPoleE, &surrogate(), AsymptoticConvention::Rederived).unwrap();
        assert!((c - (-2_933.333_333_333_333)).abs() < 1e-9, "{c}");
        let cm = near_pole_coefficient(AsymptoticBranch::NearPoleM, &surrogate(), AsymptoticConvention::Rederived).unwrap();
        // 10 (−1 + 400/3)
        assert!((cm - 10.0 * (-1.0 + 400.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn vacuum_pole_branch_sits_on_the_pole() {
        let p = MaterialParams::reference();
        let w = asymptotic_root(1e6, AsymptoticBranch::NearPoleE, &p).unwrap();
        assert_eq!(w, Complex64::new(0.0, -4.0));
    }

    #[test]
    fn equal_damping_is_degenerate() {
        let p = MaterialParams { gamma_m: 4.0, ..surrogate() };
        assert!(matches!(
            asymptotic_root(1e6, AsymptoticBranch::NearPoleM, &p),
            Err(ModelError::DegenerateParams(_))
        ));
        assert!(asymptotic_root(1e6, AsymptoticBranch::LargeRealPos, &p).is_ok());
    }

    #[test]
    fn large_real_branch_shape() {
        let w = asymptotic_root(1e8, AsymptoticBranch::LargeRealPos, &surrogate()).unwrap();
        assert!((w.re - 1e4).abs() < 1.0);
        assert!(w.im < 0.0 && w.im.abs() < 1e-4);
        let v = asymptotic_root(1e8, AsymptoticBranch::LargeRealNeg, &surrogate()).unwrap();
        assert_eq!(v, crate::model::reflect(w));
        assert!(asymptotic_root(-1.0, AsymptoticBranch::LargeRealPos, &surrogate()).is_err());
    }
}
