//! Essential-spectrum sets: the curve f(ω) = t of the exterior Schur
//! complement, the point set σ_e(G) of the step-coefficient slab, its
//! continuous-coefficient counterpart, and the essential numerical range of
//! the exterior problem.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbols::{f_eval, Coefficients};
use super::{MaterialParams, ModelError};
use crate::geometry::WaveguideGeometry;
use crate::rootfinding::{poly_roots, Polynomial};

/// Roots closer than this to a removable pole are discarded.
const SPURIOUS_POLE_RADIUS: f64 = 1e-8;
const CURVE_MERGE_TOL: f64 = 1e-10;
const POINT_MERGE_TOL: f64 = 1e-12;

/// (−∞, −c] ∪ [c, ∞) on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLinePair {
    pub threshold: f64,
}

impl HalfLinePair {
    pub fn new(threshold: f64) -> Result<Self, ModelError> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(ModelError::InvalidInput(format!("half-line threshold must be positive, got {threshold}")));
        }
        Ok(HalfLinePair { threshold })
    }

    pub fn contains(&self, omega: Complex64) -> bool {
        omega.im == 0.0 && omega.re.abs() >= self.threshold
    }

    /// Euclidean distance from ω to the pair of half-lines.
    pub fn distance(&self, omega: Complex64) -> f64 {
        let x = omega.re.abs();
        if x >= self.threshold {
            omega.im.abs()
        } else {
            (self.threshold - x).hypot(omega.im)
        }
    }
}

/// Θ_{e,∞}(ω)Θ_{m,∞}(ω) − t(ω + iγ_e)(ω + iγ_m), monic of degree four.
pub fn s_infty_quartic(t: f64, params: &MaterialParams) -> Result<Polynomial, ModelError> {
    let i = Complex64::i();
    let theta_e = Polynomial::new(vec![(-params.theta_e_inf_sq).into(), i * params.gamma_e, 1.0.into()])?;
    let theta_m = Polynomial::new(vec![(-params.theta_m_inf_sq).into(), i * params.gamma_m, 1.0.into()])?;
    let poles = Polynomial::new(vec![
        (-params.gamma_e * params.gamma_m).into(),
        i * (params.gamma_e + params.gamma_m),
        1.0.into(),
    ])?;
    let q = theta_e.mul(&theta_m)?.sub(&poles.scale(t.into()))?;
    if q.degree() != 4 {
        return Err(ModelError::DegenerateQuartic);
    }
    Ok(q)
}

/// Solutions of f_∞(ω) = t for a single t, with removable pole factors
/// filtered out.
pub fn s_infty_roots(t: f64, params: &MaterialParams) -> Result<Vec<Complex64>, ModelError> {
    let q = s_infty_quartic(t, params)?;
    let mut roots = poly_roots(&q)?;
    for pole in params.poles() {
        let num = super::theta_pencil(pole, params.gamma_e, params.theta_e_inf_sq)
            * super::theta_pencil(pole, params.gamma_m, params.theta_m_inf_sq);
        let scale = 1.0 + params.theta_e_inf_sq * params.theta_m_inf_sq + pole.norm_sqr() * pole.norm_sqr();
        if num.norm() > 1e-12 * scale {
            continue;
        }
        // the linear factor cancels: drop the nearest root if it sits on the pole
        if let Some((idx, d)) = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (k, (r - pole).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        {
            if d <= SPURIOUS_POLE_RADIUS {
                roots.remove(idx);
            }
        }
    }
    Ok(roots)
}

/// Samples the curve {ω : f_∞(ω) = t} for t on a uniform grid of
/// `[t_min, t_max]`.
pub fn essential_curve_s_infty(
    params: &MaterialParams,
    t_min: f64,
    t_max: f64,
    n_samples: usize,
) -> Result<Vec<Complex64>, ModelError> {
    if n_samples < 2 {
        return Err(ModelError::InvalidInput(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(t_min.is_finite() && t_max.is_finite()) || t_max < t_min {
        return Err(ModelError::InvalidInput(format!("invalid parameter range [{t_min}, {t_max}]")));
    }
    let step = (t_max - t_min) / (n_samples - 1) as f64;
    let mut out = Vec::with_capacity(4 * n_samples);
    for k in 0..n_samples {
        let t = if k + 1 == n_samples { t_max } else { t_min + step * k as f64 };
        out.extend(s_infty_roots(t, params)?);
    }
    Ok(merge_close(out, CURVE_MERGE_TOL))
}

/// √x for real x, with √(negative) = i√|x|.
fn real_sqrt_branch(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// The six points {0, −iγ_e, −iγ_e/2 ± √(α_e − γ_e²/4), −iγ_e/2 ± √(α_e/2 − γ_e²/4)}
/// of σ_e(G) for the step-coefficient slab, duplicates merged.
pub fn sigma_e_g_points(params: &MaterialParams) -> Vec<Complex64> {
    let ge = params.gamma_e;
    let centre = Complex64::new(0.0, -0.5 * ge);
    let q = 0.25 * ge * ge;
    let s_full = real_sqrt_branch(params.alpha_e - q);
    let s_half = real_sqrt_branch(0.5 * params.alpha_e - q);
    let pts = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, -ge),
        centre + s_full,
        centre - s_full,
        centre + s_half,
        centre - s_half,
    ];
    merge_close(pts, POINT_MERGE_TOL)
}

/// Roots of ω² + iγ_eω − θ² for θ² sampled uniformly over `theta_sq_range`,
/// both signs of the square root emitted for every sample.
pub fn sigma_e_g_curve(
    theta_sq_range: (f64, f64),
    gamma_e: f64,
    n_samples: usize,
) -> Result<Vec<Complex64>, ModelError> {
    let (lo, hi) = theta_sq_range;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(ModelError::InvalidInput(format!("θ² range [{lo}, {hi}] must lie in [0, ∞)")));
    }
    if n_samples == 0 {
        return Err(ModelError::InvalidInput("need at least one sample".into()));
    }
    let centre = Complex64::new(0.0, -0.5 * gamma_e);
    let q = 0.25 * gamma_e * gamma_e;
    let mut out = Vec::with_capacity(2 * n_samples);
    for k in 0..n_samples {
        let theta_sq = if n_samples == 1 {
            lo
        } else if k + 1 == n_samples {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n_samples - 1) as f64
        };
        let s = real_sqrt_branch(theta_sq - q);
        out.push(centre + s);
        out.push(centre - s);
    }
    Ok(out)
}

/// W_e(S_∞) = (−∞, −π/max{L2,L3}] ∪ [π/max{L2,L3}, ∞) for a vacuum exterior.
pub fn we_s_infty(geometry: &WaveguideGeometry, params: &MaterialParams) -> Result<HalfLinePair, ModelError> {
    if !params.vacuum_at_infinity() {
        return Err(ModelError::UnsupportedParams(
            "half-line form of W_e(S_∞) needs θ⁰ = 0; use we_s_infty_contains".into(),
        ));
    }
    HalfLinePair::new(PI / geometry.l2.max(geometry.l3))
}

/// Membership in {ω : f_∞(ω) ∈ [κ_min², ∞)} up to `tol`.
pub fn we_s_infty_contains(omega: Complex64, geometry: &WaveguideGeometry, params: &MaterialParams, tol: f64) -> bool {
    match f_eval(omega, params, Coefficients::Infinity) {
        Ok(f) => f.im.abs() <= tol && f.re >= geometry.essential_threshold_sq() - tol,
        Err(_) => false,
    }
}

/// Sorts by (Re, Im) and drops points within `tol` of an already kept one.
pub(crate) fn merge_close(mut pts: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut kept: Vec<Complex64> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = kept.iter().rev().take_while(|k| p.re - k.re <= tol).any(|k| (p - k).norm() <= tol);
        if !dup {
            kept.push(p);
        }
    }
    kept
}
