//! Serializable sweep output: eigenvalues, essential-spectrum curves, the
//! enclosure boundary and truncation trajectories.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::WaveguideGeometry;
use crate::model::{enc_bound, sigma_e_g_points, we_s_infty, MaterialParams, ModelError};
use crate::waveguide::{SpectrumPoint, TrajectoryReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMetadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    /// The configuration that produced the report, as JSON text.
    pub config: String,
}

/// Where an essential-spectrum sample comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveSource {
    #[serde(rename = "s_infty")]
    SInfty,
    #[serde(rename = "G_points")]
    GPoints,
    #[serde(rename = "G_curve")]
    GCurve,
    #[serde(rename = "We_halfline")]
    WeHalfline,
}

impl CurveSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveSource::SInfty => "s_infty",
            CurveSource::GPoints => "G_points",
            CurveSource::GCurve => "G_curve",
            CurveSource::WeHalfline => "We_halfline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub source: CurveSource,
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSets {
    /// Lower edge of Γ off the imaginary axis, sampled left to right; the
    /// upper edge is the real axis.
    pub gamma_boundary: Vec<Complex64>,
    /// The segment of Γ on the imaginary axis, top then bottom.
    pub gamma_axis: [Complex64; 2],
    /// Threshold c of W_e(S_∞) = (−∞, −c] ∪ [c, ∞); only defined for a
    /// vacuum exterior.
    pub we_threshold: Option<f64>,
    pub sigma_e_g: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

impl ReportSets {
    /// Samples the fixed sets over real parts in `[re_min, re_max]`.
    pub fn new(
        geometry: &WaveguideGeometry,
        params: &MaterialParams,
        re_min: f64,
        re_max: f64,
        samples: usize,
    ) -> Result<Self, ModelError> {
        Ok(ReportSets {
            gamma_boundary: gamma_boundary(params, re_min, re_max, samples)?,
            gamma_axis: [Complex64::new(0.0, 0.0), Complex64::new(0.0, -params.gamma_e)],
            we_threshold: we_s_infty(geometry, params).ok().map(|h| h.threshold),
            sigma_e_g: sigma_e_g_points(params),
            poles: params.poles().to_vec(),
        })
    }
}

/// Lower edge of Γ off the axis: Im ω = −min((γ_e + γ_m)/2, enc bound).
pub fn gamma_boundary(params: &MaterialParams, re_min: f64, re_max: f64, samples: usize) -> Result<Vec<Complex64>, ModelError> {
    if samples < 2 || !(re_max > re_min) {
        return Err(ModelError::InvalidInput(format!(
            "need at least 2 samples over a nonempty range, got {samples} over [{re_min}, {re_max}]"
        )));
    }
    let floor = 0.5 * (params.gamma_e + params.gamma_m);
    Ok((0..samples)
        .map(|k| {
            let re = re_min + (re_max - re_min) * k as f64 / (samples - 1) as f64;
            // the off-axis bound, also at the sample that lands on Re ω = 0
            let bound = if re == 0.0 { params.max_damping() } else { enc_bound(re, params) };
            Complex64::new(re, -bound.min(floor))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumReport {
    pub metadata: ReportMetadata,
    pub points: Vec<SpectrumPoint>,
    pub curves: Vec<Curve>,
    pub sets: ReportSets,
    pub trajectories: Vec<TrajectoryReport>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gamma_set_contains;

    #[test]
    fn boundary_separates_gamma_from_its_complement() {
        let p = MaterialParams::reference();
        for z in gamma_boundary(&p, -30.0, 30.0, 301).unwrap() {
            if z.re == 0.0 {
                continue;
            }
            assert!(gamma_set_contains(z + Complex64::new(0.0, 1e-9), &p), "{z}");
            assert!(!gamma_set_contains(z - Complex64::new(0.0, 1e-9), &p), "{z}");
        }
    }

    #[test]
    fn sets_for_reference_parameters() {
        let s = ReportSets::new(&WaveguideGeometry::reference(), &MaterialParams::reference(), -30.0, 30.0, 11).unwrap();
        assert_eq!(s.sigma_e_g.len(), 6);
        assert_eq!(s.we_threshold, Some(1.0));
        assert_eq!(s.poles.len(), 2);
        assert!(gamma_boundary(&MaterialParams::reference(), 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn curve_tags() {
        let tags: Vec<&str> =
            [CurveSource::SInfty, CurveSource::GPoints, CurveSource::GCurve, CurveSource::WeHalfline].iter().map(|c| c.as_str()).collect();
        assert_eq!(tags, ["s_infty", "G_points", "G_curve", "We_halfline"]);
    }
}
