use std::path::{Path, PathBuf};

use drude_core::fd_oracle::OracleOptions;
use drude_core::rootfinding::SearchRegion;
use drude_core::waveguide::{SpectrumOptions, StudyOptions};
use drude_core::{MaterialParams, ModeIndex, Truncation, WaveguideGeometry};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One JSON document describing a run. Every section is optional and falls
/// back to the reference setup; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub material: MaterialParams,
    pub geometry: GeometryConfig,
    pub search: SpectrumOptions,
    pub study: StudyOptions,
    pub oracle: OracleConfig,
    pub enclosure: EnclosureConfig,
    pub essential: EssentialConfig,
    pub asymptotics: AsymptoticsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub l2: f64,
    pub l3: f64,
    pub slab_end: f64,
    /// Truncation length, a number or "inf".
    pub x: Truncation,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = WaveguideGeometry::reference();
        GeometryConfig { l2: g.l2, l3: g.l3, slab_end: g.slab_end, x: g.truncation }
    }
}

impl GeometryConfig {
    pub fn build(&self) -> Result<WaveguideGeometry, CliError> {
        WaveguideGeometry::new(self.l2, self.l3, self.slab_end, self.x).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub enabled: bool,
    pub x: f64,
    pub modes: Vec<ModeIndex>,
    /// Geometrically decreasing steps; each must divide X.
    pub h_list: Vec<f64>,
    pub region: SearchRegion,
    pub tolerances: OracleOptions,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let x = 5.0;
        OracleConfig {
            enabled: true,
            x,
            modes: vec![ModeIndex { n2: 1, n3: 1 }],
            h_list: vec![x / 512.0, x / 1024.0, x / 2048.0],
            region: SearchRegion::rect(0.5, 25.0, -4.5, -1e-6).expect("valid default"),
            tolerances: OracleOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnclosureConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for EnclosureConfig {
    fn default() -> Self {
        EnclosureConfig { re_min: -30.0, re_max: 30.0, im_min: -6.0, im_max: 1.0, nx: 200, ny: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EssentialConfig {
    /// Range of t sampled on the curve f_∞(ω) = t.
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Samples of the curve of pencil roots for θ² ∈ [0, α_e].
    pub g_curve_samples: usize,
    /// Half-lines are drawn out to |Re ω| = re_extent.
    pub re_extent: f64,
}

impl Default for EssentialConfig {
    fn default() -> Self {
        EssentialConfig { t_min: 0.0, t_max: 900.0, samples: 301, g_curve_samples: 201, re_extent: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticsConfig {
    pub t_list: Vec<f64>,
    /// Exterior couplings used for the large-t expansion; the vacuum
    /// exterior of the material section has no pole branches.
    pub theta_e_inf_sq: f64,
    pub theta_m_inf_sq: f64,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        AsymptoticsConfig { t_list: vec![1e6, 1e8], theta_e_inf_sq: 400.0, theta_m_inf_sq: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json, Format::Svg] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.material.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let geometry = self.geometry.build()?;
        self.search.validate().map_err(|e| CliError::Config(format!("search: {e}")))?;
        self.study.validate(geometry.slab_end).map_err(|e| CliError::Config(format!("study: {e}")))?;
        let e = &self.enclosure;
        SearchRegion::rect(e.re_min, e.re_max, e.im_min, e.im_max)
            .map_err(|err| CliError::Config(format!("enclosure: {err}")))?;
        if e.nx < 2 || e.ny < 2 {
            return bad("enclosure: nx and ny must be at least 2".into());
        }
        let s = &self.essential;
        if !(s.t_min.is_finite() && s.t_max.is_finite()) || s.t_max < s.t_min {
            return bad(format!("essential: t_max = {} is below t_min = {}", s.t_max, s.t_min));
        }
        if s.samples < 2 || s.g_curve_samples < 1 || !(s.re_extent > 0.0) {
            return bad("essential: need samples ≥ 2, g_curve_samples ≥ 1 and re_extent > 0".into());
        }
        let a = &self.asymptotics;
        if a.t_list.is_empty() || a.t_list.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return bad("asymptotics: t_list must hold positive values".into());
        }
        if !(a.theta_e_inf_sq >= 0.0 && a.theta_m_inf_sq >= 0.0) {
            return bad("asymptotics: exterior couplings must be nonnegative".into());
        }
        let o = &self.oracle;
        if o.enabled {
            if !(o.x > geometry.slab_end && o.x.is_finite()) {
                return bad(format!("oracle: x must exceed the slab end {}", geometry.slab_end));
            }
            if o.modes.is_empty() || o.modes.iter().any(|m| m.n2 == 0 || m.n3 == 0) {
                return bad("oracle: modes must be nonempty with indices ≥ 1".into());
            }
            if o.h_list.is_empty() || o.h_list.windows(2).any(|w| !(w[1] < w[0])) {
                return bad("oracle: h_list must be nonempty and strictly decreasing".into());
            }
            o.region.validate().map_err(|err| CliError::Config(format!("oracle: {err}")))?;
        }
        if self.output.formats.is_empty() {
            return bad("output: formats must not be empty".into());
        }
        Ok(())
    }

    pub fn geometry(&self) -> WaveguideGeometry {
        self.geometry.build().expect("validated at load")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_the_reference_setup() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        c.validate().unwrap();
        assert_eq!(c.material, MaterialParams::reference());
        assert_eq!(c.geometry(), WaveguideGeometry::reference());
        assert_eq!(c.search.n_max, 6);
        assert_eq!(c.study.x_list, vec![5.0, 10.0, 25.0]);
    }

    #[test]
    fn unknown_keys_are_rejected_at_every_level() {
        for doc in [
            r#"{"materials": {}}"#,
            r#"{"search": {"toll": 1e-9}}"#,
            r#"{"oracle": {"enable": true}}"#,
            r#"{"geometry": {"X": 5}}"#,
            r#"{"output": {"format": ["csv"]}}"#,
        ] {
            assert!(serde_json::from_str::<RunConfig>(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn invalid_values_fail_validation() {
        for doc in [
            r#"{"material": {"gamma_e": 0, "gamma_m": 1, "alpha_e": 400, "alpha_m": 10}}"#,
            r#"{"essential": {"t_min": 10, "t_max": 1}}"#,
            r#"{"enclosure": {"re_min": 1, "re_max": 1}}"#,
            r#"{"geometry": {"x": 0.5}}"#,
            r#"{"study": {"x_list": [5, 10]}}"#,
            r#"{"oracle": {"h_list": [0.01, 0.02]}}"#,
        ] {
            let c: RunConfig = serde_json::from_str(doc).unwrap();
            assert!(c.validate().is_err(), "{doc}");
        }
    }

    #[test]
    fn truncation_accepts_numbers_and_inf() {
        let c: RunConfig = serde_json::from_str(r#"{"geometry": {"x": 25}}"#).unwrap();
        assert_eq!(c.geometry().truncation, Truncation::Finite(25.0));
        let c: RunConfig = serde_json::from_str(r#"{"geometry": {"x": "inf"}}"#).unwrap();
        assert!(c.geometry().truncation.is_infinite());
    }

    #[test]
    fn config_round_trips() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
