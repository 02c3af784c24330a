use std::fs;
use std::path::{Path, PathBuf};

use drude_core::rootfinding::SearchRegion;
use drude_core::ModeIndex;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const ENCLOSURE_HEADER: [&str; 6] = ["re", "im", "in_strip", "in_enc", "in_gamma", "sigma_tag"];
pub const ESSENTIAL_HEADER: [&str; 3] = ["re", "im", "source"];
pub const EIGS_HEADER: [&str; 8] = ["n2", "n3", "re_omega", "im_omega", "residual", "winding", "in_gamma", "sigma_tag"];
pub const STUDY_HEADER: [&str; 9] =
    ["X", "n2", "n3", "re_omega", "im_omega", "chain_id", "class", "dist_to_We", "dist_to_true"];
pub const ORACLE_HEADER: [&str; 7] = ["n2", "n3", "h", "re_fd", "im_fd", "gap_to_dispersion", "observed_order"];
pub const ASYMPTOTICS_HEADER: [&str; 7] = ["t", "branch", "re_asym", "im_asym", "re_quartic", "im_quartic", "abs_error"];

/// A non-fatal problem met during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Warning {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<ModeIndex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub region: Option<SearchRegion>,
    pub message: String,
}

impl Warning {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Warning { kind: kind.into(), mode: None, region: None, message: message.into() }
    }

    pub fn for_mode(kind: &str, mode: ModeIndex, message: impl Into<String>) -> Self {
        Warning { mode: Some(mode), ..Warning::new(kind, message) }
    }
}

pub fn write_csv<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<PathBuf, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io { path: path.into(), source: e.into() })?;
    let io = |e: csv::Error| CliError::Io { path: path.into(), source: e.into() };
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.as_ref()).map_err(io)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(path.into())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    fs::write(path, text).map_err(CliError::io(path))?;
    Ok(path.into())
}

pub fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

/// Shortest round-trip text, in exponent form for very small or large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}
