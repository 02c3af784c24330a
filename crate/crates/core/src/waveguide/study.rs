use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{spectrum, PointClass, Spectrum, SpectrumOptions, WaveguideError};
use crate::geometry::{ModeIndex, Truncation, WaveguideGeometry};
use crate::model::{we_s_infty, HalfLinePair, MaterialParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyOptions {
    /// Strictly increasing truncation lengths, at least three.
    pub x_list: Vec<f64>,
    /// Points at consecutive X farther apart than this are not linked.
    pub link_threshold: f64,
    /// A converging chain must end within 10·tol_link of its target.
    pub tol_link: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions { x_list: vec![5.0, 10.0, 25.0], link_threshold: 0.5, tol_link: 1e-3 }
    }
}

impl StudyOptions {
    pub fn validate(&self, slab_end: f64) -> Result<(), WaveguideError> {
        if self.x_list.len() < 3 {
            return Err(WaveguideError::InvalidInput(format!(
                "a truncation study needs at least 3 values of X, got {}",
                self.x_list.len()
            )));
        }
        if self.x_list.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(WaveguideError::InvalidInput("X values must be strictly increasing".into()));
        }
        if self.x_list.iter().any(|&x| !(x > slab_end) || !x.is_finite()) {
            return Err(WaveguideError::InvalidInput(format!("every X must be finite and exceed {slab_end}")));
        }
        if !(self.link_threshold > 0.0) || !(self.tol_link > 0.0) {
            return Err(WaveguideError::InvalidInput("link_threshold and tol_link must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LimitClass {
    ConvergesToTrueEig { target: Complex64 },
    AccumulatesOnWe { distances: Vec<f64> },
    Undecided,
}

impl LimitClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitClass::ConvergesToTrueEig { .. } => "ConvergesToTrueEig",
            LimitClass::AccumulatesOnWe { .. } => "AccumulatesOnWe",
            LimitClass::Undecided => "Undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub x: f64,
    pub omega: Complex64,
    pub residual: f64,
    pub dist_to_we: f64,
    /// Distance to the nearest full-guide root of the same mode (infinite if
    /// there is none).
    pub dist_to_true: f64,
}

/// One eigenvalue followed through increasing X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub chain_id: usize,
    pub mode: ModeIndex,
    pub links: Vec<ChainLink>,
    pub limit_class: LimitClass,
    /// The chain does not span every X of the study.
    pub broken: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStudy {
    pub x_list: Vec<f64>,
    pub we: HalfLinePair,
    pub full: Spectrum,
    /// One spectrum per X, classes updated from the chains.
    pub spectra: Vec<Spectrum>,
    pub trajectories: Vec<TrajectoryReport>,
}

/// Sweeps the truncated guide for every X and the full guide once, links
/// eigenvalues of the same mode at consecutive X and classifies each chain.
pub fn truncation_study(
    base: &WaveguideGeometry,
    params: &MaterialParams,
    study: &StudyOptions,
    opts: &SpectrumOptions,
) -> Result<TruncationStudy, WaveguideError> {
    study.validate(base.slab_end)?;
    let we = we_s_infty(base, params)?;
    let full = spectrum(&base.with_truncation(Truncation::Infinite)?, params, opts)?;
    let mut spectra = Vec::with_capacity(study.x_list.len());
    for &x in &study.x_list {
        log::info!("truncation study: X = {x}");
        spectra.push(spectrum(&base.with_truncation(Truncation::Finite(x))?, params, opts)?);
    }

    let mut trajectories = Vec::new();
    for mode in WaveguideGeometry::modes(opts.n_max) {
        let targets: Vec<Complex64> = full.mode_points(mode).map(|p| p.omega).collect();
        let layers: Vec<Vec<(usize, Complex64, f64)>> = spectra
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.mode == mode)
                    .map(|(i, p)| (i, p.omega, p.residual))
                    .collect()
            })
            .collect();
        for chain in link_layers(&layers, study.link_threshold) {
            let links: Vec<ChainLink> = chain
                .iter()
                .map(|&(k, j)| {
                    let (_, omega, residual) = layers[k][j];
                    ChainLink {
                        x: study.x_list[k],
                        omega,
                        residual,
                        dist_to_we: we.distance(omega),
                        dist_to_true: nearest(&targets, omega).map_or(f64::INFINITY, |(_, d)| d),
                    }
                })
                .collect();
            let limit_class = classify(&links, &targets, 10.0 * study.tol_link);
            let point_class = match limit_class {
                LimitClass::ConvergesToTrueEig { .. } => Some(PointClass::Converged),
                LimitClass::AccumulatesOnWe { .. } => Some(PointClass::PollutionCandidate),
                LimitClass::Undecided => None,
            };
            if let Some(pc) = point_class {
                for &(k, j) in &chain {
                    spectra[k].points[layers[k][j].0].class = pc;
                }
            }
            let broken = chain.len() != study.x_list.len();
            if broken {
                log::debug!("mode {mode}: chain of length {} does not span the study", chain.len());
            }
            trajectories.push(TrajectoryReport { chain_id: trajectories.len(), mode, links, limit_class, broken });
        }
    }
    Ok(TruncationStudy { x_list: study.x_list.clone(), we, full, spectra, trajectories })
}

fn nearest(targets: &[Complex64], z: Complex64) -> Option<(Complex64, f64)> {
    targets.iter().map(|&t| (t, (t - z).norm())).min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Greedy nearest-neighbour matching between consecutive layers; returns
/// chains as lists of (layer, index). Unmatched points start or end chains.
fn link_layers(layers: &[Vec<(usize, Complex64, f64)>], threshold: f64) -> Vec<Vec<(usize, usize)>> {
    let mut chains: Vec<Vec<(usize, usize)>> = Vec::new();
    // chain index currently ending at each point of the latest layer
    let mut open: Vec<usize> = Vec::new();
    for (k, layer) in layers.iter().enumerate() {
        let mut next_open = vec![usize::MAX; layer.len()];
        if k > 0 {
            let prev = &layers[k - 1];
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (i, a) in prev.iter().enumerate() {
                for (j, b) in layer.iter().enumerate() {
                    let d = (a.1 - b.1).norm();
                    if d < threshold {
                        pairs.push((d, i, j));
                    }
                }
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut used_prev = vec![false; prev.len()];
            for (_, i, j) in pairs {
                if used_prev[i] || next_open[j] != usize::MAX {
                    continue;
                }
                used_prev[i] = true;
                next_open[j] = open[i];
                chains[open[i]].push((k, j));
            }
        }
        for (j, slot) in next_open.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = chains.len();
                chains.push(vec![(k, j)]);
            }
        }
        open = next_open;
    }
    chains
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn classify(links: &[ChainLink], targets: &[Complex64], converge_tol: f64) -> LimitClass {
    if links.len() < 2 {
        return LimitClass::Undecided;
    }
    let last = links[links.len() - 1].omega;
    if let Some((target, d_last)) = nearest(targets, last) {
        let d: Vec<f64> = links.iter().map(|l| (l.omega - target).norm()).collect();
        if strictly_decreasing(&d) && d_last < converge_tol {
            return LimitClass::ConvergesToTrueEig { target };
        }
    }
    let im: Vec<f64> = links.iter().map(|l| l.omega.im.abs()).collect();
    let dw: Vec<f64> = links.iter().map(|l| l.dist_to_we).collect();
    if strictly_decreasing(&im) && strictly_decreasing(&dw) {
        return LimitClass::AccumulatesOnWe { distances: dw };
    }
    LimitClass::Undecided
}
