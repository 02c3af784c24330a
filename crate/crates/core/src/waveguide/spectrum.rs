use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dispersion, WaveguideError};
use crate::geometry::{ModeIndex, Truncation, WaveguideGeometry};
use crate::model::{classify_sigma, enc_contains, gamma_set_contains, reflect, strip_contains, MaterialParams, RegionTag};
use crate::rootfinding::{isolate_roots_with, IsolateOptions, Isolation, Polisher, RootError, SearchRegion};

/// Half-height of the band around the real axis removed for the full guide.
const AXIS_BAND: f64 = 1e-6;
/// Roots from neighbouring tiles closer than this (relative) are merged.
const DUPLICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumOptions {
    pub region: SearchRegion,
    /// Modes with 1 ≤ n2, n3 ≤ n_max are swept.
    pub n_max: u32,
    /// Raw residual a root must reach to be certified.
    pub tol: f64,
    /// Half-side of the squares cut out around the poles −iγ_e, −iγ_m.
    pub pole_radius: f64,
    /// Largest side of the rectangles handed to one isolation task.
    pub tile_size: f64,
    /// A single zero whose polish fails in a rectangle smaller than this is
    /// reported as unresolved.
    pub min_diameter: f64,
    /// Zero-count limit per tile.
    pub max_roots: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            region: SearchRegion::rect(-30.0, 30.0, -5.0, -1e-6).expect("default region is valid"),
            n_max: 6,
            tol: 1e-9,
            pole_radius: 0.05,
            tile_size: 5.0,
            min_diameter: 1e-9,
            max_roots: 20_000,
        }
    }
}

impl SpectrumOptions {
    pub fn validate(&self) -> Result<(), WaveguideError> {
        self.region.validate()?;
        let positive = [self.tol, self.pole_radius, self.tile_size, self.min_diameter];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(WaveguideError::InvalidInput(
                "tol, pole_radius, tile_size and min_diameter must be positive".into(),
            ));
        }
        if self.n_max < 1 {
            return Err(WaveguideError::InvalidInput("n_max must be at least 1".into()));
        }
        if self.max_roots < 1 {
            return Err(WaveguideError::InvalidInput("max_roots must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    /// Root of the full-guide relation.
    TrueEig,
    /// Root of a truncated relation, not yet classified.
    TruncatedEig,
    /// Truncated root on a chain drifting towards the essential numerical range.
    PollutionCandidate,
    /// Truncated root on a chain converging to a full-guide root.
    Converged,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::TrueEig => "TrueEig",
            PointClass::TruncatedEig => "TruncatedEig",
            PointClass::PollutionCandidate => "PollutionCandidate",
            PointClass::Converged => "Converged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureVerdict {
    pub in_strip: bool,
    pub in_enc: bool,
    pub in_gamma: bool,
    pub sigma_tag: RegionTag,
}

pub fn enclosure_verdict(omega: Complex64, params: &MaterialParams) -> EnclosureVerdict {
    EnclosureVerdict {
        in_strip: strip_contains(omega, params),
        in_enc: enc_contains(omega, params),
        in_gamma: gamma_set_contains(omega, params),
        sigma_tag: classify_sigma(omega, params.gamma_m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub mode: ModeIndex,
    pub omega: Complex64,
    pub residual: f64,
    pub winding: i64,
    pub class: PointClass,
    pub verdict: EnclosureVerdict,
}

/// A counted zero that could not be certified (or a multiple-zero cluster).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedPoint {
    pub mode: ModeIndex,
    pub estimate: Complex64,
    pub residual: f64,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeFailure {
    pub mode: ModeIndex,
    pub region: SearchRegion,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub truncation: Truncation,
    pub points: Vec<SpectrumPoint>,
    pub unresolved: Vec<UnresolvedPoint>,
    pub failures: Vec<ModeFailure>,
    /// Counted zeros dropped because their raw residual exceeded 10·tol.
    pub rejected_spurious: usize,
}

impl Spectrum {
    pub fn mode_points(&self, mode: ModeIndex) -> impl Iterator<Item = &SpectrumPoint> {
        self.points.iter().filter(move |p| p.mode == mode)
    }

    pub fn omegas(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.omega).collect()
    }
}

/// Cuts `region` along the edges of the obstacles, drops the cells covered
/// by an obstacle and splits the remaining cells into tiles of side at most
/// `tile_size`.
pub fn search_tiles(region: &SearchRegion, obstacles: &[SearchRegion], tile_size: f64) -> Vec<SearchRegion> {
    let mut xs = vec![region.re_min, region.re_max];
    let mut ys = vec![region.im_min, region.im_max];
    for o in obstacles.iter().filter(|o| o.intersects(region)) {
        xs.extend([o.re_min, o.re_max].into_iter().filter(|&x| x > region.re_min && x < region.re_max));
        ys.extend([o.im_min, o.im_max].into_iter().filter(|&y| y > region.im_min && y < region.im_max));
    }
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let mut tiles = Vec::new();
    for wy in ys.windows(2) {
        for wx in xs.windows(2) {
            let cell = region.with_bounds(wx[0], wx[1], wy[0], wy[1]);
            if obstacles.iter().any(|o| o.contains(cell.center())) {
                continue;
            }
            let nx = (cell.width() / tile_size).ceil().max(1.0) as usize;
            let ny = (cell.height() / tile_size).ceil().max(1.0) as usize;
            let (dx, dy) = (cell.width() / nx as f64, cell.height() / ny as f64);
            for j in 0..ny {
                for i in 0..nx {
                    let x0 = cell.re_min + dx * i as f64;
                    let y0 = cell.im_min + dy * j as f64;
                    let x1 = if i + 1 == nx { cell.re_max } else { x0 + dx };
                    let y1 = if j + 1 == ny { cell.im_max } else { y0 + dy };
                    tiles.push(cell.with_bounds(x0, x1, y0, y1));
                }
            }
        }
    }
    tiles
}

fn obstacles(region: &SearchRegion, params: &MaterialParams, opts: &SpectrumOptions, infinite: bool) -> Vec<SearchRegion> {
    let r = opts.pole_radius;
    let mut out: Vec<SearchRegion> =
        params.poles().iter().map(|p| region.with_bounds(p.re - r, p.re + r, p.im - r, p.im + r)).collect();
    if infinite {
        out.push(region.with_bounds(region.re_min - 1.0, region.re_max + 1.0, -AXIS_BAND, AXIS_BAND));
    }
    out
}

/// Certified eigenvalues of every mode with n2, n3 ≤ n_max inside the
/// search region (minus the pole squares and, for the full guide, a thin
/// band around the real axis).
///
/// Rootfinding failures are recorded per (mode, tile) and do not stop the
/// sweep.
pub fn spectrum(
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
    opts: &SpectrumOptions,
) -> Result<Spectrum, WaveguideError> {
    spectrum_of_modes(&WaveguideGeometry::modes(opts.n_max), geometry, params, opts)
}

/// As [`spectrum`] for an explicit list of modes; `opts.n_max` is ignored.
pub fn spectrum_of_modes(
    modes: &[ModeIndex],
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
    opts: &SpectrumOptions,
) -> Result<Spectrum, WaveguideError> {
    opts.validate()?;
    let dispersions = modes
        .iter()
        .map(|&m| Dispersion::new(m, geometry, params))
        .collect::<Result<Vec<_>, _>>()?;
    let infinite = geometry.truncation.is_infinite();
    let tiles = search_tiles(&opts.region, &obstacles(&opts.region, params, opts, infinite), opts.tile_size);
    let iso = IsolateOptions {
        tol_residual: opts.tol,
        max_roots: opts.max_roots,
        min_diameter: opts.min_diameter,
        ..IsolateOptions::default()
    };

    let tasks: Vec<(usize, usize)> = (0..modes.len()).flat_map(|m| (0..tiles.len()).map(move |t| (m, t))).collect();
    let results: Vec<(usize, usize, Result<Isolation, RootError>)> = tasks
        .par_iter()
        .map(|&(m, t)| {
            let d = &dispersions[m];
            let hunt = |w: Complex64| d.hunt(w);
            (m, t, isolate_roots_with(&hunt, d, &tiles[t], &iso))
        })
        .collect();

    let default_class = if infinite { PointClass::TrueEig } else { PointClass::TruncatedEig };
    let mut out = Spectrum {
        truncation: geometry.truncation,
        points: Vec::new(),
        unresolved: Vec::new(),
        failures: Vec::new(),
        rejected_spurious: 0,
    };
    let mut per_mode: Vec<Vec<SpectrumPoint>> = vec![Vec::new(); modes.len()];
    for (m, t, res) in results {
        let mode = modes[m];
        let d = &dispersions[m];
        let iso = match res {
            Ok(iso) => iso,
            Err(e) => {
                log::warn!("mode {mode}, tile {:?}: {e}", tiles[t]);
                out.failures.push(ModeFailure { mode, region: tiles[t], message: e.to_string() });
                continue;
            }
        };
        for r in iso.roots {
            if r.winding != 1 {
                out.unresolved.push(UnresolvedPoint { mode, estimate: r.value, residual: r.residual, winding: r.winding });
                continue;
            }
            let (omega, residual) = snap_to_axis(d, r.value, r.residual, &r.region, opts.tol);
            per_mode[m].push(SpectrumPoint {
                mode,
                omega,
                residual,
                winding: 1,
                class: default_class,
                verdict: enclosure_verdict(omega, params),
            });
        }
        for u in iso.unresolved {
            if !(u.residual <= 10.0 * opts.tol) {
                out.rejected_spurious += 1;
            } else {
                out.unresolved.push(UnresolvedPoint { mode, estimate: u.estimate, residual: u.residual, winding: u.winding });
            }
        }
    }
    for mut pts in per_mode {
        pts.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re).then(a.omega.im.total_cmp(&b.omega.im)));
        let mut kept: Vec<SpectrumPoint> = Vec::with_capacity(pts.len());
        for p in pts {
            let dup = kept
                .iter()
                .rev()
                .take_while(|q| p.omega.re - q.omega.re <= DUPLICATE_TOL * (1.0 + p.omega.norm()))
                .any(|q| (q.omega - p.omega).norm() <= DUPLICATE_TOL * (1.0 + p.omega.norm()));
            if !dup {
                kept.push(p);
            }
        }
        out.points.extend(kept);
    }
    out.failures.sort_by_key(|f| f.mode);
    out.unresolved.sort_by(|a, b| {
        a.mode.cmp(&b.mode).then(a.estimate.re.total_cmp(&b.estimate.re)).then(a.estimate.im.total_cmp(&b.estimate.im))
    });
    Ok(out)
}

/// A simple zero whose isolating rectangle also holds its mirror image
/// −conj ω is on the imaginary axis; put it there exactly when the residual
/// allows.
fn snap_to_axis(d: &Dispersion, z: Complex64, res: f64, rect: &SearchRegion, tol: f64) -> (Complex64, f64) {
    if z.re != 0.0 && rect.contains(reflect(z)) {
        let s = Complex64::new(0.0, z.im);
        let rs = d.residual(s);
        if rs <= tol {
            return (s, rs);
        }
    }
    (z, res)
}
