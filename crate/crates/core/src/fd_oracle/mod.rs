//! Finite-difference check of the truncated problem.
//!
//! The reduced equation −u″ + (κ² − g(ω, x))u = 0 on (0, X), u(0) = u(X) = 0,
//! is discretized by the three-point stencil on a grid with a node on the
//! slab interface. The determinant of the tridiagonal matrix vanishes at the
//! discrete eigenvalues and is evaluated by its three-term recurrence with
//! base-2 renormalization, so no step overflows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ModeIndex, Truncation, WaveguideGeometry};
use crate::model::{f_eval, Coefficients, MaterialParams, ModelError};
use crate::rootfinding::{isolate_roots_with, IsolateOptions, Isolation, Polisher, RootError, SearchRegion};
use crate::waveguide::{principal_sqrt, spectrum_of_modes, SpectrumOptions, WaveguideError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no dispersion root to compare against in the search region")]
    NoReferenceRoot,
    #[error("no finite-difference root found near the reference {re} + {im}i")]
    NoMatchingRoot { re: f64, im: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Waveguide(#[from] WaveguideError),
}

/// Uniform grid on [0, X].
///
/// The node whose control cell [x_j − h/2, x_j + h/2] contains the slab
/// interface carries the cell average of the two coefficients, weighted by
/// `slab_fraction`. A node exactly on the interface gets the arithmetic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    pub x: f64,
    pub h: f64,
    /// Number of intervals; nodes are x_j = j·h, j = 0..=n.
    pub n: usize,
    pub slab_end: f64,
    pub interface_index: usize,
    /// Part of the interface node's control cell inside the slab.
    pub slab_fraction: f64,
}

impl FdGrid {
    pub const MIN_INTERVALS: usize = 16;

    pub fn new(x: f64, slab_end: f64, n: usize) -> Result<Self, FdError> {
        if !(slab_end > 0.0 && x > slab_end && x.is_finite()) {
            return Err(FdError::InvalidInput(format!("need 0 < slab_end < X, got slab_end = {slab_end}, X = {x}")));
        }
        if n < Self::MIN_INTERVALS {
            return Err(FdError::InvalidInput(format!("at least {} intervals required, got {n}", Self::MIN_INTERVALS)));
        }
        let h = x / n as f64;
        let mut k = (slab_end / h).round();
        let mut frac = ((slab_end - (k - 0.5) * h) / h).clamp(0.0, 1.0);
        // snap to the aligned case when the interface sits on a node
        if (frac - 0.5).abs() < 1e-9 {
            frac = 0.5;
        }
        if k < 1.0 {
            k = 1.0;
            frac = 1.0;
        }
        Ok(FdGrid { x, h, n, slab_end, interface_index: k as usize, slab_fraction: frac })
    }

    /// The grid whose step is `h`, which must divide X.
    pub fn with_step(x: f64, slab_end: f64, h: f64) -> Result<Self, FdError> {
        if !(h > 0.0) {
            return Err(FdError::InvalidInput(format!("step must be positive, got {h}")));
        }
        let n = (x / h).round();
        if !((n * h - x).abs() <= 1e-9 * x) {
            return Err(FdError::InvalidInput(format!("step {h} does not divide X = {x}")));
        }
        Self::new(x, slab_end, n as usize)
    }

    pub fn halved(&self) -> FdGrid {
        Self::new(self.x, self.slab_end, 2 * self.n).expect("refining a valid grid")
    }

    pub fn is_aligned(&self) -> bool {
        self.slab_fraction == 0.5
    }
}

/// mantissa·2^exponent with 1 ≤ |mantissa| < 2, or mantissa = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub mantissa: Complex64,
    pub exponent: i64,
}

impl LogDet {
    fn normalize(m: Complex64, e: i64) -> LogDet {
        let r = m.norm();
        if r == 0.0 || !r.is_finite() {
            return LogDet { mantissa: m, exponent: if r == 0.0 { 0 } else { e } };
        }
        let mut k = r.log2().floor() as i64;
        let mut mant = m * pow2(-k);
        // log2 rounding can be off by one at exact powers of two
        while mant.norm() >= 2.0 {
            mant /= 2.0;
            k += 1;
        }
        while mant.norm() < 1.0 {
            mant *= 2.0;
            k -= 1;
        }
        LogDet { mantissa: mant, exponent: e + k }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// ln |det|.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    /// The determinant itself; saturates outside the f64 range.
    pub fn value(&self) -> Complex64 {
        if self.exponent.abs() <= 1000 {
            self.mantissa * pow2(self.exponent)
        } else {
            self.scaled(0.0)
        }
    }

    /// det·e^{−log_shift}, with the combined exponent clamped to ±700.
    pub fn scaled(&self, log_shift: f64) -> Complex64 {
        let e = (self.exponent as f64 * std::f64::consts::LN_2 - log_shift).clamp(-700.0, 700.0);
        self.mantissa * e.exp()
    }
}

fn pow2(k: i64) -> f64 {
    2f64.powi(k.clamp(-1000, 1000) as i32)
}

/// Renormalize the recurrence pair once either member leaves [2⁻⁶⁴, 2⁶⁴].
const RENORM_BITS: i64 = 64;

/// The scalar problem for one transverse mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdProblem {
    pub kappa_sq: f64,
    pub params: MaterialParams,
}

impl FdProblem {
    pub fn new(kappa_sq: f64, params: &MaterialParams) -> Result<Self, FdError> {
        params.validate()?;
        if !(kappa_sq >= 0.0 && kappa_sq.is_finite()) {
            return Err(FdError::InvalidInput(format!("κ² must be finite and nonnegative, got {kappa_sq}")));
        }
        Ok(FdProblem { kappa_sq, params: *params })
    }

    pub fn for_mode(mode: ModeIndex, geometry: &WaveguideGeometry, params: &MaterialParams) -> Result<Self, FdError> {
        Self::new(geometry.cutoff(mode), params)
    }

    /// κ² − g on the slab and in the exterior.
    fn potentials(&self, omega: Complex64) -> Result<(Complex64, Complex64), FdError> {
        let slab = self.kappa_sq - f_eval(omega, &self.params, Coefficients::Slab)?;
        let vac = self.kappa_sq - f_eval(omega, &self.params, Coefficients::Infinity)?;
        Ok((slab, vac))
    }

    pub fn det(&self, omega: Complex64, grid: &FdGrid) -> Result<LogDet, FdError> {
        let (slab, vac) = self.potentials(omega)?;
        let h2 = grid.h * grid.h;
        let diag = |q: Complex64| -(2.0 + h2 * q);
        let t = grid.slab_fraction;
        let (a_slab, a_vac, a_mid) = (diag(slab), diag(vac), diag(t * slab + (1.0 - t) * vac));
        let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let mut exponent = 0i64;
        for j in 1..grid.n {
            let a = match j.cmp(&grid.interface_index) {
                std::cmp::Ordering::Less => a_slab,
                std::cmp::Ordering::Equal => a_mid,
                std::cmp::Ordering::Greater => a_vac,
            };
            let next = a * cur - prev;
            prev = cur;
            cur = next;
            let big = cur.norm().max(prev.norm());
            if !big.is_finite() {
                return Err(FdError::InvalidInput(format!("determinant recurrence overflowed at ω = {omega}")));
            }
            if big > pow2(RENORM_BITS) || (big > 0.0 && big < pow2(-RENORM_BITS)) {
                let k = big.log2().floor() as i64;
                let s = pow2(-k);
                prev *= s;
                cur *= s;
                exponent += k;
            }
        }
        Ok(LogDet::normalize(cur, exponent))
    }

    /// Expected ln |det|: the discrete decay rates times the lengths they act
    /// over, plus ln n. Continuous in ω.
    fn log_scale(&self, omega: Complex64, grid: &FdGrid) -> Result<f64, FdError> {
        let (slab, vac) = self.potentials(omega)?;
        let s = grid.slab_end;
        // discrete rate μ with 2 cosh(μh) − 2 = h²λ²
        let rate = |q: Complex64| (2.0 * (0.5 * grid.h * principal_sqrt(q)).asinh() / grid.h).re.abs();
        Ok(rate(slab) * s + rate(vac) * (grid.x - s) + (grid.n as f64).ln())
    }

    /// det·e^{−log_scale}: an O(1) positive rescaling of the determinant.
    /// NaN where the determinant cannot be evaluated.
    pub fn hunt(&self, omega: Complex64, grid: &FdGrid) -> Complex64 {
        match (self.det(omega, grid), self.log_scale(omega, grid)) {
            (Ok(d), Ok(s)) => d.scaled(s),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

struct FdPolisher<'a> {
    problem: &'a FdProblem,
    grid: &'a FdGrid,
}

impl Polisher for FdPolisher<'_> {
    fn newton_step(&self, z: Complex64) -> Option<Complex64> {
        let h = 1e-7 * (1.0 + z.norm());
        let f = |w| self.problem.hunt(w, self.grid);
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        let step = f(z) / d;
        step.is_finite().then_some(step)
    }

    /// The Newton step length, an estimate of the distance to the zero.
    fn residual(&self, z: Complex64) -> f64 {
        self.newton_step(z).map_or(f64::INFINITY, |s| s.norm())
    }
}

/// Zeros of the finite-difference determinant in `region`, certified to a
/// Newton step below `tol`.
pub fn oracle_spectrum(
    problem: &FdProblem,
    grid: &FdGrid,
    region: &SearchRegion,
    tol: f64,
) -> Result<Isolation, FdError> {
    if let Some(p) = problem.params.poles().into_iter().find(|p| region.contains(*p)) {
        return Err(FdError::InvalidInput(format!("region contains the pole {p}")));
    }
    let f = |w: Complex64| problem.hunt(w, grid);
    let opts = IsolateOptions { tol_residual: tol, ..IsolateOptions::default() };
    Ok(isolate_roots_with(&f, &FdPolisher { problem, grid }, region, &opts)?)
}

/// One finite-difference root and its distance to the nearest certified
/// dispersion root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub h: f64,
    pub fd: Complex64,
    pub nearest: Complex64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleOptions {
    /// The dispersion roots are searched in the region grown by this much,
    /// so that roots just across the edge still pair up.
    pub margin: f64,
    /// Newton step below which a finite-difference root is certified.
    pub fd_tol: f64,
    /// Raw residual below which a dispersion root is certified.
    pub dispersion_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { margin: 0.05, fd_tol: 1e-10, dispersion_tol: 1e-9 }
    }
}

/// Certified truncated-dispersion roots of `mode` for the truncation length
/// of `grid`, searched in `region` grown by the margin.
pub fn dispersion_roots(
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
    grid: &FdGrid,
    region: &SearchRegion,
    opts: &OracleOptions,
) -> Result<Vec<Complex64>, FdError> {
    let g = geometry.with_truncation(Truncation::Finite(grid.x)).map_err(WaveguideError::from)?;
    if g.slab_end != grid.slab_end {
        return Err(FdError::InvalidInput("grid interface differs from the slab end".into()));
    }
    let m = opts.margin;
    let wide = region.with_bounds(region.re_min - m, region.re_max + m, region.im_min - m, region.im_max + m);
    let sweep = SpectrumOptions { region: wide, tol: opts.dispersion_tol, ..SpectrumOptions::default() };
    let s = spectrum_of_modes(&[mode], &g, params, &sweep)?;
    if let Some(f) = s.failures.first() {
        return Err(FdError::InvalidInput(format!("dispersion sweep failed on {:?}: {}", f.region, f.message)));
    }
    Ok(s.omegas())
}

/// Finite-difference roots of `mode` in `region` on `grid`, each paired with
/// the nearest truncated-dispersion root.
pub fn compare_with_dispersion(
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
    grid: &FdGrid,
    region: &SearchRegion,
    opts: &OracleOptions,
) -> Result<Vec<OracleRow>, FdError> {
    let reference = dispersion_roots(mode, geometry, params, grid, region, opts)?;
    let problem = FdProblem::for_mode(mode, geometry, params)?;
    let fd = oracle_spectrum(&problem, grid, region, opts.fd_tol)?;
    Ok(fd
        .roots
        .iter()
        .map(|r| {
            let (nearest, gap) = nearest(&reference, r.value);
            OracleRow { h: grid.h, fd: r.value, nearest, gap }
        })
        .collect())
}

/// Observed convergence of the finite-difference root nearest `reference`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub reference: Complex64,
    pub h: Vec<f64>,
    pub roots: Vec<Complex64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of ln error against ln h.
    pub order: f64,
}

/// Tracks the root nearest `reference` over a geometrically refined
/// sequence of steps and fits the order of convergence.
pub fn convergence_order(
    problem: &FdProblem,
    x: f64,
    slab_end: f64,
    h_list: &[f64],
    reference: Complex64,
    region: &SearchRegion,
    tol: f64,
) -> Result<ConvergenceReport, FdError> {
    validate_steps(h_list)?;
    let grids = h_list.iter().map(|&h| FdGrid::with_step(x, slab_end, h)).collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::with_capacity(grids.len());
    for g in &grids {
        let iso = oracle_spectrum(problem, g, region, tol)?;
        let (z, _) = nearest(&iso.values(), reference);
        if !z.is_finite() {
            return Err(FdError::NoMatchingRoot { re: reference.re, im: reference.im });
        }
        roots.push(z);
    }
    let errors: Vec<f64> = roots.iter().map(|z| (z - reference).norm()).collect();
    let order = observed_order(h_list, &errors);
    Ok(ConvergenceReport { reference, h: h_list.to_vec(), roots, errors, order })
}

/// [`convergence_order`] against the lowest-frequency certified root of the
/// truncated dispersion relation in `region`.
pub fn mode_convergence_order(
    mode: ModeIndex,
    geometry: &WaveguideGeometry,
    params: &MaterialParams,
    x: f64,
    h_list: &[f64],
    region: &SearchRegion,
    opts: &OracleOptions,
) -> Result<ConvergenceReport, FdError> {
    validate_steps(h_list)?;
    let finest = FdGrid::with_step(x, geometry.slab_end, h_list[h_list.len() - 1])?;
    let reference = dispersion_roots(mode, geometry, params, &finest, region, opts)?
        .into_iter()
        .filter(|z| region.contains(*z))
        .min_by(|a, b| a.re.abs().total_cmp(&b.re.abs()).then(b.im.total_cmp(&a.im)))
        .ok_or(FdError::NoReferenceRoot)?;
    let problem = FdProblem::for_mode(mode, geometry, params)?;
    convergence_order(&problem, x, geometry.slab_end, h_list, reference, region, opts.fd_tol)
}

fn validate_steps(h_list: &[f64]) -> Result<(), FdError> {
    if h_list.len() < 3 {
        return Err(FdError::InvalidInput("at least three steps are required".into()));
    }
    let q = h_list[1] / h_list[0];
    let geometric = h_list.windows(2).all(|w| ((w[1] / w[0]) - q).abs() <= 1e-9 * q);
    if !(q > 0.0 && q < 1.0) || !geometric {
        return Err(FdError::InvalidInput("steps must decrease geometrically".into()));
    }
    Ok(())
}

/// Least-squares slope of ln error against ln h.
pub fn observed_order(h: &[f64], errors: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn nearest(set: &[Complex64], z: Complex64) -> (Complex64, f64) {
    set.iter()
        .map(|&w| (w, (w - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((Complex64::new(f64::NAN, f64::NAN), f64::INFINITY))
}
