use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{winding_count, RootError, SearchRegion};

/// Split fractions tried in turn when a child boundary hits a zero. Kept off
/// 1/2 so that symmetric regions are not cut along their symmetry axis.
const SPLITS: [(f64, f64); 4] = [(0.5137, 0.4921), (0.4783, 0.5269), (0.5419, 0.4637), (0.4571, 0.5483)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolateOptions {
    /// Residual a polished root must reach to be certified.
    pub tol_residual: f64,
    /// Upper bound on the zero count of the whole region.
    pub max_roots: usize,
    /// A single zero whose polish fails in a rectangle smaller than this is
    /// reported as unresolved instead of being split further.
    pub min_diameter: f64,
    pub newton_max_iter: usize,
    /// Boundary perturbation attempts before a count error is propagated.
    pub retries: usize,
}

impl Default for IsolateOptions {
    fn default() -> Self {
        IsolateOptions { tol_residual: 1e-10, max_roots: 10_000, min_diameter: 1e-9, newton_max_iter: 50, retries: 3 }
    }
}

/// A zero enclosed by a rectangle of known winding number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRoot {
    pub value: Complex64,
    pub residual: f64,
    pub winding: i64,
    pub region: SearchRegion,
}

/// A counted zero whose Newton polish did not reach the tolerance inside its
/// rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedRoot {
    pub estimate: Complex64,
    pub residual: f64,
    pub winding: i64,
    pub region: SearchRegion,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Isolation {
    pub roots: Vec<CertifiedRoot>,
    pub unresolved: Vec<UnresolvedRoot>,
}

impl Isolation {
    fn extend(&mut self, other: Isolation) {
        self.roots.extend(other.roots);
        self.unresolved.extend(other.unresolved);
    }

    fn sort(&mut self) {
        self.roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
        self.unresolved
            .sort_by(|a, b| a.estimate.re.total_cmp(&b.estimate.re).then(a.estimate.im.total_cmp(&b.estimate.im)));
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

/// Newton polish for a function known only through its zeros' neighbourhood.
pub trait Polisher: Sync {
    /// The Newton correction F(z)/F′(z), `None` where it cannot be formed.
    fn newton_step(&self, z: Complex64) -> Option<Complex64>;
    /// Residual used to certify a polished root.
    fn residual(&self, z: Complex64) -> f64;
}

/// Newton with a central-difference derivative, residual |F(z)|.
pub struct CentralDifference<'a, F: ?Sized>(pub &'a F);

impl<F> Polisher for CentralDifference<'_, F>
where
    F: Fn(Complex64) -> Complex64 + Sync + ?Sized,
{
    fn newton_step(&self, z: Complex64) -> Option<Complex64> {
        let h = 1e-7 * (1.0 + z.norm());
        let d = ((self.0)(z + h) - (self.0)(z - h)) / (2.0 * h);
        let step = (self.0)(z) / d;
        step.is_finite().then_some(step)
    }

    fn residual(&self, z: Complex64) -> f64 {
        (self.0)(z).norm()
    }
}

/// Isolates and polishes every zero of `f` in `region`, Newton acting on `f`
/// itself.
pub fn isolate_roots<F>(f: &F, region: &SearchRegion, opts: &IsolateOptions) -> Result<Isolation, RootError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    isolate_roots_with(f, &CentralDifference(f), region, opts)
}

/// Isolates the zeros of `f` (used only through its argument) and polishes
/// them with `polisher`.
pub fn isolate_roots_with<F, P>(
    f: &F,
    polisher: &P,
    region: &SearchRegion,
    opts: &IsolateOptions,
) -> Result<Isolation, RootError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    P: Polisher,
{
    region.validate()?;
    if !(opts.tol_residual > 0.0) || !(opts.min_diameter > 0.0) {
        return Err(RootError::InvalidInput("tolerances must be positive".into()));
    }
    let mut rect = *region;
    let mut attempt = 0;
    let count = loop {
        match winding_count(f, &rect) {
            Ok(n) => break n,
            Err(e @ (RootError::BoundaryZero { .. } | RootError::PhaseUnresolved(_))) => {
                if attempt >= opts.retries {
                    return Err(e);
                }
                attempt += 1;
                rect = rect.grow(1e-6);
            }
            Err(e) => return Err(e),
        }
    };
    if count < 0 {
        return Err(RootError::PolesInside(count));
    }
    if count as usize > opts.max_roots {
        return Err(RootError::TooManyRoots { found: count, limit: opts.max_roots });
    }
    let mut out = descend(f, polisher, rect, count, 0, opts)?;
    out.sort();
    Ok(out)
}

fn descend<F, P>(
    f: &F,
    polisher: &P,
    rect: SearchRegion,
    count: i64,
    depth: u32,
    opts: &IsolateOptions,
) -> Result<Isolation, RootError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    P: Polisher,
{
    if count == 0 {
        return Ok(Isolation::default());
    }
    let at_floor = depth >= rect.max_depth;
    // A single zero is polished as soon as it is alone: a converged Newton
    // iterate inside a rectangle of winding number one is that zero.
    // Clusters are only polished once the depth limit is reached.
    if count == 1 || at_floor {
        match polish(polisher, &rect, count, opts) {
            Ok(root) => return Ok(Isolation { roots: vec![root], unresolved: vec![] }),
            Err(unresolved) if at_floor || rect.diameter() < opts.min_diameter => {
                return Ok(Isolation { roots: vec![], unresolved: vec![unresolved] })
            }
            Err(_) => {}
        }
    }

    let mut last_err = None;
    for &(fx, fy) in SPLITS.iter().take(opts.retries + 1) {
        let kids = rect.quadrisect(fx, fy);
        let counts: Result<Vec<i64>, RootError> = kids.par_iter().map(|k| winding_count(f, k)).collect();
        let counts = match counts {
            Ok(c) => c,
            Err(e @ (RootError::BoundaryZero { .. } | RootError::PhaseUnresolved(_))) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let total: i64 = counts.iter().sum();
        if total != count || counts.iter().any(|&n| n < 0) {
            log::debug!("inconsistent split of {rect:?}: parent {count}, children {counts:?}");
            last_err = Some(RootError::Inconsistent { parent: count, children: total });
            continue;
        }
        let parts: Result<Vec<Isolation>, RootError> = kids
            .par_iter()
            .zip(counts.par_iter())
            .map(|(k, &n)| descend(f, polisher, *k, n, depth + 1, opts))
            .collect();
        let mut out = Isolation::default();
        for p in parts? {
            out.extend(p);
        }
        return Ok(out);
    }
    Err(last_err.unwrap_or(RootError::Inconsistent { parent: count, children: -1 }))
}

fn polish<P: Polisher>(
    polisher: &P,
    rect: &SearchRegion,
    count: i64,
    opts: &IsolateOptions,
) -> Result<CertifiedRoot, UnresolvedRoot> {
    let mut z = rect.center();
    let mut res = polisher.residual(z);
    let mut certified_steps = 0;
    for _ in 0..opts.newton_max_iter {
        if res <= opts.tol_residual {
            // a couple of extra steps drive the root to rounding level
            certified_steps += 1;
            if certified_steps > 2 {
                break;
            }
        }
        let Some(step) = polisher.newton_step(z) else { break };
        let next = z - step;
        let next_res = polisher.residual(next);
        if !next_res.is_finite() || (res <= opts.tol_residual && next_res >= res) {
            break;
        }
        z = next;
        res = next_res;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    let margin = 1e-9 * (1.0 + z.norm());
    if res <= opts.tol_residual && rect.contains_with_margin(z, margin) {
        Ok(CertifiedRoot { value: z, residual: res, winding: count, region: *rect })
    } else {
        Err(UnresolvedRoot { estimate: z, residual: res, winding: count, region: *rect })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfinding::{poly_roots, Polynomial};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sine_root_at_pi() {
        let r = SearchRegion::rect(2.0, 4.0, -1.0, 1.0).unwrap();
        let opts = IsolateOptions { tol_residual: 1e-12, ..Default::default() };
        let out = isolate_roots(&|w: Complex64| w.sin(), &r, &opts).unwrap();
        assert_eq!(out.roots.len(), 1);
        let root = out.roots[0];
        assert!((root.value - c(PI, 0.0)).norm() < 1e-12, "{}", root.value);
        assert!(root.residual < 1e-12);
        assert_eq!(root.winding, 1);
        assert!(root.region.contains(root.value));
    }

    #[test]
    fn finds_i_only() {
        let r = SearchRegion::rect(-2.0, 2.0, 0.0, 2.0).unwrap();
        let out = isolate_roots(&|w: Complex64| w * w + 1.0, &r, &IsolateOptions::default()).unwrap();
        assert_eq!(out.roots.len(), 1);
        assert!((out.roots[0].value - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_region_gives_no_roots() {
        let r = SearchRegion::rect(10.0, 11.0, 0.0, 1.0).unwrap();
        let out = isolate_roots(&|w: Complex64| w * w + 1.0, &r, &IsolateOptions::default()).unwrap();
        assert!(out.roots.is_empty() && out.unresolved.is_empty());
    }

    #[test]
    fn too_many_roots() {
        let r = SearchRegion::rect(-20.0, 20.0, -1.0, 1.0).unwrap();
        let opts = IsolateOptions { max_roots: 3, ..Default::default() };
        let e = isolate_roots(&|w: Complex64| w.sin(), &r, &opts).unwrap_err();
        assert!(matches!(e, RootError::TooManyRoots { .. }));
    }

    #[test]
    fn boundary_root_recovered_by_growing() {
        // π sits exactly on the right edge
        let r = SearchRegion::rect(2.0, PI, -1.0, 1.0).unwrap();
        let out = isolate_roots(&|w: Complex64| w.sin(), &r, &IsolateOptions::default());
        match out {
            Ok(o) => assert!(o.roots.iter().all(|z| (z.value - c(PI, 0.0)).norm() < 1e-10)),
            Err(e) => assert!(matches!(e, RootError::BoundaryZero { .. })),
        }
    }

    #[test]
    fn double_root_reported_as_cluster() {
        let r = SearchRegion::new(0.0, 2.0, -2.0, 0.0, 12, 32).unwrap();
        let a = c(1.01, -0.97);
        let out = isolate_roots(&|w: Complex64| (w - a) * (w - a), &r, &IsolateOptions::default()).unwrap();
        let total: i64 = out.roots.iter().map(|r| r.winding).sum::<i64>()
            + out.unresolved.iter().map(|r| r.winding).sum::<i64>();
        assert_eq!(total, 2);
        for root in &out.roots {
            assert!((root.value - a).norm() < 1e-4);
        }
    }

    #[test]
    fn reflection_symmetric_polynomial_on_symmetric_region() {
        let zs = [c(0.0, -1.0), c(1.5, -0.5), c(-1.5, -0.5), c(0.0, -2.5)];
        let p = Polynomial::from_roots(&zs).unwrap();
        let r = SearchRegion::rect(-3.0, 3.0, -3.0, 0.0).unwrap();
        let out = isolate_roots(&|w: Complex64| p.eval(w), &r, &IsolateOptions::default()).unwrap();
        assert_eq!(out.roots.len(), 4);
        for z in zs {
            assert!(out.roots.iter().any(|q| (q.value - z).norm() < 1e-10));
        }
    }

    #[test]
    fn agrees_with_polynomial_solver_on_quartic() {
        let params = crate::model::MaterialParams::reference();
        let q = crate::model::s_infty_quartic(4.0, &crate::model::MaterialParams {
            theta_e_inf_sq: 400.0,
            theta_m_inf_sq: 10.0,
            ..params
        })
        .unwrap();
        let expected = poly_roots(&q).unwrap();
        let r = SearchRegion::rect(-30.0, 30.0, -6.0, 1.0).unwrap();
        let opts = IsolateOptions { tol_residual: 1e-9, ..Default::default() };
        let found = isolate_roots(&|w: Complex64| q.eval(w), &r, &opts).unwrap();
        let inside: Vec<_> = expected.iter().filter(|z| r.contains(**z)).collect();
        assert_eq!(found.roots.len(), inside.len());
        for z in inside {
            assert!(found.roots.iter().any(|q| (q.value - z).norm() < 1e-9), "missing {z}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn matches_poly_roots(roots in prop::collection::vec((-1.8f64..1.8, -1.8f64..1.8), 1..=5)) {
            let zs: Vec<Complex64> = roots.into_iter().map(|(x, y)| c(x, y)).collect();
            let separated = zs.iter().enumerate().all(|(i, a)| zs.iter().skip(i + 1).all(|b| (a - b).norm() > 0.05));
            prop_assume!(separated);
            let p = Polynomial::from_roots(&zs).unwrap();
            let r = SearchRegion::rect(-2.0, 2.0, -2.0, 2.0).unwrap();
            let opts = IsolateOptions { tol_residual: 1e-11, ..Default::default() };
            let found = isolate_roots(&|w: Complex64| p.eval(w), &r, &opts).unwrap();
            let reference = poly_roots(&p).unwrap();
            prop_assert_eq!(found.roots.len(), reference.len());
            for z in reference {
                prop_assert!(found.roots.iter().any(|q| (q.value - z).norm() < 1e-9));
            }
        }
    }
}
