use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{RootError, SearchRegion};

/// Total boundary evaluations allowed for one count.
const MAX_EVALUATIONS: usize = 1 << 16;
/// |F| below this fraction of the boundary maximum counts as a zero.
const ZERO_RATIO: f64 = 1e-13;
const MAX_JUMP: f64 = FRAC_PI_2;
/// Slack on the consistency check jump(a, b) = jump(a, m) + jump(m, b).
const SPLIT_SLACK: f64 = 1e-6;
const DEFECT_LIMIT: f64 = 0.25;
/// A piece of length ℓ is accepted only if ℓ·|F′/F| ≤ RATE_LIMIT at its ends
/// and midpoint; the argument change is bounded by ∫|F′/F|.
const RATE_LIMIT: f64 = 1.0;
const MAX_PRESPLIT: usize = 4096;
/// Probe step for the |F′/F| estimate, relative to the local segment length.
const PROBE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingInfo {
    pub winding: i64,
    /// Accumulated change of arg F along the boundary.
    pub total_phase: f64,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub evaluations: usize,
}

/// Number of zeros of `f` inside `region` (counted with multiplicity).
pub fn winding_count<F>(f: &F, region: &SearchRegion) -> Result<i64, RootError>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    winding_info(f, region).map(|w| w.winding)
}

#[derive(Clone, Copy)]
struct Node {
    z: Complex64,
    v: Complex64,
    rate: f64,
}

struct Tracker<'a, F: ?Sized> {
    f: &'a F,
    evaluations: usize,
    min: f64,
    max: f64,
}

impl<F> Tracker<'_, F>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    fn eval(&mut self, z: Complex64) -> Result<Complex64, RootError> {
        self.evaluations += 1;
        if self.evaluations > MAX_EVALUATIONS {
            return Err(RootError::PhaseUnresolved(format!(
                "more than {MAX_EVALUATIONS} boundary samples needed"
            )));
        }
        let v = (self.f)(z);
        if !v.is_finite() {
            return Err(RootError::NonFinite { re: z.re, im: z.im });
        }
        let m = v.norm();
        self.min = self.min.min(m);
        self.max = self.max.max(m);
        if m <= ZERO_RATIO * self.max {
            return Err(RootError::BoundaryZero { re: z.re, im: z.im });
        }
        Ok(v)
    }

    /// F(z) and a local rate max(|(log F)′|, |(log F)″|^½) at z from central
    /// probes at distance `PROBE`·`scale` along `dir`. The second derivative
    /// catches rows of zeros whose first-derivative contributions cancel, and
    /// a zero closer than the probe inflates both.
    fn node(&mut self, z: Complex64, dir: Complex64, scale: f64) -> Result<Node, RootError> {
        let v = self.eval(z)?;
        let h = (PROBE * scale).max(1e-14 * (1.0 + z.norm()));
        let up = log_ratio(self.eval(z + h * dir)?, v);
        let down = log_ratio(self.eval(z - h * dir)?, v);
        let first = ((up - down) / (2.0 * h)).norm();
        let second = ((up + down) / (h * h)).norm().sqrt();
        Ok(Node { z, v, rate: first.max(second) })
    }

    /// Phase change along the straight segment a → b, refined until every
    /// piece is short compared with 1/|F′/F|, turns by at most π/2 and agrees
    /// with its two halves.
    fn segment(&mut self, a: Node, b: Node) -> Result<f64, RootError> {
        let dir = (b.z - a.z) / (b.z - a.z).norm();
        let mut total = 0.0;
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let len = (b.z - a.z).norm();
            let mz = 0.5 * (a.z + b.z);
            if len <= 1e-13 * (1.0 + a.z.norm()) {
                return Err(RootError::BoundaryZero { re: mz.re, im: mz.im });
            }
            let m = self.node(mz, dir, len)?;
            let whole = jump(a.v, b.v);
            let left = jump(a.v, m.v);
            let right = jump(m.v, b.v);
            let resolved = len * a.rate.max(b.rate).max(m.rate) <= RATE_LIMIT
                && whole.abs() <= MAX_JUMP
                && left.abs() <= MAX_JUMP
                && right.abs() <= MAX_JUMP
                && (left + right - whole).abs() <= SPLIT_SLACK;
            if resolved {
                total += left + right;
            } else {
                stack.push((m, b));
                stack.push((a, m));
            }
        }
        Ok(total)
    }
}

/// Principal log(b / a).
fn log_ratio(b: Complex64, a: Complex64) -> Complex64 {
    let r = b / a;
    Complex64::new(r.norm().ln(), r.arg())
}

/// arg(b / a) in (−π, π].
fn jump(a: Complex64, b: Complex64) -> f64 {
    let ua = a / a.norm();
    let ub = b / b.norm();
    (ub * ua.conj()).arg()
}

/// Winding number with diagnostics.
///
/// The boundary is traversed counter-clockwise. Initial samples are spread
/// over the edges in proportion to their length (at least four per edge,
/// `boundary_samples` in total). Every sample carries an estimate of
/// local rate from two short probe steps; segments are cut until their length times
/// that rate is at most 1 at both ends and the midpoint and the argument
/// change over each half is below π/2 and consistent with the whole.
pub fn winding_info<F>(f: &F, region: &SearchRegion) -> Result<WindingInfo, RootError>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    region.validate()?;
    let corners = region.corners();
    let lengths = [region.width(), region.height(), region.width(), region.height()];
    let perimeter: f64 = lengths.iter().sum();
    let budget = f64::from(region.boundary_samples);

    let mut nodes = Vec::with_capacity(region.boundary_samples as usize + 16);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = ((budget * lengths[e] / perimeter).ceil() as usize).max(4);
        for k in 0..n {
            nodes.push(a + (b - a) * (k as f64 / n as f64));
        }
    }

    let mut tracker = Tracker { f, evaluations: 0, min: f64::INFINITY, max: 0.0 };
    let mut initial = Vec::with_capacity(nodes.len());
    for (i, &z) in nodes.iter().enumerate() {
        let next = nodes[(i + 1) % nodes.len()];
        let step = (next - z).norm();
        initial.push(tracker.node(z, (next - z) / step, step)?);
    }
    // recheck the early samples against the final scale of the initial pass
    for n in &initial {
        if n.v.norm() <= ZERO_RATIO * tracker.max {
            return Err(RootError::BoundaryZero { re: n.z.re, im: n.z.im });
        }
    }

    let mut total = 0.0;
    for i in 0..initial.len() {
        let (a, b) = (initial[i], initial[(i + 1) % initial.len()]);
        // cut into equal pieces first so the bisection stack stays shallow
        let dir = (b.z - a.z) / (b.z - a.z).norm();
        let len = (b.z - a.z).norm();
        let pieces = ((len * a.rate.max(b.rate) / RATE_LIMIT).ceil() as usize).clamp(1, MAX_PRESPLIT);
        let mut prev = a;
        for k in 1..=pieces {
            let next = if k == pieces { b } else { tracker.node(a.z + (b.z - a.z) * (k as f64 / pieces as f64), dir, len / pieces as f64)? };
            total += tracker.segment(prev, next)?;
            prev = next;
        }
    }

    let turns = total / (2.0 * PI);
    let winding = turns.round();
    if (turns - winding).abs() >= DEFECT_LIMIT {
        return Err(RootError::PhaseUnresolved(format!("winding {turns:.3} is not close to an integer")));
    }
    Ok(WindingInfo {
        winding: winding as i64,
        total_phase: total,
        min_modulus: tracker.min,
        max_modulus: tracker.max,
        evaluations: tracker.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfinding::Polynomial;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> SearchRegion {
        SearchRegion::rect(0.0, 2.0, -2.0, 0.0).unwrap()
    }

    #[test]
    fn simple_counts() {
        let r = square();
        assert_eq!(winding_count(&|w: Complex64| w - c(1.0, -1.0), &r).unwrap(), 1);
        assert_eq!(winding_count(&|w: Complex64| (w - c(1.0, -1.0)).powi(2), &r).unwrap(), 2);
        assert_eq!(winding_count(&|w: Complex64| w - c(5.0, -1.0), &r).unwrap(), 0);
    }

    #[test]
    fn pole_gives_negative_count() {
        let r = square();
        assert_eq!(winding_count(&|w: Complex64| (w - c(1.0, -1.0)).inv(), &r).unwrap(), -1);
    }

    #[test]
    fn zero_on_boundary_is_reported() {
        let r = square();
        let e = winding_count(&|w: Complex64| w - c(1.0, 0.0), &r).unwrap_err();
        assert!(matches!(e, RootError::BoundaryZero { .. }), "{e:?}");
    }

    #[test]
    fn non_finite_is_reported() {
        let r = square();
        let e = winding_count(&|_w: Complex64| c(f64::NAN, 0.0), &r).unwrap_err();
        assert!(matches!(e, RootError::NonFinite { .. }));
    }

    #[test]
    fn rapidly_rotating_function() {
        // exp(i·60ω) has no zeros but turns by hundreds of radians per edge
        let r = SearchRegion::rect(-3.0, 3.0, -0.2, 0.2).unwrap();
        let f = |w: Complex64| (Complex64::i() * 60.0 * w).exp() * (w - c(0.3, 0.05));
        assert_eq!(winding_count(&f, &r).unwrap(), 1);
    }

    #[test]
    fn positive_rescaling_does_not_change_the_count() {
        let r = square();
        let f = |w: Complex64| {
            let v = (w - c(0.5, -0.5)) * (w - c(1.5, -1.2));
            v * (1.0 + 1e3 * w.norm_sqr())
        };
        assert_eq!(winding_count(&f, &r).unwrap(), 2);
    }

    fn roots_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.9f64..1.9, -1.9f64..1.9), 1..=6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn additive_under_splitting(roots in roots_strategy(), fx in 0.2f64..0.8, fy in 0.2f64..0.8) {
            let zs: Vec<Complex64> = roots.into_iter().map(|(x, y)| c(x, y)).collect();
            let p = Polynomial::from_roots(&zs).unwrap();
            let f = |w: Complex64| p.eval(w);
            let parent = SearchRegion::rect(-2.0, 2.0, -2.0, 2.0).unwrap();
            let whole = winding_count(&f, &parent).unwrap();
            prop_assert_eq!(whole, zs.len() as i64);
            let kids = parent.quadrisect(fx, fy);
            let counts: Result<Vec<i64>, _> = kids.iter().map(|k| winding_count(&f, k)).collect();
            // a root on a cut line legitimately fails the child count
            if let Ok(counts) = counts {
                prop_assert_eq!(counts.iter().sum::<i64>(), whole);
                for (k, n) in kids.iter().zip(&counts) {
                    let inside = zs.iter().filter(|z| k.contains(**z)).count() as i64;
                    prop_assert_eq!(*n, inside);
                }
            }
        }
    }
}
