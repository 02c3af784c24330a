use std::f64::consts::PI;

use num_complex::Complex64;

use super::RootError;

pub const MAX_DEGREE: usize = 16;

const MAX_ITERATIONS: usize = 500;
/// Coefficients with modulus at or below this are trimmed from the top.
const TRIM: f64 = 1e-300;

/// Dense complex polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self, RootError> {
        while coeffs.last().is_some_and(|c| c.norm() <= TRIM) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(RootError::ZeroPolynomial);
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(RootError::DegreeTooLarge(coeffs.len() - 1));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(RootError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Polynomial { coeffs })
    }

    /// Monic polynomial ∏ (ω − r).
    pub fn from_roots(roots: &[Complex64]) -> Result<Self, RootError> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        Polynomial::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// p(z), p′(z) and a bound on the rounding error of the Horner value.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64, f64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let r = z.norm();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            err = err * r + c.norm();
        }
        (p, dp, err * 8.0 * f64::EPSILON * (self.degree() as f64 + 1.0))
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, RootError> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, RootError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let c = (0..n)
            .map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *other.coeffs.get(k).unwrap_or(&zero))
            .collect();
        Polynomial::new(c)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, RootError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

/// All roots of `p` with multiplicity, sorted by (Re, Im).
///
/// Aberth-Ehrlich iteration in Gauss-Seidel form from points on a circle of
/// radius |c₀/c_n|^{1/n} (rotated off the axes). A root estimate is frozen
/// once |p(z)| is below the Horner rounding bound or its correction stalls.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>, RootError> {
    let n = p.degree();
    if n == 0 {
        return Err(RootError::InvalidInput("polynomial degree must be at least 1".into()));
    }
    let lead = p.leading();
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }

    let radius = initial_radius(p);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv, bound) = p.eval_with_derivative(z[i]);
            if v.norm() <= bound {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let mut w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.is_finite() {
                // stationary point of p or coincident estimates: nudge
                w = Complex64::new(1e-3 * (1.0 + z[i].norm()), 1e-3);
            }
            z[i] -= w;
            if w.norm() <= 2.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RootError::NoConvergence(MAX_ITERATIONS));
    }

    let scale = p.norm_inf() / lead.norm();
    for &r in &z {
        let bound = 1e-10 * r.norm().max(1.0).powi(n as i32) * scale;
        if (p.eval(r) / lead).norm() > bound {
            return Err(RootError::NoConvergence(MAX_ITERATIONS));
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

fn initial_radius(p: &Polynomial) -> f64 {
    let n = p.degree();
    let lead = p.leading().norm();
    let c0 = p.coeffs[0].norm();
    if c0 > 0.0 {
        return (c0 / lead).powf(1.0 / n as f64);
    }
    // zero constant term: fall back to the largest |c_k/c_n|^{1/(n−k)}
    let r = (0..n)
        .filter(|&k| p.coeffs[k].norm() > 0.0)
        .map(|k| (p.coeffs[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max);
    if r > 0.0 {
        r
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_real_roots() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = poly_roots(&p).unwrap();
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn damped_quadratic() {
        // ω² + 4iω − 400 = 0 ⇒ ω = −2i ± √396
        let p = Polynomial::new(vec![c(-400.0, 0.0), c(0.0, 4.0), c(1.0, 0.0)]).unwrap();
        let r = poly_roots(&p).unwrap();
        let s = 396f64.sqrt();
        assert!((r[0] - c(-s, -2.0)).norm() < 1e-12);
        assert!((r[1] - c(s, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root_cluster() {
        let a = c(1.0, 1.0);
        let p = Polynomial::from_roots(&[a, a, a]).unwrap();
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z - a).norm() < 1e-4, "{z}");
        }
    }

    #[test]
    fn zero_constant_term() {
        let p = Polynomial::from_roots(&[c(0.0, 0.0), c(2.0, -1.0), c(-3.0, 0.5)]).unwrap();
        let r = poly_roots(&p).unwrap();
        assert!(r.iter().any(|z| z.norm() < 1e-12));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Polynomial::new(vec![]).unwrap_err(), RootError::ZeroPolynomial);
        assert_eq!(Polynomial::new(vec![c(0.0, 0.0); 3]).unwrap_err(), RootError::ZeroPolynomial);
        assert!(matches!(Polynomial::new(vec![c(1.0, 0.0); 18]), Err(RootError::DegreeTooLarge(17))));
        let trimmed = Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-301, 0.0)]).unwrap();
        assert_eq!(trimmed.degree(), 1);
        let constant = Polynomial::new(vec![c(3.0, 0.0)]).unwrap();
        assert!(poly_roots(&constant).is_err());
    }

    #[test]
    fn linear() {
        let p = Polynomial::new(vec![c(2.0, 2.0), c(0.0, 2.0)]).unwrap();
        let r = poly_roots(&p).unwrap();
        assert!((r[0] - c(-1.0, 1.0)).norm() < 1e-15);
    }

    fn separated_roots(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n).prop_filter("well separated", |v| {
            v.iter().enumerate().all(|(i, a)| {
                v.iter().skip(i + 1).all(|b| (a.0 - b.0).hypot(a.1 - b.1) > 0.3)
            })
        })
        .prop_map(|v| v.into_iter().map(|(x, y)| c(x, y)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reconstruction_reproduces_coefficients(roots in (2usize..=8).prop_flat_map(separated_roots)) {
            let p = Polynomial::from_roots(&roots).unwrap();
            let found = poly_roots(&p).unwrap();
            let q = Polynomial::from_roots(&found).unwrap();
            let scale = p.norm_inf();
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-8 * scale, "{} vs {}", a, b);
            }
        }

        #[test]
        fn residual_bound_holds(coeffs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..=9)) {
            let mut cs: Vec<Complex64> = coeffs.into_iter().map(|(x, y)| c(x, y)).collect();
            let n = cs.len() - 1;
            cs[n] = c(1.0, 0.0);
            let p = Polynomial::new(cs).unwrap();
            let r = poly_roots(&p).unwrap();
            prop_assert_eq!(r.len(), n);
            for z in r {
                prop_assert!(p.eval(z).norm() <= 1e-10 * z.norm().max(1.0).powi(n as i32) * p.norm_inf());
            }
        }
    }
}
