use drude_core::model::reflect;
use drude_core::rootfinding::SearchRegion;
use drude_core::waveguide::{spectrum, truncation_study, LimitClass, SpectrumOptions, StudyOptions};
use drude_core::{Complex64, MaterialParams, ModeIndex, Truncation, WaveguideGeometry};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// λ1 coth λ1 + λ2 straight from the library-free formula.
fn direct_full(omega: Complex64, mode: ModeIndex, p: &MaterialParams) -> Complex64 {
    // L2 = 1, L3 = π
    let kappa_sq = (mode.n2 as f64 * std::f64::consts::PI).powi(2) + (mode.n3 as f64).powi(2);
    let f = (omega - p.alpha_e / (omega + c(0.0, p.gamma_e))) * (omega - p.alpha_m / (omega + c(0.0, p.gamma_m)));
    let l1 = (kappa_sq - f).sqrt();
    let l2 = (kappa_sq - omega * omega).sqrt();
    let l2 = if l2.re < 0.0 { -l2 } else { l2 };
    l1 * l1.cosh() / l1.sinh() + l2
}

fn region(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> SearchRegion {
    SearchRegion::rect(re_min, re_max, im_min, im_max).unwrap()
}

#[test]
fn vacuum_guide_has_no_complex_eigenvalues() {
    // with α = 0 the relation collapses to e^{λ} = 0
    let p = MaterialParams::new(4.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let o = SpectrumOptions { n_max: 2, region: region(-10.0, 10.0, -4.5, -1e-3), ..Default::default() };
    let s = spectrum(&WaveguideGeometry::reference(), &p, &o).unwrap();
    assert!(s.failures.is_empty(), "{:?}", s.failures);
    assert!(s.points.is_empty() && s.unresolved.is_empty(), "{:?}", s.points);
}

#[test]
fn fundamental_mode_roots_are_certified_and_pinned() {
    let p = MaterialParams::reference();
    let o = SpectrumOptions { n_max: 1, region: region(0.5, 25.0, -4.5, -1e-6), ..Default::default() };
    let s = spectrum(&WaveguideGeometry::reference(), &p, &o).unwrap();
    assert!(s.failures.is_empty() && s.unresolved.is_empty());
    let pinned = [
        c(0.694300548757, -2.142386302554),
        c(1.102374945207, -2.041271326239),
        c(2.111736440205, -1.558121900124),
        c(3.077231909618, -0.583627678874),
        c(20.408448798858, -1.874350512625),
        c(23.721496279951, -1.082384229381),
    ];
    assert_eq!(s.points.len(), 18);
    for z in pinned {
        assert!(s.points.iter().any(|q| (q.omega - z).norm() < 1e-9), "missing {z}");
    }
    let mode = ModeIndex::new(1, 1).unwrap();
    for q in &s.points {
        assert_eq!(q.winding, 1);
        assert!(q.residual < 1e-9);
        assert!(q.verdict.in_gamma && q.verdict.in_strip, "{}", q.omega);
        let d = direct_full(q.omega, mode, &p);
        assert!(d.norm() < 1e-8 * (1.0 + q.omega.norm()), "{} {}", q.omega, d);
    }
}

#[test]
fn truncated_roots_are_closed_under_reflection() {
    let p = MaterialParams::reference();
    let g = WaveguideGeometry::reference().with_truncation(Truncation::Finite(5.0)).unwrap();
    let o = SpectrumOptions { n_max: 2, region: region(-12.0, 12.0, -4.5, -1e-6), ..Default::default() };
    let s = spectrum(&g, &p, &o).unwrap();
    assert!(s.failures.is_empty());
    assert!(s.points.len() > 20);
    for q in &s.points {
        let r = reflect(q.omega);
        assert!(
            s.mode_points(q.mode).any(|m| (m.omega - r).norm() < 1e-8),
            "{} has no mirror image",
            q.omega
        );
    }
}

#[test]
fn study_finds_converging_and_accumulating_chains() {
    let p = MaterialParams::reference();
    let o = SpectrumOptions { n_max: 1, region: region(0.5, 25.0, -4.5, -1e-6), ..Default::default() };
    let st = StudyOptions::default();
    let study = truncation_study(&WaveguideGeometry::reference(), &p, &st, &o).unwrap();
    assert_eq!(study.spectra.len(), 3);
    let converging = study
        .trajectories
        .iter()
        .filter(|t| matches!(t.limit_class, LimitClass::ConvergesToTrueEig { .. }))
        .count();
    let accumulating =
        study.trajectories.iter().filter(|t| matches!(t.limit_class, LimitClass::AccumulatesOnWe { .. })).count();
    assert!(converging >= 5, "{converging}");
    assert!(accumulating >= 1, "{accumulating}");
    for t in &study.trajectories {
        assert!(t.links.windows(2).all(|w| w[0].x < w[1].x));
    }
}
