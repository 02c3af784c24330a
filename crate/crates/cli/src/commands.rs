use std::path::{Path, PathBuf};

use drude_core::fd_oracle::{compare_with_dispersion, observed_order, FdGrid, OracleRow};
use drude_core::model::{
    asymptotic_root_with, classify_sigma, enc_contains, essential_curve_s_infty, gamma_set_contains, s_infty_roots,
    sigma_e_g_curve, strip_contains, AsymptoticBranch, AsymptoticConvention,
};
use drude_core::report::{Curve, CurveSource, ReportMetadata, ReportSets, SpectrumReport};
use drude_core::waveguide::{spectrum, truncation_study, PointClass, Spectrum, TruncationStudy};
use drude_core::{Complex64, MaterialParams};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{self, bit, num, Warning};
use crate::svg::{self, Plot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Enclosure,
    Essential,
    Eigs,
    TruncateStudy,
    OracleCheck,
    Asymptotics,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Enclosure => "enclosure",
            Command::Essential => "essential",
            Command::Eigs => "eigs",
            Command::TruncateStudy => "truncate-study",
            Command::OracleCheck => "oracle-check",
            Command::Asymptotics => "asymptotics",
        }
    }
}

/// Files written and problems met by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<Warning>,
    /// Set when nothing at all could be computed.
    pub total_failure: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    command: Command,
}

impl Ctx<'_> {
    fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{stem}.{ext}"))
    }

    fn wants(&self, f: Format) -> bool {
        self.cfg.output.wants(f)
    }

    fn metadata(&self) -> ReportMetadata {
        ReportMetadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.name().into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: self.cfg.to_json(),
        }
    }

    fn sets(&self, re_min: f64, re_max: f64) -> Result<ReportSets, CliError> {
        ReportSets::new(&self.cfg.geometry(), &self.cfg.material, re_min, re_max, 601)
            .map_err(|e| CliError::Compute(e.to_string()))
    }
}

pub fn run(command: Command, cfg: &RunConfig, dir: &Path) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let ctx = Ctx { cfg, dir, command };
    let mut outcome = match command {
        Command::Enclosure => enclosure(&ctx)?,
        Command::Essential => essential(&ctx)?,
        Command::Eigs => eigs(&ctx)?,
        Command::TruncateStudy => study(&ctx)?,
        Command::OracleCheck => oracle(&ctx)?,
        Command::Asymptotics => asymptotics(&ctx)?,
    };
    outcome.files.push(output::write_json(&dir.join("warnings.json"), &outcome.warnings)?);
    Ok(outcome)
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
}

/// Γ boundary, strip and enclosure edges, poles and axes.
fn frame(ctx: &Ctx, plot: &mut Plot, sets: &ReportSets) {
    let p = &ctx.cfg.material;
    plot.axes();
    let (re_min, re_max) = (sets.gamma_boundary[0].re, sets.gamma_boundary[sets.gamma_boundary.len() - 1].re);
    let strip = [Complex64::new(re_min, -p.max_damping()), Complex64::new(re_max, -p.max_damping())];
    plot.polyline(&strip, svg::AXIS, 1.0, Some("2 4"));
    plot.polyline(&sets.gamma_boundary, svg::GAMMA, 2.0, Some("8 4"));
    plot.polyline(&sets.gamma_axis, svg::GAMMA, 2.0, Some("8 4"));
    plot.squares(&sets.poles, svg::POLE, 4.0);
}

/// W_e half-lines and σ_e(G) points.
fn essential_marks(plot: &mut Plot, sets: &ReportSets, extent: f64) {
    if let Some(c) = sets.we_threshold {
        plot.polyline(&[Complex64::new(c, 0.0), Complex64::new(extent, 0.0)], svg::ESSENTIAL, 3.0, None);
        plot.polyline(&[Complex64::new(-c, 0.0), Complex64::new(-extent, 0.0)], svg::ESSENTIAL, 3.0, None);
    }
    plot.crosses(&sets.sigma_e_g, svg::ESSENTIAL, 5.0);
}

fn enclosure(ctx: &Ctx) -> Result<Outcome, CliError> {
    let e = ctx.cfg.enclosure;
    let p = &ctx.cfg.material;
    let mut rows = Vec::with_capacity(e.nx * e.ny);
    let mut inside = Vec::new();
    for im in grid(e.im_min, e.im_max, e.ny) {
        for re in grid(e.re_min, e.re_max, e.nx) {
            let z = Complex64::new(re, im);
            let g = gamma_set_contains(z, p);
            if g {
                inside.push(z);
            }
            rows.push(vec![
                num(re),
                num(im),
                bit(strip_contains(z, p)),
                bit(enc_contains(z, p)),
                bit(g),
                classify_sigma(z, p.gamma_m).as_str().to_string(),
            ]);
        }
    }
    let mut out = Outcome::default();
    if ctx.wants(Format::Csv) {
        out.files.push(output::write_csv(&ctx.path("enclosure", "csv"), &output::ENCLOSURE_HEADER, &rows)?);
    }
    if ctx.wants(Format::Svg) {
        let sets = ctx.sets(e.re_min, e.re_max)?;
        let mut plot = Plot::new(e.re_min, e.re_max, e.im_min, e.im_max);
        plot.circles(&inside, "#cfe8d5", 1.5);
        frame(ctx, &mut plot, &sets);
        out.files.push(output::write_text(&ctx.path("enclosure", "svg"), &plot.render("spectral enclosure"))?);
    }
    Ok(out)
}

fn essential_curves(ctx: &Ctx, sets: &ReportSets) -> Result<Vec<Curve>, CliError> {
    let s = ctx.cfg.essential;
    let p = &ctx.cfg.material;
    let compute = |e: drude_core::model::ModelError| CliError::Compute(e.to_string());
    let mut curves = vec![
        Curve { source: CurveSource::SInfty, points: essential_curve_s_infty(p, s.t_min, s.t_max, s.samples).map_err(compute)? },
        Curve { source: CurveSource::GPoints, points: sets.sigma_e_g.clone() },
        Curve {
            source: CurveSource::GCurve,
            points: sigma_e_g_curve((0.0, p.alpha_e), p.gamma_e, s.g_curve_samples).map_err(compute)?,
        },
    ];
    if let Some(c) = sets.we_threshold {
        for sign in [1.0, -1.0] {
            curves.push(Curve {
                source: CurveSource::WeHalfline,
                points: vec![Complex64::new(sign * c, 0.0), Complex64::new(sign * s.re_extent, 0.0)],
            });
        }
    }
    Ok(curves)
}

fn essential(ctx: &Ctx) -> Result<Outcome, CliError> {
    let ext = ctx.cfg.essential.re_extent;
    let sets = ctx.sets(-ext, ext)?;
    let curves = essential_curves(ctx, &sets)?;
    let mut out = Outcome::default();
    if sets.we_threshold.is_none() {
        out.warnings.push(Warning::new("we_halfline", "non-vacuum exterior: W_e half-lines not drawn"));
    }
    if ctx.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = curves
            .iter()
            .flat_map(|c| c.points.iter().map(move |z| vec![num(z.re), num(z.im), c.source.as_str().to_string()]))
            .collect();
        out.files.push(output::write_csv(&ctx.path("essential", "csv"), &output::ESSENTIAL_HEADER, &rows)?);
    }
    if ctx.wants(Format::Json) {
        let report = SpectrumReport { metadata: ctx.metadata(), points: vec![], curves: curves.clone(), sets: sets.clone(), trajectories: vec![] };
        out.files.push(output::write_json(&ctx.path("essential", "json"), &report)?);
    }
    if ctx.wants(Format::Svg) {
        let depth = ctx.cfg.material.gamma_e.max(ctx.cfg.material.gamma_m);
        let mut plot = Plot::new(-ext, ext, -depth - 0.5, 0.5);
        frame(ctx, &mut plot, &sets);
        for c in &curves {
            match c.source {
                CurveSource::SInfty | CurveSource::GCurve => plot.circles(&c.points, svg::ESSENTIAL, 1.5),
                _ => {}
            }
        }
        essential_marks(&mut plot, &sets, ext);
        out.files.push(output::write_text(&ctx.path("essential", "svg"), &plot.render("essential spectrum"))?);
    }
    Ok(out)
}

fn spectrum_warnings(s: &Spectrum, out: &mut Vec<Warning>) {
    for f in &s.failures {
        out.push(Warning { region: Some(f.region), ..Warning::for_mode("mode_failure", f.mode, &f.message) });
    }
    for u in &s.unresolved {
        out.push(Warning::for_mode(
            "unresolved",
            u.mode,
            format!("zero near {} not certified (residual {:e}, winding {})", u.estimate, u.residual, u.winding),
        ));
    }
    if s.rejected_spurious > 0 {
        out.push(Warning::new("spurious", format!("{} counted zeros rejected by the raw residual", s.rejected_spurious)));
    }
}

fn eig_rows(s: &Spectrum) -> Vec<Vec<String>> {
    s.points
        .iter()
        .map(|p| {
            vec![
                p.mode.n2.to_string(),
                p.mode.n3.to_string(),
                num(p.omega.re),
                num(p.omega.im),
                num(p.residual),
                p.winding.to_string(),
                bit(p.verdict.in_gamma),
                p.verdict.sigma_tag.as_str().to_string(),
            ]
        })
        .collect()
}

fn search_view(ctx: &Ctx) -> (f64, f64, f64, f64) {
    let r = ctx.cfg.search.region;
    (r.re_min, r.re_max, r.im_min - 0.5, r.im_max.max(0.0) + 0.5)
}

fn eigs(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = spectrum(&ctx.cfg.geometry(), &ctx.cfg.material, &ctx.cfg.search).map_err(|e| CliError::Compute(e.to_string()))?;
    let mut out = Outcome::default();
    spectrum_warnings(&s, &mut out.warnings);
    if s.points.is_empty() && !s.failures.is_empty() {
        out.total_failure = Some(format!("every search task failed ({} failures)", s.failures.len()));
    }
    if ctx.wants(Format::Csv) {
        out.files.push(output::write_csv(&ctx.path("eigs", "csv"), &output::EIGS_HEADER, &eig_rows(&s))?);
    }
    let (re_min, re_max, im_min, im_max) = search_view(ctx);
    let sets = ctx.sets(re_min, re_max)?;
    if ctx.wants(Format::Json) {
        let curves = essential_curves(ctx, &sets)?;
        let report = SpectrumReport { metadata: ctx.metadata(), points: s.points.clone(), curves, sets: sets.clone(), trajectories: vec![] };
        out.files.push(output::write_json(&ctx.path("eigs", "json"), &report)?);
    }
    if ctx.wants(Format::Svg) {
        let mut plot = Plot::new(re_min, re_max, im_min, im_max);
        frame(ctx, &mut plot, &sets);
        essential_marks(&mut plot, &sets, re_max.abs().max(re_min.abs()));
        plot.circles(&s.omegas(), svg::EIGEN, 2.5);
        let title = format!("eigenvalues, X = {}", ctx.cfg.geometry().truncation);
        out.files.push(output::write_text(&ctx.path("eigs", "svg"), &plot.render(&title))?);
    }
    Ok(out)
}

fn study_rows(st: &TruncationStudy) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for t in &st.trajectories {
        for l in &t.links {
            rows.push(vec![
                num(l.x),
                t.mode.n2.to_string(),
                t.mode.n3.to_string(),
                num(l.omega.re),
                num(l.omega.im),
                t.chain_id.to_string(),
                t.limit_class.as_str().to_string(),
                num(l.dist_to_we),
                num(l.dist_to_true),
            ]);
        }
    }
    rows
}

fn study(ctx: &Ctx) -> Result<Outcome, CliError> {
    let st = truncation_study(&ctx.cfg.geometry(), &ctx.cfg.material, &ctx.cfg.study, &ctx.cfg.search)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let mut out = Outcome::default();
    spectrum_warnings(&st.full, &mut out.warnings);
    for s in &st.spectra {
        spectrum_warnings(s, &mut out.warnings);
    }
    let broken = st.trajectories.iter().filter(|t| t.broken).count();
    if broken > 0 {
        out.warnings.push(Warning::new("chain_broken", format!("{broken} chains do not span every X")));
    }
    if st.spectra.iter().all(|s| s.points.is_empty() && !s.failures.is_empty()) {
        out.total_failure = Some("every truncated sweep failed".into());
    }
    if ctx.wants(Format::Csv) {
        out.files.push(output::write_csv(&ctx.path("study", "csv"), &output::STUDY_HEADER, &study_rows(&st))?);
    }
    let (re_min, re_max, im_min, im_max) = search_view(ctx);
    let sets = ctx.sets(re_min, re_max)?;
    let last = st.spectra.last().expect("at least three X values");
    if ctx.wants(Format::Json) {
        let curves = essential_curves(ctx, &sets)?;
        let report = SpectrumReport {
            metadata: ctx.metadata(),
            points: last.points.clone(),
            curves,
            sets: sets.clone(),
            trajectories: st.trajectories.clone(),
        };
        out.files.push(output::write_json(&ctx.path("study", "json"), &report)?);
    }
    if ctx.wants(Format::Svg) {
        let mut plot = Plot::new(re_min, re_max, im_min, im_max);
        frame(ctx, &mut plot, &sets);
        essential_marks(&mut plot, &sets, re_max.abs().max(re_min.abs()));
        for t in &st.trajectories {
            let pts: Vec<Complex64> = t.links.iter().map(|l| l.omega).collect();
            plot.polyline(&pts, svg::AXIS, 1.0, None);
        }
        let (polluting, other): (Vec<&drude_core::waveguide::SpectrumPoint>, Vec<_>) =
            last.points.iter().partition(|p| p.class == PointClass::PollutionCandidate);
        plot.circles(&other.iter().map(|p| p.omega).collect::<Vec<_>>(), svg::EIGEN, 2.5);
        plot.circles(&polluting.iter().map(|p| p.omega).collect::<Vec<_>>(), "#e08a00", 2.5);
        let x = st.x_list.last().copied().unwrap_or(f64::NAN);
        out.files.push(output::write_text(&ctx.path("study", "svg"), &plot.render(&format!("truncation study, X = {x}")))?);
    }
    Ok(out)
}

fn oracle(ctx: &Ctx) -> Result<Outcome, CliError> {
    let o = &ctx.cfg.oracle;
    let mut out = Outcome::default();
    if !o.enabled {
        out.warnings.push(Warning::new("disabled", "oracle.enabled is false; nothing computed"));
        return Ok(out);
    }
    let geometry = ctx.cfg.geometry();
    let mut rows = Vec::new();
    let mut ok_modes = 0;
    for &mode in &o.modes {
        let mut per_h: Vec<Vec<OracleRow>> = Vec::new();
        let mut failed = None;
        for &h in &o.h_list {
            let res = FdGrid::with_step(o.x, geometry.slab_end, h)
                .and_then(|g| compare_with_dispersion(mode, &geometry, &ctx.cfg.material, &g, &o.region, &o.tolerances));
            match res {
                Ok(r) => per_h.push(r),
                Err(e) => {
                    failed = Some(format!("h = {h}: {e}"));
                    break;
                }
            }
        }
        if let Some(msg) = failed {
            out.warnings.push(Warning::for_mode("oracle_failure", mode, msg));
            continue;
        }
        ok_modes += 1;
        let order = mode_order(&o.h_list, &per_h);
        if order.is_none() {
            out.warnings.push(Warning::for_mode("observed_order", mode, "no root tracked over every step"));
        }
        for r in per_h.iter().flatten() {
            rows.push(vec![
                mode.n2.to_string(),
                mode.n3.to_string(),
                num(r.h),
                num(r.fd.re),
                num(r.fd.im),
                num(r.gap),
                order.map_or("NaN".into(), num),
            ]);
        }
    }
    if ok_modes == 0 {
        out.total_failure = Some("the oracle failed for every mode".into());
    }
    if ctx.wants(Format::Csv) {
        out.files.push(output::write_csv(&ctx.path("oracle", "csv"), &output::ORACLE_HEADER, &rows)?);
    }
    Ok(out)
}

/// Observed order of the lowest-frequency dispersion root that has an FD
/// partner at every step.
fn mode_order(h: &[f64], per_h: &[Vec<OracleRow>]) -> Option<f64> {
    if h.len() < 2 {
        return None;
    }
    let gap_at = |rows: &[OracleRow], target: Complex64| rows.iter().filter(|r| r.nearest == target).map(|r| r.gap).reduce(f64::min);
    let mut candidates: Vec<Complex64> = per_h.last()?.iter().map(|r| r.nearest).collect();
    candidates.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()).then(b.im.total_cmp(&a.im)));
    candidates.into_iter().find_map(|target| {
        let errors: Option<Vec<f64>> = per_h.iter().map(|rows| gap_at(rows, target)).collect();
        errors.map(|e| observed_order(h, &e))
    })
}

fn asymptotics(ctx: &Ctx) -> Result<Outcome, CliError> {
    let a = &ctx.cfg.asymptotics;
    let params = MaterialParams { theta_e_inf_sq: a.theta_e_inf_sq, theta_m_inf_sq: a.theta_m_inf_sq, ..ctx.cfg.material };
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for &t in &a.t_list {
        let roots = match s_infty_roots(t, &params) {
            Ok(r) => r,
            Err(e) => {
                out.warnings.push(Warning::new("quartic", format!("t = {t}: {e}")));
                continue;
            }
        };
        for branch in AsymptoticBranch::ALL {
            for (convention, suffix) in [(AsymptoticConvention::Rederived, ""), (AsymptoticConvention::AsStated, "_as_stated")] {
                let w = match asymptotic_root_with(t, branch, &params, convention) {
                    Ok(w) => w,
                    Err(e) => {
                        out.warnings.push(Warning::new("asymptotics", format!("t = {t}, {}: {e}", branch.as_str())));
                        continue;
                    }
                };
                let Some(q) = roots.iter().copied().min_by(|x, y| (x - w).norm().total_cmp(&(y - w).norm())) else {
                    continue;
                };
                rows.push(vec![
                    num(t),
                    format!("{}{suffix}", branch.as_str()),
                    num(w.re),
                    num(w.im),
                    num(q.re),
                    num(q.im),
                    num((q - w).norm()),
                ]);
            }
        }
    }
    if rows.is_empty() {
        out.total_failure = Some("no asymptotic branch could be evaluated".into());
    }
    if ctx.wants(Format::Csv) {
        out.files.push(output::write_csv(&ctx.path("asymptotics", "csv"), &output::ASYMPTOTICS_HEADER, &rows)?);
    }
    Ok(out)
}
