use std::fs;
use std::path::Path;

use exq_core::analytic::MobiusMap;
use exq_core::appendix::{
    circularity, concentric_report, curvature_pair_checks, mobius_pair_identities, IdentityCheck,
    VerificationReport,
};
use exq_core::extremal::{extremality_report, monodromy_sum, BasisConfig, Verdict, EXTREMAL_THRESHOLD};
use exq_core::geometry::{geometric_summary, isoperimetric_slack, turning, Contour};
use exq_core::io::{self, AnalyzeReport, CheckEntry, FitReport, SummaryReport};
use exq_core::odewkb::{turning_points_near, wkb_error_scaling};
use exq_core::quaddiff::{boundary_metric_check, classify, find_zeros_in, seed_points, stokes_graph, TraceOptions};
use exq_core::{Complex64, Domain64, Error, ExtremalityReport64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

/// Runs the configured command; `Ok(false)` means a verification failed.
pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let domain = load_domain(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Write {
        path: cfg.out.clone(),
        source,
    })?;
    match cfg.command {
        Command::Analyze => analyze(cfg, &domain),
        Command::Fit => fit(cfg, &domain),
        Command::Stokes => stokes(cfg, &domain),
        Command::Wkb => wkb(cfg, &domain),
        Command::Appendix => appendix(cfg, &domain),
    }
}

fn load_domain(cfg: &RunConfig) -> Result<Domain64, CliError> {
    let text = fs::read_to_string(&cfg.domain).map_err(|source| CliError::Read {
        path: cfg.domain.clone(),
        source,
    })?;
    Ok(io::parse_domain(&text, Some(cfg.samples))?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
}

fn analyze(cfg: &RunConfig, domain: &Domain64) -> Result<bool, CliError> {
    let summary = geometric_summary(domain)?;
    let slack = isoperimetric_slack(domain)?;
    let monodromy = monodromy_sum(domain, summary.lambda_min)?;
    let slack_floor = -1e-9 * summary.perimeter;
    let mut checks = vec![CheckEntry::new("isoperimetric-slack", slack, slack_floor, slack >= slack_floor)];
    for (k, c) in domain.components().enumerate() {
        let defect = (turning(c) - std::f64::consts::TAU).abs();
        checks.push(CheckEntry::new(format!("total-turning-{k}"), defect, cfg.tol, defect <= cfg.tol));
    }
    let report = AnalyzeReport::new(&summary, slack, monodromy, checks);
    let passed = report.checks.iter().all(|c| c.passed);
    write(&cfg.out, "report.json", &io::to_json(&report))?;
    Ok(passed)
}

fn basis(cfg: &RunConfig) -> BasisConfig {
    BasisConfig {
        poly_degree: cfg.basis.poly,
        pole_order: cfg.basis.pole,
        samples: cfg.samples,
    }
}

fn fit_checks(r: &ExtremalityReport64) -> Vec<CheckEntry> {
    let floor = r.lambda_min - 1e-6;
    vec![
        CheckEntry::new("lower-bound", r.achieved_norm, floor, r.respects_lower_bound(1e-6)),
        CheckEntry::new(
            "extremality-residual",
            r.max_residual,
            EXTREMAL_THRESHOLD * r.diameter,
            r.verdict == Verdict::Extremal,
        ),
    ]
}

fn fit(cfg: &RunConfig, domain: &Domain64) -> Result<bool, CliError> {
    let r = extremality_report(domain, &basis(cfg))?;
    let report = FitReport::new(&r, fit_checks(&r));
    write(&cfg.out, "fit.json", &io::to_json(&report))?;
    write(&cfg.out, "residuals.csv", &io::residual_csv(&r))?;
    Ok(report.checks.iter().all(|c| c.passed))
}

fn stokes(cfg: &RunConfig, domain: &Domain64) -> Result<bool, CliError> {
    let r = extremality_report(domain, &basis(cfg))?;
    let dphi = r.fitted_phi.derivative();
    let opts = TraceOptions::default();
    let graph = stokes_graph(&dphi, domain, &opts)?;
    let seeds = seed_points(domain, &graph.zeros, 6);
    let (class, _) = classify(&graph, &dphi, domain, &seeds, &opts)?;

    let mut report = SummaryReport::new("stokes");
    report
        .value("zeros", graph.zeros.len() as f64)
        .value("arcs", graph.arcs.len() as f64)
        .value("closed_trajectories", class.closed_count as f64)
        .value("boundary_ending_trajectories", class.boundary_ending_count as f64)
        .value("indeterminate_trajectories", class.indeterminate as f64)
        .value("maximal", if class.maximal { 1.0 } else { 0.0 });
    let invariants = graph.check_invariants();
    report.checks.push(CheckEntry::new(
        "stokes-arc-structure",
        graph.max_relative_drift(),
        1e-8,
        invariants.is_ok(),
    ));
    if r.verdict == Verdict::Extremal {
        let metric = boundary_metric_check(domain, &r.fitted_phi, r.lambda_min)?
            .into_iter()
            .fold(0.0, f64::max);
        report
            .checks
            .push(CheckEntry::new("boundary-metric", metric, 1e-6, metric <= 1e-6));
    }
    write(&cfg.out, "stokes.json", &io::to_json(&report))?;
    write(&cfg.out, "stokes.csv", &io::stokes_csv(&graph))?;
    write(&cfg.out, "zeros.csv", &io::zeros_csv(&graph))?;
    write(&cfg.out, "stokes.svg", &io::stokes_svg(domain, &graph))?;
    Ok(report.all_passed())
}

/// Straight path through the middle of the first stretch of the ray
/// `center + s` (s > 0) that lies inside the domain.
fn ray_path(domain: &Domain64) -> Result<Vec<Complex64>, CliError> {
    let center = domain
        .hole_centers()
        .first()
        .copied()
        .unwrap_or_else(|| domain.outer().modes().iter().find(|m| m.0 == 0).map_or(Complex64::new(0.0, 0.0), |m| m.1));
    let steps = 2000;
    let ds = domain.diameter() / steps as f64;
    let mut inside = None;
    for i in 0..=steps {
        let s = ds * i as f64;
        let z = center + Complex64::new(s, 0.0);
        match (domain.contains(z).unwrap_or(false), inside) {
            (true, None) => inside = Some((s, s)),
            (true, Some((a, _))) => inside = Some((a, s)),
            (false, Some(_)) => break,
            (false, None) => {}
        }
    }
    let (a, b) = inside.ok_or_else(|| Error::InvalidDomain("no interior point on the sampling ray".into()))?;
    let (lo, hi) = (a + 0.2 * (b - a), b - 0.2 * (b - a));
    Ok((0..=8)
        .map(|k| center + Complex64::new(lo + (hi - lo) * k as f64 / 8.0, 0.0))
        .collect())
}

fn wkb(cfg: &RunConfig, domain: &Domain64) -> Result<bool, CliError> {
    let r = extremality_report(domain, &basis(cfg))?;
    let dphi = r.fitted_phi.derivative();
    let zeros = find_zeros_in(&dphi, domain)?;
    let path = ray_path(domain)?;
    if let Some(&k) = turning_points_near(&zeros, &path, 0.05 * domain.diameter()).first() {
        let z = zeros[k].location;
        return Err(Error::TurningPoint { re: z.re, im: z.im }.into());
    }
    let eps = [0.1, 0.05, 0.025];
    let one = Complex64::new(1.0, 0.0);
    let table = wkb_error_scaling(&dphi, r.lambda_min, &path, &eps, one, Complex64::new(0.0, 0.0))?;
    let max_ratio = table.rows.iter().filter_map(|row| row.ratio).fold(0.0, f64::max);
    let mut report = SummaryReport::new("wkb");
    report
        .value("lambda", r.lambda_min)
        .value("path_start_re", path[0].re)
        .value("path_end_re", path[path.len() - 1].re)
        .value("first_order", if table.first_order { 1.0 } else { 0.0 });
    report
        .checks
        .push(CheckEntry::new("lg-error-ratio", max_ratio, 0.9, table.asymptotic));
    write(&cfg.out, "wkb.csv", &io::wkb_csv(&table))?;
    write(&cfg.out, "wkb.json", &io::to_json(&report))?;
    Ok(report.all_passed())
}

fn mean_radius(contour: &Contour<f64>, center: Complex64) -> f64 {
    let pts = contour.grid_points();
    pts.iter().map(|z| (z - center).norm()).sum::<f64>() / pts.len() as f64
}

/// Random non-affine Möbius map and analytic source curve kept away from
/// the pole.
fn random_mobius_pair(rng: &mut ChaCha8Rng, samples: usize) -> Result<(MobiusMap<f64>, Contour<f64>), CliError> {
    loop {
        let center = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r: f64 = rng.gen_range(0.5..2.0);
        let mut modes = vec![(0, center), (1, Complex64::new(r, 0.0))];
        for j in [-1, 2, -2] {
            modes.push((j, Complex64::new(rng.gen_range(-0.05..0.05) * r, rng.gen_range(-0.05..0.05) * r)));
        }
        let Ok(curve) = Contour::with_samples(modes, samples) else {
            continue;
        };
        let offset = if rng.gen_bool(0.5) {
            rng.gen_range(0.0..0.2)
        } else {
            rng.gen_range(1.6..2.5)
        };
        let c = center + Complex64::from_polar(offset * r, rng.gen_range(0.0..std::f64::consts::TAU));
        if curve.distance(c).0 <= 0.1 * curve.diameter() {
            continue;
        }
        let a = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = Complex64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
        return Ok((MobiusMap::general(a, b, c)?, curve));
    }
}

/// Worst residual of each Möbius-pair identity over `count` random pairs.
fn mobius_pair_checks(seed: u64, count: usize, samples: usize) -> Result<Vec<IdentityCheck<f64>>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Vec<IdentityCheck<f64>> = Vec::new();
    let mut polar = 0.0f64;
    for _ in 0..count {
        let (mu, curve) = random_mobius_pair(&mut rng, samples)?;
        let res = mobius_pair_identities(&mu, &curve)?;
        polar = polar.max(res.polar_cartesian);
        let checks = res.checks(1e-6);
        if worst.is_empty() {
            worst = checks;
        } else {
            for (w, c) in worst.iter_mut().zip(checks) {
                w.residual = w.residual.max(c.residual);
            }
        }
    }
    worst.push(IdentityCheck::new("polar-cartesian-curvature", polar, 1e-8));
    Ok(worst)
}

fn appendix(cfg: &RunConfig, domain: &Domain64) -> Result<bool, CliError> {
    if domain.n_components() != 2 {
        return Err(Error::InvalidDomain(format!(
            "the identity chain needs a doubly-connected domain, got {} components",
            domain.n_components()
        ))
        .into());
    }
    let round = circularity(domain)?;
    let center = round.centers[0];
    let r1 = mean_radius(domain.component(0), center);
    let r2 = mean_radius(domain.component(1), center);
    let lambda = geometric_summary(domain)?.lambda_min;
    let ratio = r1 / r2;
    let mu = MobiusMap::affine(Complex64::new(ratio, 0.0), center * (1.0 - ratio))?;

    let mut report = if round.is_concentric_annulus(1e-4, 1e-6) {
        concentric_report(r1, r2, cfg.samples, cfg.tol)?
    } else {
        let variation = round.curvature_variation.iter().copied().fold(0.0, f64::max);
        let mut r = VerificationReport::default();
        r.extend([
            IdentityCheck::new("boundary-roundness", variation, 1e-4),
            IdentityCheck::new("boundary-concentricity", round.center_offset, 1e-6),
        ]);
        r
    };
    let on_domain = curvature_pair_checks(domain, &mu, lambda)?;
    report.extend(on_domain.checks(cfg.tol).into_iter().map(|mut c| {
        c.name = format!("domain-{}", c.name);
        c
    }));
    report.extend(mobius_pair_checks(cfg.seed, 10, cfg.samples)?);

    let mut summary = SummaryReport::new("appendix");
    summary
        .value("outer_radius", r1)
        .value("inner_radius", r2)
        .value("lambda", lambda)
        .value("ratio_constant", on_domain.ratio_constant);
    summary.checks = io::verification_checks(&report);
    write(&cfg.out, "appendix.txt", &report.to_string())?;
    write(&cfg.out, "appendix.json", &io::to_json(&summary))?;
    Ok(report.all_passed())
}
