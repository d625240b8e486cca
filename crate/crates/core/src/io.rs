//! File formats: domain and rational-function JSON, report JSON, CSV tables
//! and SVG plots of Stokes graphs. Everything here is `f64`.
//!
//! A domain file lists contours as Fourier modes `[j, re, im]`, outer contour
//! first:
//!
//! ```json
//! {"contours": [{"coeffs": [[1, 2.0, 0.0]]}, {"coeffs": [[1, 1.0, 0.0]]}],
//!  "hole_centers": [[0.0, 0.0]]}
//! ```

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analytic::{PolePart, RationalFunction};
use crate::appendix::VerificationReport;
use crate::error::{Error, Result};
use crate::extremal::{ExtremalityReport, Verdict};
use crate::geometry::{Contour, Domain, GeometricSummary};
use crate::odewkb::WkbErrorTable;
use crate::quaddiff::StokesGraph;
use crate::scalar::periodic_grid;

type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourFile {
    pub coeffs: Vec<(i32, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub contours: Vec<ContourFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_centers: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn invalid(e: Error) -> Error {
    match e {
        Error::InvalidDomain(_) => e,
        other => Error::InvalidDomain(other.to_string()),
    }
}

impl DomainFile {
    /// Builds the domain, sampling every contour at `samples` points (the
    /// file's own `samples` entry, then the library default, otherwise).
    pub fn to_domain(&self, samples: Option<usize>) -> Result<Domain<f64>> {
        let samples = samples.or(self.samples);
        let contours = self
            .contours
            .iter()
            .map(|c| {
                let modes = c.coeffs.iter().map(|&(j, re, im)| (j, C64::new(re, im)));
                match samples {
                    Some(n) => Contour::with_samples(modes, n),
                    None => Contour::new(modes),
                }
                .map_err(invalid)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut iter = contours.into_iter();
        let outer = iter
            .next()
            .ok_or_else(|| Error::InvalidDomain("no contours".into()))?;
        let centers = self
            .hole_centers
            .as_ref()
            .map(|v| v.iter().map(|&(re, im)| C64::new(re, im)).collect());
        Domain::new(outer, iter.collect(), centers).map_err(invalid)
    }

    pub fn from_domain(domain: &Domain<f64>) -> Self {
        Self {
            contours: domain
                .components()
                .map(|c| ContourFile {
                    coeffs: c.modes().iter().map(|&(j, z)| (j, z.re, z.im)).collect(),
                })
                .collect(),
            hole_centers: Some(domain.hole_centers().iter().map(|z| (z.re, z.im)).collect()),
            samples: Some(domain.outer().samples()),
        }
    }
}

/// Parses a domain file; malformed JSON is a [`Error::Parse`], geometric
/// problems an [`Error::InvalidDomain`].
pub fn parse_domain(text: &str, samples: Option<usize>) -> Result<Domain<f64>> {
    let file: DomainFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_domain(samples)
}

pub fn domain_to_json(domain: &Domain<f64>) -> String {
    serde_json::to_string_pretty(&DomainFile::from_domain(domain)).expect("domain serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleFile {
    pub center: (f64, f64),
    pub coeffs: Vec<(f64, f64)>,
}

/// `Σ poly[k] z^k + Σ_poles Σ_j coeffs[j] (z − center)^{−j−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFile {
    pub poly: Vec<(f64, f64)>,
    #[serde(default)]
    pub poles: Vec<PoleFile>,
}

fn pair(z: &C64) -> (f64, f64) {
    (z.re, z.im)
}

fn unpair(&(re, im): &(f64, f64)) -> C64 {
    C64::new(re, im)
}

impl From<&RationalFunction<f64>> for RationalFile {
    fn from(f: &RationalFunction<f64>) -> Self {
        Self {
            poly: f.poly.iter().map(pair).collect(),
            poles: f
                .poles
                .iter()
                .map(|p| PoleFile {
                    center: pair(&p.center),
                    coeffs: p.coeffs.iter().map(pair).collect(),
                })
                .collect(),
        }
    }
}

impl From<&RationalFile> for RationalFunction<f64> {
    fn from(f: &RationalFile) -> Self {
        Self {
            poly: f.poly.iter().map(unpair).collect(),
            poles: f
                .poles
                .iter()
                .map(|p| PolePart {
                    center: unpair(&p.center),
                    coeffs: p.coeffs.iter().map(unpair).collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_rational(text: &str) -> Result<RationalFunction<f64>> {
    let file: RationalFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((&file).into())
}

pub fn rational_to_json(f: &RationalFunction<f64>) -> String {
    serde_json::to_string_pretty(&RationalFile::from(f)).expect("rational function serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub area: f64,
    pub perimeter: f64,
    pub component_lengths: Vec<f64>,
    pub lambda_min: f64,
    pub isoperimetric_slack: f64,
    pub monodromy_sum_over_2pi: f64,
    pub checks: Vec<CheckEntry>,
}

impl AnalyzeReport {
    pub fn new(summary: &GeometricSummary<f64>, slack: f64, monodromy: f64, checks: Vec<CheckEntry>) -> Self {
        Self {
            area: summary.area,
            perimeter: summary.perimeter,
            component_lengths: summary.component_lengths.clone(),
            lambda_min: summary.lambda_min,
            isoperimetric_slack: slack,
            monodromy_sum_over_2pi: monodromy,
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub lambda_min: f64,
    pub area: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub poly_degree: usize,
    pub pole_order: usize,
    pub samples: usize,
    pub fitted_phi: RationalFile,
    pub achieved_norm: f64,
    pub gap_bound: f64,
    pub max_residual: f64,
    pub monodromy_sum_over_2pi: f64,
    pub verdict: String,
    pub checks: Vec<CheckEntry>,
}

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Extremal => "Extremal",
        Verdict::NotExtremal => "NotExtremal",
        Verdict::Indeterminate => "Indeterminate",
    }
}

impl FitReport {
    pub fn new(r: &ExtremalityReport<f64>, checks: Vec<CheckEntry>) -> Self {
        Self {
            lambda_min: r.lambda_min,
            area: r.area,
            perimeter: r.perimeter,
            diameter: r.diameter,
            poly_degree: r.basis.poly_degree,
            pole_order: r.basis.pole_order,
            samples: r.basis.samples,
            fitted_phi: (&r.fitted_phi).into(),
            achieved_norm: r.achieved_norm,
            gap_bound: r.gap_bound,
            max_residual: r.max_residual,
            monodromy_sum_over_2pi: r.monodromy_sum_over_2pi,
            verdict: verdict_label(r.verdict).to_string(),
            checks,
        }
    }
}

/// Named scalar results and checks of a command without a dedicated report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub command: String,
    pub values: Vec<(String, f64)>,
    pub checks: Vec<CheckEntry>,
}

impl SummaryReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            values: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) -> &mut Self {
        self.values.push((name.into(), v));
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verification_checks(report: &VerificationReport<f64>) -> Vec<CheckEntry> {
    report
        .checks
        .iter()
        .map(|c| CheckEntry::new(c.name.clone(), c.residual, c.tolerance, c.passed()))
        .collect()
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `component,t,residual` rows of the boundary-residual profiles.
pub fn residual_csv(report: &ExtremalityReport<f64>) -> String {
    let mut out = String::from("component,t,residual\n");
    for (k, profile) in report.residual_profiles.iter().enumerate() {
        for (t, r) in periodic_grid::<f64>(profile.len()).zip(profile) {
            let _ = writeln!(out, "{k},{t:e},{r:e}");
        }
    }
    out
}

/// One row per trajectory point: `arc,kind,zero,departure_angle,index,x,y`.
pub fn stokes_csv(graph: &StokesGraph<f64>) -> String {
    let mut out = String::from("arc,kind,zero,departure_angle,index,x,y\n");
    for (a, arc) in graph.arcs.iter().enumerate() {
        for (i, z) in arc.trajectory.points.iter().enumerate() {
            let _ = writeln!(
                out,
                "{a},{},{},{:e},{i},{:e},{:e}",
                arc.kind, arc.zero, arc.departure_angle, z.re, z.im
            );
        }
    }
    out
}

pub fn zeros_csv(graph: &StokesGraph<f64>) -> String {
    let mut out = String::from("zero,x,y,order\n");
    for (k, z) in graph.zeros.iter().enumerate() {
        let _ = writeln!(out, "{k},{:e},{:e},{}", z.location.re, z.location.im, z.order);
    }
    out
}

pub fn wkb_csv(table: &WkbErrorTable<f64>) -> String {
    let mut out = String::from("epsilon,error,ratio\n");
    for row in &table.rows {
        match row.ratio {
            Some(r) => {
                let _ = writeln!(out, "{:e},{:e},{r:e}", row.epsilon, row.error);
            }
            None => {
                let _ = writeln!(out, "{:e},{:e},", row.epsilon, row.error);
            }
        }
    }
    out
}

pub const SVG_SIZE: f64 = 1024.0;
const SVG_MARGIN: f64 = 0.05;

struct Frame {
    lo: C64,
    scale: f64,
    offset: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = C64>) -> Self {
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points.filter(|p| p.re.is_finite() && p.im.is_finite()) {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if !lo.re.is_finite() {
            lo = C64::new(-1.0, -1.0);
            hi = C64::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(f64::MIN_POSITIVE);
        let inner = SVG_SIZE * (1.0 - 2.0 * SVG_MARGIN);
        let scale = inner / span;
        let offset = (
            SVG_SIZE * SVG_MARGIN + (inner - (hi.re - lo.re) * scale) / 2.0,
            SVG_SIZE * SVG_MARGIN + (inner - (hi.im - lo.im) * scale) / 2.0,
        );
        Self { lo, scale, offset }
    }

    fn map(&self, z: C64) -> (f64, f64) {
        let x = self.offset.0 + (z.re - self.lo.re) * self.scale;
        let y = SVG_SIZE - (self.offset.1 + (z.im - self.lo.im) * self.scale);
        (x, y)
    }

    fn polyline(&self, out: &mut String, pts: &[C64], closed: bool, style: &str) {
        let mut d = String::new();
        for (i, z) in pts.iter().enumerate() {
            let (x, y) = self.map(*z);
            let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(out, r#"<path d="{d}" {style}/>"#);
    }
}

/// Self-contained 1024×1024 SVG of the domain boundary, the plus (solid)
/// and minus (dashed) Stokes arcs and the zeros of `φ′`.
pub fn stokes_svg(domain: &Domain<f64>, graph: &StokesGraph<f64>) -> String {
    let frame = Frame::fit(domain.components().flat_map(|c| c.grid_points().iter().copied()));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SVG_SIZE
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for contour in domain.components() {
        frame.polyline(&mut out, contour.grid_points(), true, r#"fill="none" stroke="black" stroke-width="2""#);
    }
    for arc in &graph.arcs {
        let style = match arc.kind {
            crate::quaddiff::ArcKind::Plus => r##"fill="none" stroke="#1f5fbf" stroke-width="1.5""##,
            crate::quaddiff::ArcKind::Minus => {
                r##"fill="none" stroke="#bf3f1f" stroke-width="1.5" stroke-dasharray="6,4""##
            }
        };
        frame.polyline(&mut out, &arc.trajectory.points, false, style);
    }
    for z in &graph.zeros {
        let (x, y) = frame.map(z.location);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANNULUS: &str = r#"{"contours": [{"coeffs": [[1, 2.0, 0.0]]}, {"coeffs": [[1, 1.0, 0.0]]}],
        "hole_centers": [[0.0, 0.0]]}"#;

    #[test]
    fn domain_roundtrip() {
        let d = parse_domain(ANNULUS, Some(128)).unwrap();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.outer().samples(), 128);
        let again = parse_domain(&domain_to_json(&d), None).unwrap();
        assert_eq!(again.outer().modes(), d.outer().modes());
        assert_eq!(again.outer().samples(), 128);
    }

    #[test]
    fn parse_and_domain_errors_are_distinguished() {
        assert!(matches!(parse_domain("{not json", None), Err(Error::Parse(_))));
        assert!(matches!(parse_domain(r#"{"contours": []}"#, None), Err(Error::InvalidDomain(_))));
        let overlapping = r#"{"contours": [{"coeffs": [[1, 1.0, 0.0]]}, {"coeffs": [[0, 0.9, 0.0], [1, 0.5, 0.0]]}]}"#;
        assert!(matches!(parse_domain(overlapping, None), Err(Error::InvalidDomain(_))));
        let clockwise = r#"{"contours": [{"coeffs": [[-1, 1.0, 0.0]]}]}"#;
        assert!(matches!(parse_domain(clockwise, None), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn rational_roundtrip() {
        let f = RationalFunction::polynomial(vec![C64::new(1.0, 2.0)])
            .with_pole(C64::new(0.5, 0.0), vec![C64::new(2.0, 0.0), C64::new(0.0, -1.0)]);
        let g = parse_rational(&rational_to_json(&f)).unwrap();
        assert_eq!(f, g);
        assert!(parse_rational("[1,").is_err());
    }

    #[test]
    fn svg_frame_keeps_margin() {
        let frame = Frame::fit([C64::new(-2.0, -1.0), C64::new(2.0, 1.0)].into_iter());
        let (x0, _) = frame.map(C64::new(-2.0, 0.0));
        let (x1, _) = frame.map(C64::new(2.0, 0.0));
        assert!((x0 - 51.2).abs() < 1e-9 && (x1 - 972.8).abs() < 1e-9);
        let (_, y) = frame.map(C64::new(0.0, 1.0));
        assert!(y < 512.0);
    }
}
