//! Closed analytic contours, multiply-connected domains and their geometry.
//!
//! A contour is a truncated Fourier series `γ(t) = Σ_j c_j e^{ijt}`, so its
//! derivatives are exact coefficient shifts and periodic integrals converge
//! spectrally under the trapezoid rule. All contours are stored
//! counterclockwise; the orientation of a component relative to the domain
//! is carried by its sign `α` (`−1` for the outer component, `+1` for holes).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::periodic_trapezoid;
use crate::scalar::{periodic_grid, Real};

pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Contour<T> {
    modes: Vec<(i32, Complex<T>)>,
    samples: usize,
    points: Vec<Complex<T>>,
    velocities: Vec<Complex<T>>,
    diameter: T,
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> Contour<T> {
    /// Builds and validates a contour from `(j, c_j)` pairs with the default
    /// grid size.
    pub fn new(modes: impl IntoIterator<Item = (i32, Complex<T>)>) -> Result<Self> {
        Self::with_samples(modes, DEFAULT_SAMPLES)
    }

    pub fn with_samples(
        modes: impl IntoIterator<Item = (i32, Complex<T>)>,
        samples: usize,
    ) -> Result<Self> {
        let contour = Self::unchecked(modes, samples)?;
        contour.validate()?;
        Ok(contour)
    }

    fn unchecked(modes: impl IntoIterator<Item = (i32, Complex<T>)>, samples: usize) -> Result<Self> {
        if samples < 16 {
            return Err(Error::InvalidArgument(format!(
                "contour needs at least 16 samples, got {samples}"
            )));
        }
        let mut merged: Vec<(i32, Complex<T>)> = Vec::new();
        let mut raw: Vec<(i32, Complex<T>)> = modes.into_iter().collect();
        raw.sort_by_key(|(j, _)| *j);
        for (j, c) in raw {
            match merged.last_mut() {
                Some((k, acc)) if *k == j => *acc += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|(_, c)| *c != Complex::new(T::zero(), T::zero()));
        let mut contour = Self {
            modes: merged,
            samples,
            points: Vec::new(),
            velocities: Vec::new(),
            diameter: T::zero(),
        };
        let grid: Vec<T> = periodic_grid(samples).collect();
        contour.points = grid.iter().map(|&t| contour.eval(t)).collect();
        contour.velocities = grid.iter().map(|&t| contour.derivative(t, 1)).collect();
        let (lo_re, hi_re, lo_im, hi_im) = contour.points.iter().fold(
            (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity()),
            |(a, b, c, d), p| (a.min(p.re), b.max(p.re), c.min(p.im), d.max(p.im)),
        );
        contour.diameter = (hi_re - lo_re).hypot(hi_im - lo_im);
        Ok(contour)
    }

    /// Circle of the given centre and radius, traversed counterclockwise.
    pub fn circle(center: Complex<T>, radius: T) -> Result<Self> {
        Self::new([(0, center), (1, Complex::new(radius, T::zero()))])
    }

    /// Axis-aligned ellipse `center + a cos t + i b sin t`.
    pub fn ellipse(center: Complex<T>, a: T, b: T) -> Result<Self> {
        let half = T::lit(0.5);
        Self::new([
            (0, center),
            (1, Complex::new((a + b) * half, T::zero())),
            (-1, Complex::new((a - b) * half, T::zero())),
        ])
    }

    /// Same curve, re-sampled on a grid of `samples` points.
    pub fn resampled(&self, samples: usize) -> Result<Self> {
        Self::with_samples(self.modes.iter().copied(), samples)
    }

    /// Image under `z ↦ rotation·z + shift` with `|rotation| = 1` preserving
    /// orientation (any nonzero complex factor is accepted).
    pub fn transformed(&self, factor: Complex<T>, shift: Complex<T>) -> Result<Self> {
        let mut modes: Vec<(i32, Complex<T>)> =
            self.modes.iter().map(|(j, c)| (*j, *c * factor)).collect();
        modes.push((0, shift));
        Self::with_samples(modes, self.samples)
    }

    pub fn modes(&self) -> &[(i32, Complex<T>)] {
        &self.modes
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn grid(&self) -> impl Iterator<Item = T> + Clone {
        periodic_grid(self.samples)
    }

    pub fn grid_points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// `γ(t)`.
    pub fn eval(&self, t: T) -> Complex<T> {
        self.derivative(t, 0)
    }

    /// `γ^{(order)}(t)`, exact by coefficient shifts.
    pub fn derivative(&self, t: T, order: u32) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, c) in &self.modes {
            let jf = T::from_i32(*j).unwrap();
            let factor = Complex::new(T::zero(), jf).powu(order);
            acc += *c * factor * Complex::from_polar(T::one(), jf * t);
        }
        acc
    }

    pub fn speed(&self, t: T) -> T {
        self.derivative(t, 1).norm()
    }

    /// Unit tangent `τ = γ′/|γ′|`.
    pub fn tangent(&self, t: T) -> Result<Complex<T>> {
        let d = self.derivative(t, 1);
        let speed = d.norm();
        if speed <= self.degeneracy_floor() {
            return Err(Error::DegenerateTangent(to_f64(t)));
        }
        Ok(d / speed)
    }

    /// Signed curvature `κ = Im(conj(γ′)γ″)/|γ′|³`; positive on
    /// counterclockwise circles.
    pub fn curvature(&self, t: T) -> Result<T> {
        let d1 = self.derivative(t, 1);
        let d2 = self.derivative(t, 2);
        let speed = d1.norm();
        if speed <= self.degeneracy_floor() {
            return Err(Error::DegenerateTangent(to_f64(t)));
        }
        Ok((d1.conj() * d2).im / (speed * speed * speed))
    }

    /// Arclength derivative of the curvature, `dκ/ds`.
    pub fn curvature_derivative(&self, t: T) -> Result<T> {
        let d1 = self.derivative(t, 1);
        let d2 = self.derivative(t, 2);
        let d3 = self.derivative(t, 3);
        let speed = d1.norm();
        if speed <= self.degeneracy_floor() {
            return Err(Error::DegenerateTangent(to_f64(t)));
        }
        let s2 = speed * speed;
        let cross = (d1.conj() * d2).im;
        let dot = (d1.conj() * d2).re;
        let dkdt = (d1.conj() * d3).im / (s2 * speed) - T::lit(3.0) * cross * dot / (s2 * s2 * speed);
        Ok(dkdt / speed)
    }

    fn degeneracy_floor(&self) -> T {
        T::lit(1e-9) * self.max_speed().max(T::min_positive_value())
    }

    fn max_speed(&self) -> T {
        self.velocities.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// `(1/2)∮ Im(conj(γ) γ′) dt` by the trapezoid rule.
    pub fn signed_area(&self) -> T {
        let half = T::lit(0.5);
        periodic_trapezoid(
            self.points
                .iter()
                .zip(&self.velocities)
                .map(|(p, v)| (p.conj() * v).im * half),
        )
    }

    /// `∮ |γ′| dt`.
    pub fn length(&self) -> T {
        periodic_trapezoid(self.velocities.iter().map(|v| v.norm()))
    }

    /// Checks immersion, sampled simplicity and counterclockwise orientation.
    pub fn validate(&self) -> Result<()> {
        let max = self.max_speed();
        let min = self.velocities.iter().map(|v| v.norm()).fold(T::infinity(), T::min);
        if !(min > T::lit(1e-9) * max) {
            return Err(Error::NotImmersed {
                min: to_f64(min),
                max: to_f64(max),
            });
        }
        let n = self.samples;
        let sep = n / 16;
        let tol = T::lit(1e-8) * self.diameter;
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (j - i).min(n - (j - i));
                if gap <= sep {
                    continue;
                }
                if (self.points[i] - self.points[j]).norm() < tol {
                    return Err(Error::SelfIntersecting { i, j });
                }
            }
        }
        let area = self.signed_area();
        if !(area > T::zero()) {
            return Err(Error::Clockwise(to_f64(area)));
        }
        Ok(())
    }

    /// Winding number of the sampled polygon about `z`.
    pub fn polygon_winding(&self, z: Complex<T>) -> i64 {
        let n = self.points.len();
        let mut total = T::zero();
        for i in 0..n {
            let a = self.points[i] - z;
            let b = self.points[(i + 1) % n] - z;
            total += (b / a).arg();
        }
        (total / T::two_pi()).round().to_i64().unwrap_or(0)
    }

    /// Nearest point on the curve: returns `(distance, t*)`.
    pub fn distance(&self, z: Complex<T>) -> (T, T) {
        let (mut best_i, mut best_d) = (0usize, T::infinity());
        for (i, p) in self.points.iter().enumerate() {
            let d = (*p - z).norm();
            if d < best_d {
                best_d = d;
                best_i = i;
            }
        }
        let step = T::two_pi() / T::from_usize_(self.samples);
        let mut t = step * T::from_usize_(best_i);
        let t0 = t;
        for _ in 0..30 {
            let g = self.eval(t) - z;
            let d1 = self.derivative(t, 1);
            let d2 = self.derivative(t, 2);
            let f = (g.conj() * d1).re;
            let fp = d1.norm_sqr() + (g.conj() * d2).re;
            if fp <= T::zero() {
                break;
            }
            let dt = f / fp;
            let dt = dt.max(-step).min(step);
            t -= dt;
            if dt.abs() < T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        if (t - t0).abs() > step * T::lit(2.0) {
            t = t0;
        }
        let d = (self.eval(t) - z).norm();
        if d <= best_d {
            (d, t)
        } else {
            (best_d, t0)
        }
    }

    /// Winding number of the continuous curve about `z`, or `None` when `z`
    /// lies within `1e-8 · diameter` of the curve.
    pub fn winding(&self, z: Complex<T>) -> Option<i64> {
        let (d, t) = self.distance(z);
        if d < T::lit(1e-8) * self.diameter {
            return None;
        }
        let spacing = self.length() / T::from_usize_(self.samples);
        if d > T::lit(4.0) * spacing {
            return Some(self.polygon_winding(z));
        }
        // Close to the curve the polygon may sit on the wrong side; use the
        // side of the nearest tangent instead.
        let tau = self.derivative(t, 1);
        let side = (tau.conj() * (z - self.eval(t))).im;
        Some(if side > T::zero() { 1 } else { 0 })
    }
}

/// Bounded domain: one outer contour and zero or more holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain<T> {
    outer: Contour<T>,
    inners: Vec<Contour<T>>,
    hole_centers: Vec<Complex<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricSummary<T> {
    pub area: T,
    pub perimeter: T,
    pub component_lengths: Vec<T>,
    pub lambda_min: T,
}

impl<T: Real> Domain<T> {
    /// Validates nesting and disjointness of the contours. Hole centres
    /// default to the centroid of each inner contour.
    pub fn new(
        outer: Contour<T>,
        inners: Vec<Contour<T>>,
        hole_centers: Option<Vec<Complex<T>>>,
    ) -> Result<Self> {
        for (k, inner) in inners.iter().enumerate() {
            if inner.grid_points().iter().any(|p| outer.polygon_winding(*p) != 1) {
                return Err(Error::InvalidDomain(format!(
                    "inner contour {} is not strictly inside the outer contour",
                    k + 1
                )));
            }
        }
        for a in 0..inners.len() {
            for b in 0..inners.len() {
                if a != b
                    && inners[a]
                        .grid_points()
                        .iter()
                        .any(|p| inners[b].polygon_winding(*p) != 0)
                {
                    return Err(Error::InvalidDomain(format!(
                        "inner contours {} and {} overlap",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let centers = match hole_centers {
            Some(c) => {
                if c.len() != inners.len() {
                    return Err(Error::InvalidDomain(format!(
                        "{} hole centres given for {} holes",
                        c.len(),
                        inners.len()
                    )));
                }
                c
            }
            None => inners.iter().map(area_centroid).collect(),
        };
        for (k, (inner, c)) in inners.iter().zip(&centers).enumerate() {
            if inner.winding(*c) != Some(1) {
                return Err(Error::InvalidDomain(format!(
                    "hole centre {} does not lie inside inner contour {}",
                    k + 1,
                    k + 1
                )));
            }
        }
        Ok(Self {
            outer,
            inners,
            hole_centers: centers,
        })
    }

    pub fn outer(&self) -> &Contour<T> {
        &self.outer
    }

    pub fn inners(&self) -> &[Contour<T>] {
        &self.inners
    }

    pub fn hole_centers(&self) -> &[Complex<T>] {
        &self.hole_centers
    }

    /// Number of boundary components `n`.
    pub fn n_components(&self) -> usize {
        1 + self.inners.len()
    }

    /// Component `k`, with `k = 0` the outer contour.
    pub fn component(&self, k: usize) -> &Contour<T> {
        if k == 0 {
            &self.outer
        } else {
            &self.inners[k - 1]
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Contour<T>> {
        std::iter::once(&self.outer).chain(self.inners.iter())
    }

    /// Orientation sign of component `k`: `−1` for the outer, `+1` for holes.
    pub fn alpha(&self, k: usize) -> T {
        if k == 0 {
            -T::one()
        } else {
            T::one()
        }
    }

    pub fn diameter(&self) -> T {
        self.outer.diameter()
    }

    /// Image under `z ↦ factor·z + shift`.
    pub fn transformed(&self, factor: Complex<T>, shift: Complex<T>) -> Result<Self> {
        Self::new(
            self.outer.transformed(factor, shift)?,
            self.inners
                .iter()
                .map(|c| c.transformed(factor, shift))
                .collect::<Result<_>>()?,
            Some(self.hole_centers.iter().map(|c| *c * factor + shift).collect()),
        )
    }

    /// Membership by winding numbers; points within `1e-8 · diameter` of a
    /// contour are reported as [`Error::Indeterminate`].
    pub fn contains(&self, z: Complex<T>) -> Result<bool> {
        let mut inside = true;
        for (k, contour) in self.components().enumerate() {
            let w = contour.winding(z).ok_or(Error::Indeterminate { contour: k })?;
            let expected = if k == 0 { 1 } else { 0 };
            if w != expected {
                inside = false;
            }
        }
        Ok(inside)
    }

    /// Distance from `z` to the nearest boundary component.
    pub fn boundary_distance(&self, z: Complex<T>) -> T {
        self.components().map(|c| c.distance(z).0).fold(T::infinity(), T::min)
    }
}

fn area_centroid<T: Real>(c: &Contour<T>) -> Complex<T> {
    // Centroid of the enclosed region via Green's theorem on the samples.
    let pts = c.grid_points();
    let n = pts.len();
    let mut a = T::zero();
    let mut cx = T::zero();
    let mut cy = T::zero();
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let cross = p.re * q.im - q.re * p.im;
        a += cross;
        cx += (p.re + q.re) * cross;
        cy += (p.im + q.im) * cross;
    }
    let six_a = T::lit(3.0) * a;
    Complex::new(cx / six_a, cy / six_a)
}

/// Area, perimeter, component lengths and `λ_m = 2A/P`.
pub fn geometric_summary<T: Real>(domain: &Domain<T>) -> Result<GeometricSummary<T>> {
    let area = domain.outer.signed_area()
        - domain.inners.iter().map(|c| c.signed_area()).fold(T::zero(), |a, b| a + b);
    if !(area > T::zero()) {
        return Err(Error::InvalidDomain(format!(
            "nonpositive area {}",
            to_f64(area)
        )));
    }
    let component_lengths: Vec<T> = domain.components().map(|c| c.length()).collect();
    let perimeter = component_lengths.iter().fold(T::zero(), |a, b| a + *b);
    Ok(GeometricSummary {
        area,
        perimeter,
        lambda_min: T::lit(2.0) * area / perimeter,
        component_lengths,
    })
}

/// `∮ (1 + αλκ) ds` over one contour.
pub fn curvature_integral<T: Real>(contour: &Contour<T>, lambda: T, alpha: T) -> T {
    periodic_trapezoid(contour.grid().map(|t| {
        let d1 = contour.derivative(t, 1);
        let d2 = contour.derivative(t, 2);
        let speed = d1.norm();
        // κ |γ′| = Im(conj γ′ γ″)/|γ′|²
        speed + alpha * lambda * (d1.conj() * d2).im / (speed * speed)
    }))
}

/// Total turning `∮ κ ds` (equals `2π` on simple counterclockwise curves).
pub fn turning<T: Real>(contour: &Contour<T>) -> T {
    curvature_integral(contour, T::one(), T::one()) - contour.length()
}

/// `L_1 − 4πA/P`, nonnegative for every valid domain.
pub fn isoperimetric_slack<T: Real>(domain: &Domain<T>) -> Result<T> {
    let s = geometric_summary(domain)?;
    Ok(s.component_lengths[0] - T::lit(4.0) * T::PI() * s.area / s.perimeter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn annulus(r1: f64, r2: f64) -> Domain<f64> {
        Domain::new(
            Contour::circle(cx(0.0, 0.0), r1).unwrap(),
            vec![Contour::circle(cx(0.0, 0.0), r2).unwrap()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let unit = Contour::circle(cx(0.0, 0.0), 1.0).unwrap();
        assert!((unit.eval(0.0) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!((unit.eval(PI / 2.0) - cx(0.0, 1.0)).norm() < 1e-15);
        let ellipse = Contour::new([(1, cx(1.5, 0.0)), (-1, cx(0.5, 0.0))]).unwrap();
        assert!((ellipse.eval(0.0) - cx(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tangent_examples() {
        let unit = Contour::circle(cx(0.0, 0.0), 1.0).unwrap();
        assert!((unit.tangent(0.0).unwrap() - cx(0.0, 1.0)).norm() < 1e-15);
        assert!((unit.tangent(PI).unwrap() - cx(0.0, -1.0)).norm() < 1e-15);
        let two = Contour::circle(cx(0.0, 0.0), 2.0).unwrap();
        for t in [0.1, 1.3, 4.0] {
            let want = cx(0.0, 1.0) * Complex::from_polar(1.0, t);
            assert!((two.tangent(t).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn curvature_examples() {
        let two = Contour::circle(cx(0.0, 0.0), 2.0).unwrap();
        assert!((two.curvature(0.7).unwrap() - 0.5).abs() < 1e-15);
        let unit = Contour::circle(cx(0.0, 0.0), 1.0).unwrap();
        assert!((unit.curvature(2.0).unwrap() - 1.0).abs() < 1e-15);
        let ellipse = Contour::ellipse(cx(0.0, 0.0), 2.0, 1.0).unwrap();
        // ab/(a² sin² t + b² cos² t)^{3/2} at t = 0
        assert!((ellipse.curvature(0.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_tangent_is_an_error() {
        // c_1 = 1, c_2 = 1/2 gives γ′(π) = 0: a cusp, rejected at construction.
        let err = Contour::<f64>::new([(1, cx(1.0, 0.0)), (2, cx(0.5, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::NotImmersed { .. }));
    }

    #[test]
    fn clockwise_contours_are_rejected() {
        let err = Contour::<f64>::new([(-1, cx(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::Clockwise(_)));
    }

    #[test]
    fn figure_eight_is_not_simple() {
        // γ(t) = sin(2t)... has a double point at the origin hit by the grid.
        let err = Contour::<f64>::new([
            (1, cx(0.0, -0.5)),
            (-1, cx(0.0, 0.5)),
            (2, cx(0.0, -0.25)),
            (-2, cx(0.0, 0.25)),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn summary_examples() {
        let s = geometric_summary(&annulus(2.0, 1.0)).unwrap();
        assert!((s.area - 3.0 * PI).abs() < 1e-12);
        assert!((s.perimeter - 6.0 * PI).abs() < 1e-12);
        assert!((s.lambda_min - 1.0).abs() < 1e-12);
        let s = geometric_summary(&annulus(3.0, 1.0)).unwrap();
        assert!((s.lambda_min - 2.0).abs() < 1e-12);
        let s = geometric_summary(&annulus(1.0, 0.5)).unwrap();
        assert!((s.area - 0.75 * PI).abs() < 1e-12);
        assert!((s.perimeter - 3.0 * PI).abs() < 1e-12);
        assert!((s.lambda_min - 0.5).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let d = annulus(2.0, 1.0);
        assert!(d.contains(cx(1.5, 0.0)).unwrap());
        assert!(!d.contains(cx(0.5, 0.0)).unwrap());
        assert!(!d.contains(cx(3.0, 0.0)).unwrap());
        assert!(matches!(
            d.contains(cx(2.0, 0.0)),
            Err(Error::Indeterminate { contour: 0 })
        ));
        // Just inside the outer circle, closer than the polygon sagitta.
        assert!(d.contains(Complex::from_polar(2.0 - 1e-6, 0.0123)).unwrap());
        assert!(!d.contains(Complex::from_polar(2.0 + 1e-6, 0.0123)).unwrap());
    }

    #[test]
    fn curvature_integral_examples() {
        let unit = Contour::circle(cx(0.0, 0.0), 1.0).unwrap();
        assert!((curvature_integral(&unit, 1.0, 1.0) - 4.0 * PI).abs() < 1e-12);
        let two = Contour::circle(cx(0.0, 0.0), 2.0).unwrap();
        assert!((curvature_integral(&two, 1.0, -1.0) - 2.0 * PI).abs() < 1e-12);
        let e = Contour::ellipse(cx(0.3, 0.0), 2.0, 1.0).unwrap();
        assert!((curvature_integral(&e, 0.0, 1.0) - e.length()).abs() < 1e-12);
    }

    #[test]
    fn isoperimetric_examples() {
        assert!((isoperimetric_slack(&annulus(2.0, 1.0)).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((isoperimetric_slack(&annulus(3.0, 2.0)).unwrap() - 4.0 * PI).abs() < 1e-12);
        let tiny = isoperimetric_slack(&annulus(1.0, 1e-4)).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-3);
    }

    #[test]
    fn overlapping_holes_are_rejected() {
        let outer = Contour::circle(cx(0.0, 0.0), 3.0).unwrap();
        let a = Contour::circle(cx(-0.2, 0.0), 1.0).unwrap();
        let b = Contour::circle(cx(0.2, 0.0), 1.0).unwrap();
        assert!(matches!(
            Domain::new(outer, vec![a, b], None),
            Err(Error::InvalidDomain(_))
        ));
    }

    #[test]
    fn hole_outside_outer_is_rejected() {
        let outer = Contour::circle(cx(0.0, 0.0), 1.0).unwrap();
        let hole = Contour::circle(cx(0.9, 0.0), 0.5).unwrap();
        assert!(Domain::new(outer, vec![hole], None).is_err());
    }

    #[test]
    fn reciprocal_tangent_squares_to_conjugate_ratio() {
        let c = Contour::new([
            (1, cx(2.0, 0.0)),
            (3, cx(0.1, 0.05)),
            (-2, cx(0.05, 0.0)),
        ])
        .unwrap();
        let mut worst: f64 = 0.0;
        for t in c.grid() {
            let d = c.derivative(t, 1);
            let u = Complex::new(d.norm(), 0.0) / d;
            worst = worst.max((u * u - d.conj() / d).norm());
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn turning_number_is_two_pi() {
        let c = Contour::new([(1, cx(2.0, 0.0)), (3, cx(0.1, 0.0)), (-1, cx(0.3, 0.1))]).unwrap();
        assert!((turning(&c) - 2.0 * PI).abs() < 1e-8 * 2.0 * PI);
    }

    #[test]
    fn quadrature_converges_spectrally() {
        let modes = [(1, cx(2.0, 0.0)), (3, cx(0.1, 0.0)), (-2, cx(0.05, 0.02))];
        let coarse = Contour::with_samples(modes, 256).unwrap();
        let fine = Contour::with_samples(modes, 512).unwrap();
        assert!(((coarse.signed_area() - fine.signed_area()) / fine.signed_area()).abs() < 1e-10);
        assert!(((coarse.length() - fine.length()) / fine.length()).abs() < 1e-10);
    }
}
