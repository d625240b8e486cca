//! The vacuum equation `v″ = −(φ′/λ²) v` along complex paths, its
//! Liouville–Green (WKB) approximants, the `O(ε)` error law and the local
//! series at zeros of `φ′`.

use num_complex::Complex;

use crate::analytic::{cauchy_derivatives, ComplexMap, RationalFunction};
use crate::error::{Error, Result};
use crate::linalg::solve_2x2;
use crate::quadrature::GaussLegendre;
use crate::quaddiff::{ArcKind, StokesGraph, ZeroOfPhiPrime};
use crate::rk::{Dopri5, State};
use crate::scalar::{cr, Real};

/// Local tolerance of the path integrator.
pub const ODE_TOLERANCE: f64 = 1e-12;

/// Samples of `(v, w = λ v′)` along a polyline.
#[derive(Debug, Clone)]
pub struct PathSolution<T> {
    pub lambda: T,
    /// Polyline vertices.
    pub path: Vec<Complex<T>>,
    /// Accepted step points (including every vertex).
    pub points: Vec<Complex<T>>,
    /// Arclength of each point along the polyline.
    pub arclength: Vec<T>,
    pub v: Vec<Complex<T>>,
    pub w: Vec<Complex<T>>,
    /// Index into `points` of each vertex.
    pub vertex_index: Vec<usize>,
}

impl<T: Real> PathSolution<T> {
    /// `(v, w)` at polyline vertex `i`.
    pub fn at_vertex(&self, i: usize) -> (Complex<T>, Complex<T>) {
        let j = self.vertex_index[i];
        (self.v[j], self.w[j])
    }

    pub fn end(&self) -> (Complex<T>, Complex<T>) {
        (*self.v.last().expect("nonempty"), *self.w.last().expect("nonempty"))
    }
}

/// Integrates `K` independent solutions at once over the polyline so that
/// they share sample points. `M = 2K`.
fn integrate<T: Real, G: ComplexMap<T> + ?Sized, const M: usize>(
    dphi: &G,
    lambda: T,
    path: &[Complex<T>],
    y0: State<T, M>,
) -> Result<(Vec<Complex<T>>, Vec<T>, Vec<State<T, M>>, Vec<usize>)> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("path needs at least two vertices".into()));
    }
    if !(lambda > T::zero()) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let mut points = vec![path[0]];
    let mut arclength = vec![T::zero()];
    let mut states = vec![y0];
    let mut vertex_index = vec![0];
    let mut y = y0;
    let mut s_total = T::zero();
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        if len == T::zero() {
            vertex_index.push(points.len() - 1);
            continue;
        }
        let e = (b - a) / len;
        let mut rhs = |s: T, y: &State<T, M>| -> Result<State<T, M>> {
            let z = a + e * s;
            let f = dphi.at(z);
            if !(f.norm().is_finite()) {
                return Err(Error::Pole {
                    re: z.re.to_f64().unwrap_or(f64::NAN),
                    im: z.im.to_f64().unwrap_or(f64::NAN),
                });
            }
            let mut out = *y;
            for k in 0..M / 2 {
                out[2 * k] = y[2 * k + 1] * e / lambda;
                out[2 * k + 1] = -(f * y[2 * k]) * e / lambda;
            }
            Ok(out)
        };
        let stepper = Dopri5::new(T::lit(ODE_TOLERANCE), T::lit(ODE_TOLERANCE * 1e-2), len / T::lit(8.0));
        y = stepper.integrate(&mut rhs, T::zero(), len, y, |s, y| {
            if s < len {
                points.push(a + e * s);
                arclength.push(s_total + s);
                states.push(*y);
            }
        })?;
        s_total += len;
        points.push(b);
        arclength.push(s_total);
        states.push(y);
        vertex_index.push(points.len() - 1);
    }
    Ok((points, arclength, states, vertex_index))
}

fn unpack<T: Real, const M: usize>(
    lambda: T,
    path: &[Complex<T>],
    data: &(Vec<Complex<T>>, Vec<T>, Vec<State<T, M>>, Vec<usize>),
    k: usize,
) -> PathSolution<T> {
    PathSolution {
        lambda,
        path: path.to_vec(),
        points: data.0.clone(),
        arclength: data.1.clone(),
        v: data.2.iter().map(|s| s[2 * k]).collect(),
        w: data.2.iter().map(|s| s[2 * k + 1]).collect(),
        vertex_index: data.3.clone(),
    }
}

/// Solves `v′ = w/λ`, `w′ = −(φ′/λ) v` along the polyline from `(v0, w0)`
/// at `path[0]`, stepping in arclength along each segment.
pub fn solve_ode<T: Real, G: ComplexMap<T> + ?Sized>(
    dphi: &G,
    lambda: T,
    path: &[Complex<T>],
    v0: Complex<T>,
    w0: Complex<T>,
) -> Result<PathSolution<T>> {
    let data = integrate(dphi, lambda, path, [v0, w0])?;
    Ok(unpack(lambda, path, &data, 0))
}

/// Two solutions on a shared set of sample points.
pub fn solve_ode_pair<T: Real, G: ComplexMap<T> + ?Sized>(
    dphi: &G,
    lambda: T,
    path: &[Complex<T>],
    first: (Complex<T>, Complex<T>),
    second: (Complex<T>, Complex<T>),
) -> Result<(PathSolution<T>, PathSolution<T>)> {
    let data = integrate(dphi, lambda, path, [first.0, first.1, second.0, second.1])?;
    Ok((unpack(lambda, path, &data, 0), unpack(lambda, path, &data, 1)))
}

/// `max |W(s) − W(0)| / |W(0)|` for `W = v₁w₂ − v₂w₁`, which is constant
/// because the equation has no first-order term.
pub fn wronskian_variation<T: Real>(a: &PathSolution<T>, b: &PathSolution<T>) -> Result<T> {
    if a.points.len() != b.points.len() {
        return Err(Error::InvalidArgument("solutions are sampled differently".into()));
    }
    let wr = |i: usize| a.v[i] * b.w[i] - b.v[i] * a.w[i];
    let w0 = wr(0);
    if w0.norm() == T::zero() {
        return Err(Error::InvalidArgument("solutions are linearly dependent".into()));
    }
    Ok((0..a.points.len())
        .map(|i| (wr(i) - w0).norm())
        .fold(T::zero(), T::max)
        / w0.norm())
}

/// Continuous branch of `φ′^{1/4}`: of the four roots, the one nearest to
/// `reference`. Fails when `arg φ′` turned by more than `π/2`.
fn follow_quartic<T: Real>(w: Complex<T>, reference: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    let r4 = reference * reference * reference * reference;
    if (w / r4).arg().abs() > T::FRAC_PI_2() {
        return Err(Error::BranchFailure {
            re: z.re.to_f64().unwrap_or(f64::NAN),
            im: z.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let q = w.sqrt().sqrt();
    let i = Complex::new(T::zero(), T::one());
    let mut best = q;
    let mut c = q;
    for _ in 0..3 {
        c *= i;
        if (c - reference).norm() < (best - reference).norm() {
            best = c;
        }
    }
    Ok(best)
}

/// `φ′^{1/4}` and `∫_{z0} √φ′ dζ` at the vertices of `path`, with the branch
/// fixed by `q0` at `path[0]`.
fn phase_along<T: Real>(
    dphi: &RationalFunction<T>,
    path: &[Complex<T>],
    q0: Complex<T>,
    floor: T,
) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    let gl = GaussLegendre::new(16);
    let mut q = vec![q0];
    let mut phase = vec![cr(T::zero())];
    for seg in path.windows(2) {
        let (qb, inc) = phase_segment(dphi, &gl, seg[0], seg[1], *q.last().expect("nonempty"), floor, 0)?;
        q.push(qb);
        phase.push(*phase.last().expect("nonempty") + inc);
    }
    Ok((q, phase))
}

fn phase_segment<T: Real>(
    dphi: &RationalFunction<T>,
    gl: &GaussLegendre<T>,
    a: Complex<T>,
    b: Complex<T>,
    qa: Complex<T>,
    floor: T,
    depth: usize,
) -> Result<(Complex<T>, Complex<T>)> {
    let check = |z: Complex<T>| -> Result<Complex<T>> {
        let w = dphi.eval(z)?;
        if w.norm() <= floor {
            return Err(Error::TurningPoint {
                re: z.re.to_f64().unwrap_or(f64::NAN),
                im: z.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(w)
    };
    let split = |depth: usize| -> Result<(Complex<T>, Complex<T>)> {
        if depth > 40 {
            return Err(Error::BranchFailure {
                re: a.re.to_f64().unwrap_or(f64::NAN),
                im: a.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        let m = (a + b) * T::lit(0.5);
        let (qm, i1) = phase_segment(dphi, gl, a, m, qa, floor, depth + 1)?;
        let (qb, i2) = phase_segment(dphi, gl, m, b, qm, floor, depth + 1)?;
        Ok((qb, i1 + i2))
    };
    let qb = match follow_quartic(check(b)?, qa, b) {
        Ok(q) => q,
        Err(Error::BranchFailure { .. }) => return split(depth),
        Err(e) => return Err(e),
    };
    // Quadrature nodes take the root nearest to the interpolated reference;
    // a large turn within the segment forces a split.
    let mut failure = None;
    let mut turned = false;
    let integral = gl.integrate_segment(a, b, |z| {
        let t = if b == a { T::zero() } else { ((z - a) / (b - a)).re };
        let reference = qa * (T::one() - t) + qb * t;
        match check(z).and_then(|w| follow_quartic(w, reference, z)) {
            Ok(q) => {
                if (q - reference).norm() > T::lit(0.5) * reference.norm() {
                    turned = true;
                }
                q * q
            }
            Err(Error::BranchFailure { .. }) => {
                turned = true;
                cr(T::zero())
            }
            Err(e) => {
                failure = Some(e);
                cr(T::zero())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if turned {
        return split(depth);
    }
    Ok((qb, integral))
}

/// Liouville–Green approximant
/// `(λ^{1/2}/φ′^{1/4}) [C₁ e^{iS/(λε)} + C₂ e^{−iS/(λε)}]` with
/// `S(z) = ∫_{z0}^z √φ′ dζ`.
#[derive(Debug, Clone)]
pub struct WkbApproximant<T> {
    pub c1: Complex<T>,
    pub c2: Complex<T>,
    pub lambda: T,
    pub epsilon: T,
    /// Anchor `z0` where the phase vanishes.
    pub anchor: Complex<T>,
    /// Branch of `φ′^{1/4}` at the anchor.
    pub quartic_root: Complex<T>,
}

impl<T: Real> WkbApproximant<T> {
    fn k(&self) -> Complex<T> {
        Complex::new(T::zero(), T::one() / (self.lambda * self.epsilon))
    }

    /// Values at the vertices of `path` (which must start at the anchor).
    pub fn eval_along(&self, dphi: &RationalFunction<T>, path: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if path.first() != Some(&self.anchor) {
            return Err(Error::InvalidArgument("path must start at the anchor".into()));
        }
        let floor = turning_floor(dphi, path)?;
        let (q, phase) = phase_along(dphi, path, self.quartic_root, floor)?;
        let k = self.k();
        let amp = self.lambda.sqrt();
        Ok(q.iter()
            .zip(&phase)
            .map(|(q, s)| cr(amp) / *q * (self.c1 * (k * *s).exp() + self.c2 * (-k * *s).exp()))
            .collect())
    }
}

/// `1e-6 ·` the largest `|φ′|` on the path vertices; `|φ′|` below it counts
/// as a turning point.
fn turning_floor<T: Real>(dphi: &RationalFunction<T>, path: &[Complex<T>]) -> Result<T> {
    let mut m = T::zero();
    for z in path {
        m = m.max(dphi.eval(*z)?.norm());
    }
    Ok(T::lit(1e-6) * m)
}

/// Evaluates the LG approximant with given constants along `path`, anchored
/// at `path[0]` on the principal branch of `φ′^{1/4}`.
pub fn wkb_eval<T: Real>(
    dphi: &RationalFunction<T>,
    lambda: T,
    epsilon: T,
    c1: Complex<T>,
    c2: Complex<T>,
    path: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let z0 = *path.first().ok_or_else(|| Error::InvalidArgument("empty path".into()))?;
    let approx = WkbApproximant {
        c1,
        c2,
        lambda,
        epsilon,
        anchor: z0,
        quartic_root: dphi.eval(z0)?.sqrt().sqrt(),
    };
    approx.eval_along(dphi, path)
}

/// Chooses `C₁, C₂` so the approximant matches `v` and `v′` at the anchor.
pub fn fit_wkb<T: Real>(
    dphi: &RationalFunction<T>,
    lambda: T,
    epsilon: T,
    anchor: Complex<T>,
    v0: Complex<T>,
    dv0: Complex<T>,
) -> Result<WkbApproximant<T>> {
    let w = dphi.eval(anchor)?;
    if !(w.norm() > T::zero()) {
        return Err(Error::TurningPoint {
            re: anchor.re.to_f64().unwrap_or(f64::NAN),
            im: anchor.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let q = w.sqrt().sqrt();
    let dq = dphi.derivative().eval(anchor)? / (q * q * q * T::lit(4.0));
    let amp = cr(lambda.sqrt());
    let k = Complex::new(T::zero(), T::one() / (lambda * epsilon));
    // y = amp/q (C₁ + C₂), y′ = amp(−q′/q²)(C₁ + C₂) + amp·q·k(C₁ − C₂).
    let a = [
        [amp / q, amp / q],
        [-amp * dq / (q * q) + amp * q * k, -amp * dq / (q * q) - amp * q * k],
    ];
    let [c1, c2] = solve_2x2(a, [v0, dv0])?;
    Ok(WkbApproximant {
        c1,
        c2,
        lambda,
        epsilon,
        anchor,
        quartic_root: q,
    })
}

/// Error of the LG approximant against the integrated solution for one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbErrorRow<T> {
    pub epsilon: T,
    /// `max |v_LG − v| / max |v|` over the path vertices.
    pub error: T,
    /// `error / previous error` (none for the first row).
    pub ratio: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbErrorTable<T> {
    pub rows: Vec<WkbErrorRow<T>>,
    /// All ratios lie in `[0.1, 0.9]`.
    pub asymptotic: bool,
    /// All ratios lie in `[0.3, 0.7]`.
    pub first_order: bool,
}

/// For each `ε`, integrates `v″ = −φ′/(λε)² v` from `(v0, v0′)` and compares
/// with the LG approximant fitted at the path start.
pub fn wkb_error_scaling<T: Real>(
    dphi: &RationalFunction<T>,
    lambda: T,
    path: &[Complex<T>],
    epsilons: &[T],
    v0: Complex<T>,
    dv0: Complex<T>,
) -> Result<WkbErrorTable<T>> {
    let z0 = *path.first().ok_or_else(|| Error::InvalidArgument("empty path".into()))?;
    let floor = turning_floor(dphi, path)?;
    for seg in path.windows(2) {
        let gl = GaussLegendre::new(16);
        let mut bad = None;
        gl.integrate_segment(seg[0], seg[1], |z| {
            if let Ok(w) = dphi.eval(z) {
                if w.norm() <= floor {
                    bad = Some(z);
                }
            }
            cr(T::zero())
        });
        if let Some(z) = bad {
            return Err(Error::TurningPoint {
                re: z.re.to_f64().unwrap_or(f64::NAN),
                im: z.im.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut rows: Vec<WkbErrorRow<T>> = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let eff = lambda * eps;
        let sol = solve_ode(dphi, eff, path, v0, dv0 * eff)?;
        let approx = fit_wkb(dphi, lambda, eps, z0, v0, dv0)?;
        let lg = approx.eval_along(dphi, path)?;
        let mut num = T::zero();
        let mut den = T::zero();
        for (i, y) in lg.iter().enumerate() {
            let (v, _) = sol.at_vertex(i);
            num = num.max((*y - v).norm());
            den = den.max(v.norm());
        }
        let error = num / den;
        let ratio = rows.last().map(|r| error / r.error);
        rows.push(WkbErrorRow {
            epsilon: eps,
            error,
            ratio,
        });
    }
    let ratios: Vec<T> = rows.iter().filter_map(|r| r.ratio).collect();
    let within = |lo: f64, hi: f64| ratios.iter().all(|r| *r >= T::lit(lo) && *r <= T::lit(hi));
    Ok(WkbErrorTable {
        asymptotic: within(0.1, 0.9),
        first_order: within(0.3, 0.7),
        rows,
    })
}

/// Zeros of `φ′` within `radius` of the path vertices or segments.
pub fn turning_points_near<T: Real>(
    zeros: &[ZeroOfPhiPrime<T>],
    path: &[Complex<T>],
    radius: T,
) -> Vec<usize> {
    zeros
        .iter()
        .enumerate()
        .filter(|(_, z)| {
            path.windows(2)
                .any(|s| segment_distance(z.location, s[0], s[1]) < radius)
        })
        .map(|(i, _)| i)
        .collect()
}

fn segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).max(T::zero()).min(T::one());
    (p - (a + d * t)).norm()
}

fn segments_cross<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> bool {
    let cross = |u: Complex<T>, v: Complex<T>| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    (d1 > T::zero()) != (d2 > T::zero()) && (d3 > T::zero()) != (d4 > T::zero())
}

/// Fails with [`Error::CrossesStokesArc`] when the path crosses a plus arc
/// of `graph`, where continuation of the LG approximant would need the
/// Stokes connection.
pub fn check_stokes_crossing<T: Real>(graph: &StokesGraph<T>, path: &[Complex<T>]) -> Result<()> {
    for (id, arc) in graph.arcs.iter().enumerate() {
        if arc.kind != ArcKind::Plus {
            continue;
        }
        for seg in path.windows(2) {
            for piece in arc.trajectory.points.windows(2) {
                if segments_cross(seg[0], seg[1], piece[0], piece[1]) {
                    return Err(Error::CrossesStokesArc { arc: id });
                }
            }
        }
    }
    Ok(())
}

/// Taylor data of a solution at a zero of `φ′` of order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSeries<T> {
    /// `v(z0)`.
    pub c1: Complex<T>,
    /// `v′(z0)`.
    pub c2: Complex<T>,
    /// Coefficient of `(z − z0)^{m+2}`.
    pub c3: Complex<T>,
    /// All Taylor coefficients `0..=m+2`.
    pub coefficients: Vec<Complex<T>>,
    /// Largest `|c_j| ρ^j / Σ|c_k| ρ^k` over `j = 2..=m+1`.
    pub max_gap_coefficient: T,
}

/// Extracts the Taylor coefficients of the solution with data `(v0, w0)` at
/// the zero via Cauchy integrals of ray solutions, and checks that orders
/// `2..=m+1` vanish.
pub fn local_series<T: Real>(
    dphi: &RationalFunction<T>,
    zero: &ZeroOfPhiPrime<T>,
    lambda: T,
    v0: Complex<T>,
    w0: Complex<T>,
    radius: T,
) -> Result<LocalSeries<T>> {
    let m = zero.order;
    let z0 = zero.location;
    let solution = |z: Complex<T>| -> Complex<T> {
        if z == z0 {
            return v0;
        }
        match solve_ode(dphi, lambda, &[z0, z], v0, w0) {
            Ok(s) => s.end().0,
            Err(_) => Complex::new(T::nan(), T::nan()),
        }
    };
    let derivs = cauchy_derivatives(&solution, z0, m + 2, radius)?;
    let mut factorial = T::one();
    let coefficients: Vec<Complex<T>> = derivs
        .iter()
        .enumerate()
        .map(|(j, d)| {
            if j > 0 {
                factorial *= T::from_usize_(j);
            }
            *d / factorial
        })
        .collect();
    let weight = |j: usize| coefficients[j].norm() * radius.powi(j as i32);
    let total: T = (0..coefficients.len()).map(weight).fold(T::zero(), |a, b| a + b);
    let mut gap = T::zero();
    if total > T::zero() {
        for j in 2..=m + 1 {
            let rel = weight(j) / total;
            if rel > gap {
                gap = rel;
            }
        }
    }
    if gap > T::lit(1e-8) {
        let j = (2..=m + 1)
            .max_by(|a, b| weight(*a).partial_cmp(&weight(*b)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(2);
        return Err(Error::OrderMismatch {
            order: j,
            size: gap.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(LocalSeries {
        c1: coefficients[0],
        c2: coefficients[1],
        c3: coefficients[m + 2],
        coefficients,
        max_gap_coefficient: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn poly(c: &[(f64, f64)]) -> RationalFunction<f64> {
        RationalFunction::polynomial(c.iter().map(|&(a, b)| cx(a, b)).collect())
    }

    fn line(a: Complex<f64>, b: Complex<f64>, n: usize) -> Vec<Complex<f64>> {
        (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
    }

    fn arc(r: f64, from: f64, to: f64, n: usize) -> Vec<Complex<f64>> {
        (0..=n)
            .map(|k| Complex::from_polar(r, from + (to - from) * k as f64 / n as f64))
            .collect()
    }

    fn annulus_dphi() -> RationalFunction<f64> {
        RationalFunction::zero().with_pole(cx(0.0, 0.0), vec![cx(0.0, 0.0), cx(-2.0, 0.0)])
    }

    #[test]
    fn harmonic_oscillator() {
        let lam = 0.7;
        let dphi = poly(&[(lam * lam, 0.0)]);
        let path = line(cx(0.0, 0.0), cx(3.0, 0.0), 6);
        let sol = solve_ode(&dphi, lam, &path, cx(1.0, 0.0), cx(0.0, lam)).unwrap();
        for (z, v) in sol.points.iter().zip(&sol.v) {
            assert!((*v - (cx(0.0, 1.0) * *z).exp()).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_differential_gives_linear_solution() {
        let path = line(cx(0.0, 0.0), cx(1.0, 2.0), 3);
        let sol = solve_ode(&RationalFunction::zero(), 2.0, &path, cx(1.0, 1.0), cx(0.5, 0.0)).unwrap();
        for (z, v) in sol.points.iter().zip(&sol.v) {
            assert!((*v - (cx(1.0, 1.0) + cx(0.5, 0.0) * *z / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn annulus_vacuum_along_radial_and_circular_paths() {
        let dphi = annulus_dphi();
        // v₁ = (z/2)², v₁′ = z/2 at z = 2 → (1, 1); w = λv′.
        let radial = line(cx(2.0, 0.0), cx(1.0, 0.0), 10);
        let sol = solve_ode(&dphi, 1.0, &radial, cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        for (z, v) in sol.points.iter().zip(&sol.v) {
            let exact = (*z / 2.0).powi(2);
            assert!((*v - exact).norm() < 1e-9 * exact.norm());
        }
        let circle = arc(2.0, 0.0, 2.0 * PI, 256);
        let sol = solve_ode(&dphi, 1.0, &circle, cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        for i in 0..circle.len() {
            let (v, _) = sol.at_vertex(i);
            let exact = (circle[i] / 2.0).powi(2);
            assert!((v - exact).norm() < 1e-9);
            assert!((v.norm() - 1.0).abs() < 1e-8);
        }
        // v₂ = 1/z on the inner circle: v = 1, v′ = −1 at z = 1.
        let inner = arc(1.0, 0.0, 2.0 * PI, 256);
        let sol = solve_ode(&dphi, 1.0, &inner, cx(1.0, 0.0), cx(-1.0, 0.0)).unwrap();
        for i in 0..inner.len() {
            let (v, _) = sol.at_vertex(i);
            assert!((v - inner[i].inv()).norm() < 1e-9);
        }
    }

    #[test]
    fn wronskian_is_constant() {
        let dphi = poly(&[(1.0, 0.5), (0.3, 0.0), (0.0, -0.2)]);
        let path = vec![cx(0.0, 0.0), cx(1.0, 0.5), cx(0.5, 1.5), cx(-1.0, 1.0)];
        let (a, b) = solve_ode_pair(&dphi, 0.8, &path, (cx(1.0, 0.0), cx(0.0, 0.0)), (cx(0.0, 0.0), cx(1.0, 0.0))).unwrap();
        assert!(wronskian_variation(&a, &b).unwrap() < 1e-9);
    }

    #[test]
    fn wkb_examples() {
        let path = line(cx(0.0, 0.0), cx(2.0, 0.0), 8);
        let v = wkb_eval(&poly(&[(1.0, 0.0)]), 1.0, 1.0, cx(1.0, 0.0), cx(0.0, 0.0), &path).unwrap();
        for (z, y) in path.iter().zip(&v) {
            assert!((*y - (cx(0.0, 1.0) * *z).exp()).norm() < 1e-13);
        }
        let zero = wkb_eval(&poly(&[(1.0, 0.0)]), 1.0, 1.0, cx(0.0, 0.0), cx(0.0, 0.0), &path).unwrap();
        assert!(zero.iter().all(|y| y.norm() == 0.0));
        // Phase i√2 log(z) on the radial path from 1 to 2.
        let dphi = annulus_dphi();
        let radial = line(cx(1.0, 0.0), cx(2.0, 0.0), 16);
        let q0 = dphi.eval(cx(1.0, 0.0)).unwrap().sqrt().sqrt();
        let (_, phase) = phase_along(&dphi, &radial, q0, 0.0).unwrap();
        let root0 = q0 * q0;
        for (z, s) in radial.iter().zip(&phase) {
            let exact = root0 * z.ln();
            assert!((*s - exact).norm() < 1e-13);
        }
        assert!((root0 - cx(0.0, 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn lg_is_exact_for_constant_differential() {
        let dphi = poly(&[(2.0, 0.0)]);
        let path = line(cx(0.0, 0.0), cx(3.0, 0.0), 30);
        let t = wkb_error_scaling(&dphi, 1.0, &path, &[0.1, 0.05, 0.025], cx(1.0, 0.0), cx(0.3, 0.0)).unwrap();
        assert!(t.rows.iter().all(|r| r.error < 1e-9));
    }

    #[test]
    fn lg_error_is_first_order_in_epsilon() {
        let dphi = poly(&[(1.0, 0.0), (1.0, 0.0)]);
        let path = line(cx(0.5, 0.0), cx(1.5, 0.0), 200);
        let t = wkb_error_scaling(&dphi, 1.0, &path, &[0.1, 0.05, 0.025], cx(1.0, 0.0), cx(0.0, 0.0)).unwrap();
        for r in &t.rows {
            if let Some(q) = r.ratio {
                assert!((0.3..=0.7).contains(&q), "{:?}", t.rows);
            }
        }
        assert!(t.first_order && t.asymptotic);
    }

    #[test]
    fn path_through_turning_point_is_rejected() {
        let dphi = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        let path = line(cx(-1.0, 0.0), cx(1.0, 0.0), 2);
        assert!(matches!(
            wkb_error_scaling(&dphi, 1.0, &path, &[0.1, 0.05], cx(1.0, 0.0), cx(0.0, 0.0)),
            Err(Error::TurningPoint { .. })
        ));
    }

    #[test]
    fn local_series_at_simple_zero() {
        let dphi = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        let zero = ZeroOfPhiPrime { location: cx(0.0, 0.0), order: 1 };
        let lam = 0.9;
        let (v0, w0) = (cx(0.7, -0.2), cx(0.3, 0.4));
        let s = local_series(&dphi, &zero, lam, v0, w0, 0.5).unwrap();
        assert!((s.c1 - v0).norm() < 1e-10);
        assert!((s.c2 - w0 / lam).norm() < 1e-10);
        assert!(s.coefficients[2].norm() < 1e-8 * s.c1.norm());
        assert!((s.c3 + v0 / (6.0 * lam * lam)).norm() < 1e-8);
    }

    #[test]
    fn local_series_at_double_zero() {
        let dphi = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let zero = ZeroOfPhiPrime { location: cx(0.0, 0.0), order: 2 };
        let s = local_series(&dphi, &zero, 1.0, cx(1.0, 0.0), cx(0.5, 0.0), 0.5).unwrap();
        assert!(s.coefficients[2].norm() < 1e-8 && s.coefficients[3].norm() < 1e-8);
        assert!((s.c3 + cx(1.0 / 12.0, 0.0)).norm() < 1e-8);
        let zeroed = local_series(&dphi, &zero, 1.0, cx(0.0, 0.0), cx(0.0, 0.0), 0.5).unwrap();
        assert!(zeroed.coefficients.iter().all(|c| c.norm() == 0.0));
    }
}
