//! The quadratic differential `φ′(z) dz²`: zeros of `φ′`, branch-tracked
//! square roots, horizontal (`+`) and vertical (`−`) trajectories, the Stokes
//! graph emanating from the zeros, and the boundary metric identity
//! `φ′τ² = 1 + λακ`.

use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;

use crate::analytic::RationalFunction;
use crate::error::{Error, Result};
use crate::geometry::{Contour, Domain};
use crate::quadrature::GaussLegendre;
use crate::rk::Dopri5;
use crate::scalar::{cr, Real};

/// Area in which zeros are sought and trajectories traced.
pub trait Region<T: Real>: Sync {
    /// `Some(true)` inside, `Some(false)` outside, `None` within the boundary
    /// tolerance.
    fn inside(&self, z: Complex<T>) -> Option<bool>;
    fn bounding_box(&self) -> Rect<T>;
    /// Length scale used for relative tolerances.
    fn scale(&self) -> T {
        self.bounding_box().diameter()
    }
    /// Boundary outline(s) for plotting.
    fn outline(&self, samples: usize) -> Vec<Vec<Complex<T>>>;
}

/// Axis-aligned closed rectangle `[lo.re, hi.re] × [lo.im, hi.im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub lo: Complex<T>,
    pub hi: Complex<T>,
}

impl<T: Real> Rect<T> {
    pub fn new(lo: Complex<T>, hi: Complex<T>) -> Result<Self> {
        if !(hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::InvalidArgument("empty rectangle".into()));
        }
        Ok(Self { lo, hi })
    }

    /// The square `[−h, h]²` about `center`.
    pub fn square(center: Complex<T>, h: T) -> Result<Self> {
        Self::new(center - Complex::new(h, h), center + Complex::new(h, h))
    }

    pub fn width(&self) -> T {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> T {
        self.hi.im - self.lo.im
    }

    pub fn diameter(&self) -> T {
        (self.hi - self.lo).norm()
    }

    pub fn center(&self) -> Complex<T> {
        (self.lo + self.hi) * T::lit(0.5)
    }

    fn strictly_contains(&self, z: Complex<T>) -> bool {
        z.re > self.lo.re && z.re < self.hi.re && z.im > self.lo.im && z.im < self.hi.im
    }

    fn corners(&self) -> [Complex<T>; 4] {
        [
            self.lo,
            Complex::new(self.hi.re, self.lo.im),
            self.hi,
            Complex::new(self.lo.re, self.hi.im),
        ]
    }

    fn expanded(&self, by: T) -> Self {
        Self {
            lo: self.lo - Complex::new(by, by),
            hi: self.hi + Complex::new(by, by),
        }
    }
}

impl<T: Real> Region<T> for Rect<T> {
    fn inside(&self, z: Complex<T>) -> Option<bool> {
        let tol = T::lit(1e-8) * self.diameter();
        let margin = (z.re - self.lo.re)
            .min(self.hi.re - z.re)
            .min(z.im - self.lo.im)
            .min(self.hi.im - z.im);
        if margin.abs() <= tol {
            None
        } else {
            Some(margin > T::zero())
        }
    }

    fn bounding_box(&self) -> Rect<T> {
        *self
    }

    fn outline(&self, _samples: usize) -> Vec<Vec<Complex<T>>> {
        let c = self.corners();
        vec![vec![c[0], c[1], c[2], c[3], c[0]]]
    }
}

/// Open disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Real> Region<T> for Disk<T> {
    fn inside(&self, z: Complex<T>) -> Option<bool> {
        let gap = self.radius - (z - self.center).norm();
        if gap.abs() <= T::lit(1e-8) * self.radius {
            None
        } else {
            Some(gap > T::zero())
        }
    }

    fn bounding_box(&self) -> Rect<T> {
        let r = Complex::new(self.radius, self.radius);
        Rect {
            lo: self.center - r,
            hi: self.center + r,
        }
    }

    fn outline(&self, samples: usize) -> Vec<Vec<Complex<T>>> {
        let n = samples.max(8);
        vec![(0..=n)
            .map(|i| self.center + Complex::from_polar(self.radius, T::two_pi() * T::from_usize_(i) / T::from_usize_(n)))
            .collect()]
    }
}

impl<T: Real> Region<T> for Domain<T> {
    fn inside(&self, z: Complex<T>) -> Option<bool> {
        self.contains(z).ok()
    }

    fn bounding_box(&self) -> Rect<T> {
        let pts = self.outer().grid_points();
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in pts {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        }
        Rect { lo, hi }
    }

    fn scale(&self) -> T {
        self.diameter()
    }

    fn outline(&self, samples: usize) -> Vec<Vec<Complex<T>>> {
        self.components().map(|c| closed_polyline(c, samples)).collect()
    }
}

fn closed_polyline<T: Real>(c: &Contour<T>, samples: usize) -> Vec<Complex<T>> {
    let n = samples.max(8);
    (0..=n)
        .map(|i| c.eval(T::two_pi() * T::from_usize_(i) / T::from_usize_(n)))
        .collect()
}

/// Zero of `φ′` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOfPhiPrime<T> {
    pub location: Complex<T>,
    pub order: usize,
}

const MAX_DEPTH: usize = 40;
const EDGE_SAMPLES: usize = 32;

/// Reason an edge could not be used for the argument principle.
struct BadEdge;

struct ArgTracker<'a, T> {
    f: &'a RationalFunction<T>,
    df: RationalFunction<T>,
    scale: T,
}

impl<'a, T: Real> ArgTracker<'a, T> {
    fn new(f: &'a RationalFunction<T>, scale: T) -> Self {
        Self {
            f,
            df: f.derivative(),
            scale,
        }
    }

    fn sample(&self, z: Complex<T>) -> std::result::Result<(Complex<T>, T), BadEdge> {
        let w = self.f.eval(z).map_err(|_| BadEdge)?;
        let dw = self.df.eval(z).map_err(|_| BadEdge)?;
        if !(w.norm() > T::min_positive_value()) || !w.norm().is_finite() {
            return Err(BadEdge);
        }
        // |φ″/φ′| bounds how fast the argument may turn.
        Ok((w, (dw / w).norm()))
    }

    /// Change of `arg φ′` along the segment `a → b`.
    fn segment(&self, a: Complex<T>, b: Complex<T>) -> std::result::Result<T, BadEdge> {
        let n = EDGE_SAMPLES;
        let mut total = T::zero();
        let mut prev = self.sample(a)?;
        let mut za = a;
        for i in 1..=n {
            let zb = a + (b - a) * (T::from_usize_(i) / T::from_usize_(n));
            let next = self.sample(zb)?;
            total += self.refine(za, prev, zb, next, 0)?;
            za = zb;
            prev = next;
        }
        Ok(total)
    }

    fn refine(
        &self,
        a: Complex<T>,
        fa: (Complex<T>, T),
        b: Complex<T>,
        fb: (Complex<T>, T),
        depth: usize,
    ) -> std::result::Result<T, BadEdge> {
        let d = (fb.0 / fa.0).arg();
        let h = (b - a).norm();
        let fast = h * fa.1.max(fb.1) > T::lit(0.3);
        if d.abs() < T::FRAC_PI_4() && !fast {
            return Ok(d);
        }
        if depth >= 48 || h < T::lit(1e-13) * self.scale {
            return Err(BadEdge);
        }
        let m = (a + b) * T::lit(0.5);
        let fm = self.sample(m)?;
        Ok(self.refine(a, fa, m, fm, depth + 1)? + self.refine(m, fm, b, fb, depth + 1)?)
    }

    /// Winding of `φ′` around `0` along the boundary of `rect`.
    fn winding(&self, rect: &Rect<T>) -> std::result::Result<i64, BadEdge> {
        let c = rect.corners();
        let mut total = T::zero();
        for i in 0..4 {
            total += self.segment(c[i], c[(i + 1) % 4])?;
        }
        let turns = total / T::two_pi();
        let rounded = turns.round();
        if (turns - rounded).abs() > T::lit(0.05) {
            return Err(BadEdge);
        }
        Ok(rounded.to_i64().unwrap_or(0))
    }

    /// Zeros minus poles of `φ′` inside `rect`, plus the known pole orders.
    fn zero_count(&self, rect: &Rect<T>) -> std::result::Result<i64, BadEdge> {
        let tol = T::lit(1e-12) * self.scale;
        let mut poles = 0i64;
        for (c, order) in self.f.pole_orders() {
            let margin = (c.re - rect.lo.re)
                .min(rect.hi.re - c.re)
                .min(c.im - rect.lo.im)
                .min(rect.hi.im - c.im);
            if margin.abs() <= tol {
                return Err(BadEdge);
            }
            if margin > T::zero() {
                poles += order as i64;
            }
        }
        let count = self.winding(rect)? + poles;
        if count < 0 {
            return Err(BadEdge);
        }
        Ok(count)
    }
}

/// Total multiplicity of the zeros of `φ′` in `rect` from one global
/// argument-principle contour integral.
pub fn argument_principle_count<T: Real>(dphi: &RationalFunction<T>, rect: &Rect<T>) -> Result<usize> {
    let tracker = ArgTracker::new(dphi, rect.diameter());
    for k in 0..8 {
        let r = rect.expanded(rect.diameter() * T::lit(1e-3 * k as f64 * 1.618));
        if let Ok(n) = tracker.zero_count(&r) {
            return Ok(n as usize);
        }
    }
    Err(Error::InvalidArgument(
        "φ′ vanishes or is singular on the rectangle edges".into(),
    ))
}

/// All zeros of `φ′` in `rect` with multiplicities, by recursive
/// argument-principle bisection followed by Newton polishing.
pub fn find_zeros<T: Real>(dphi: &RationalFunction<T>, rect: &Rect<T>) -> Result<Vec<ZeroOfPhiPrime<T>>> {
    let scale = rect.diameter();
    let tracker = ArgTracker::new(dphi, scale);
    let mut start = None;
    for k in 0..8 {
        let r = rect.expanded(scale * T::lit(1e-3 * k as f64 * 1.618));
        if let Ok(n) = tracker.zero_count(&r) {
            start = Some((r, n));
            break;
        }
    }
    let (rect, count) = start.ok_or_else(|| {
        Error::InvalidArgument("φ′ vanishes or is singular on the rectangle edges".into())
    })?;
    let derivs = Derivatives::new(dphi);
    let mut zeros = Vec::new();
    bisect(&tracker, &derivs, rect, count, 0, scale, &mut zeros)?;
    zeros.sort_by(|a, b| {
        a.location
            .re
            .partial_cmp(&b.location.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.location.im.partial_cmp(&b.location.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(zeros)
}

/// Zeros of `φ′` inside a region: zeros of the bounding box filtered by
/// membership.
pub fn find_zeros_in<T: Real, R: Region<T> + ?Sized>(
    dphi: &RationalFunction<T>,
    region: &R,
) -> Result<Vec<ZeroOfPhiPrime<T>>> {
    let bbox = region.bounding_box();
    let zeros = find_zeros(dphi, &bbox)?;
    Ok(zeros
        .into_iter()
        .filter(|z| region.inside(z.location) == Some(true))
        .collect())
}

struct Derivatives<T> {
    /// `φ′, φ″, φ‴, …` built on demand.
    list: std::sync::Mutex<Vec<RationalFunction<T>>>,
}

impl<T: Real> Derivatives<T> {
    fn new(f: &RationalFunction<T>) -> Self {
        Self {
            list: std::sync::Mutex::new(vec![f.clone()]),
        }
    }

    fn get(&self, k: usize) -> RationalFunction<T> {
        let mut list = self.list.lock().expect("derivative cache poisoned");
        while list.len() <= k {
            let next = list.last().expect("nonempty").derivative();
            list.push(next);
        }
        list[k].clone()
    }
}

fn newton<T: Real>(g: &RationalFunction<T>, dg: &RationalFunction<T>, z0: Complex<T>, scale: T) -> Option<Complex<T>> {
    let mut z = z0;
    for _ in 0..60 {
        let v = g.eval(z).ok()?;
        let d = dg.eval(z).ok()?;
        if d.norm() == T::zero() {
            return if v.norm() == T::zero() { Some(z) } else { None };
        }
        let step = v / d;
        z -= step;
        if !(z.norm().is_finite()) {
            return None;
        }
        if step.norm() <= T::lit(4.0) * T::epsilon() * (scale + z.norm()) {
            return Some(z);
        }
    }
    Some(z)
}

fn bisect<T: Real>(
    tracker: &ArgTracker<'_, T>,
    derivs: &Derivatives<T>,
    rect: Rect<T>,
    count: i64,
    depth: usize,
    scale: T,
    out: &mut Vec<ZeroOfPhiPrime<T>>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let m = count as usize;
    let small = rect.width().max(rect.height()) < T::lit(1e-3) * scale;
    if m == 1 || small {
        // A cluster of total order m: the (m − 1)-th derivative has a simple
        // zero there.
        let g = derivs.get(m - 1);
        let dg = derivs.get(m);
        if let Some(z) = newton(&g, &dg, rect.center(), scale) {
            if rect.strictly_contains(z) || small {
                out.push(ZeroOfPhiPrime { location: z, order: m });
                return Ok(());
            }
        }
    }
    if depth >= MAX_DEPTH {
        return Err(Error::BisectionDepth(MAX_DEPTH));
    }
    let split_re = rect.width() >= rect.height();
    for frac in [0.5 + 0.0131, 0.5 - 0.0217, 0.5 + 0.0373, 0.5 - 0.0491, 0.5 + 0.0719] {
        let f = T::lit(frac);
        let (a, b) = if split_re {
            let x = rect.lo.re + rect.width() * f;
            (
                Rect { lo: rect.lo, hi: Complex::new(x, rect.hi.im) },
                Rect { lo: Complex::new(x, rect.lo.im), hi: rect.hi },
            )
        } else {
            let y = rect.lo.im + rect.height() * f;
            (
                Rect { lo: rect.lo, hi: Complex::new(rect.hi.re, y) },
                Rect { lo: Complex::new(rect.lo.re, y), hi: rect.hi },
            )
        };
        if let (Ok(na), Ok(nb)) = (tracker.zero_count(&a), tracker.zero_count(&b)) {
            if na + nb == count {
                bisect(tracker, derivs, a, na, depth + 1, scale, out)?;
                bisect(tracker, derivs, b, nb, depth + 1, scale, out)?;
                return Ok(());
            }
        }
    }
    Err(Error::BisectionDepth(depth))
}

/// Picks the root of `w` nearest to `reference`; fails when the argument of
/// `w` has turned by more than `π/2` relative to `reference²`.
fn follow_root<T: Real>(w: Complex<T>, reference: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    let fail = || Error::BranchFailure {
        re: z.re.to_f64().unwrap_or(f64::NAN),
        im: z.im.to_f64().unwrap_or(f64::NAN),
    };
    if !(w.norm() > T::zero()) {
        return Err(Error::TurningPoint {
            re: z.re.to_f64().unwrap_or(f64::NAN),
            im: z.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    if (w / (reference * reference)).arg().abs() > T::FRAC_PI_2() {
        return Err(fail());
    }
    let s = w.sqrt();
    Ok(if (s * reference.conj()).re >= T::zero() { s } else { -s })
}

/// Continuous branch of `√φ′` at the vertices of `path`, starting from
/// `sign · principal √φ′(path[0])`.
///
/// Segments on which `arg φ′` turns by more than `π/2` are subdivided.
pub fn sqrt_tracked<T: Real>(
    dphi: &RationalFunction<T>,
    path: &[Complex<T>],
    initial_sign: T,
) -> Result<Vec<Complex<T>>> {
    let Some(first) = path.first() else {
        return Ok(Vec::new());
    };
    let w0 = dphi.eval(*first)?;
    let mut current = w0.sqrt() * initial_sign.signum();
    let mut out = Vec::with_capacity(path.len());
    out.push(current);
    for pair in path.windows(2) {
        current = track_segment(dphi, pair[0], pair[1], current, 0)?;
        out.push(current);
    }
    Ok(out)
}

fn track_segment<T: Real>(
    dphi: &RationalFunction<T>,
    a: Complex<T>,
    b: Complex<T>,
    root_a: Complex<T>,
    depth: usize,
) -> Result<Complex<T>> {
    let w = dphi.eval(b)?;
    match follow_root(w, root_a, b) {
        Ok(r) => Ok(r),
        Err(Error::BranchFailure { .. }) if depth < 50 => {
            let m = (a + b) * T::lit(0.5);
            let rm = track_segment(dphi, a, m, root_a, depth + 1)?;
            track_segment(dphi, m, b, rm, depth + 1)
        }
        Err(e) => Err(e),
    }
}

/// Horizontal (`Im ∫√φ′ dz = 0`) or vertical (`Re ∫√φ′ dz = 0`) family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    Plus,
    Minus,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Plus => "plus",
            ArcKind::Minus => "minus",
        })
    }
}

impl ArcKind {
    /// Unit direction `dz/ds` for the tracked root `r` of `φ′`.
    fn direction<T: Real>(self, r: Complex<T>) -> Complex<T> {
        let d = r.conj() / r.norm();
        match self {
            ArcKind::Plus => d,
            ArcKind::Minus => Complex::new(-d.im, d.re),
        }
    }

    /// Component of `∫√φ′ dz` that must stay constant.
    fn drift_part<T: Real>(self, f: Complex<T>) -> T {
        match self {
            ArcKind::Plus => f.im,
            ArcKind::Minus => f.re,
        }
    }
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    /// Reached zero number `.0` of the supplied list.
    Zero(usize),
    /// Left the region; the stored point is the clipped exit point.
    Boundary(Complex<T>),
    /// Returned to its start with aligned direction.
    Closed { gap: T },
    MaxLength,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions<T> {
    pub rtol: T,
    /// Maximum step relative to the region scale.
    pub max_step: T,
    /// Maximum arclength relative to the region scale.
    pub max_length: T,
    /// Closure gap relative to the region scale.
    pub closure_tol: T,
    /// Minimum cosine between start and end directions for closure.
    pub closure_alignment: T,
    /// Capture radius of other zeros relative to the region scale.
    pub zero_capture: T,
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            max_step: T::lit(1e-2),
            max_length: T::lit(20.0),
            closure_tol: T::lit(1e-6),
            closure_alignment: T::lit(0.999),
            zero_capture: T::lit(1e-4),
        }
    }
}

/// A traced trajectory of `φ′ dz²`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub kind: ArcKind,
    pub points: Vec<Complex<T>>,
    /// Tracked `√φ′` at each point.
    pub roots: Vec<Complex<T>>,
    pub length: T,
    pub end: Termination<T>,
    /// `max |Im ∫√φ′ dz|` (plus) or `max |Re ∫√φ′ dz|` (minus) over the
    /// trajectory, measured from its origin.
    pub drift: T,
    /// Median of `|√φ′|` over the samples.
    pub median_root: T,
}

impl<T: Real> Trajectory<T> {
    /// `drift / (length · median|√φ′|)`; the tracing contract keeps this
    /// below `1e-8`.
    pub fn relative_drift(&self) -> T {
        let denom = self.length * self.median_root;
        if denom > T::zero() {
            self.drift / denom
        } else {
            T::zero()
        }
    }
}

struct Tracer<'a, T: Real, R: Region<T> + ?Sized> {
    dphi: &'a RationalFunction<T>,
    region: &'a R,
    zeros: &'a [ZeroOfPhiPrime<T>],
    singular: Vec<Complex<T>>,
    scale: T,
    opts: TraceOptions<T>,
}

impl<'a, T: Real, R: Region<T> + ?Sized> Tracer<'a, T, R> {
    fn new(
        dphi: &'a RationalFunction<T>,
        region: &'a R,
        zeros: &'a [ZeroOfPhiPrime<T>],
        opts: TraceOptions<T>,
    ) -> Self {
        let singular = zeros
            .iter()
            .map(|z| z.location)
            .chain(dphi.pole_orders().into_iter().map(|(c, _)| c))
            .collect();
        Self {
            dphi,
            region,
            zeros,
            singular,
            scale: region.scale(),
            opts,
        }
    }

    fn singular_distance(&self, z: Complex<T>) -> T {
        self.singular
            .iter()
            .map(|p| (*p - z).norm())
            .fold(T::infinity(), T::min)
    }

    fn trace(
        &self,
        kind: ArcKind,
        start: Complex<T>,
        root: Complex<T>,
        origin: Option<(usize, Complex<T>)>,
    ) -> Result<Trajectory<T>> {
        let scale = self.scale;
        let h_max = self.opts.max_step * scale;
        let max_length = self.opts.max_length * scale;
        let stepper = Dopri5::new(self.opts.rtol, self.opts.rtol * T::lit(1e-2) * scale, h_max);
        let capture = self.opts.zero_capture * scale;
        let leave = T::lit(1e-3) * scale;

        let mut points = vec![start];
        let mut roots = vec![root];
        let mut z = start;
        let mut r = root;
        let mut s = T::zero();
        let start_dir = kind.direction(root);
        let mut left_start = false;
        let mut left_origin = origin.is_none();
        let origin_radius = origin.map(|(_, z0)| (start - z0).norm()).unwrap_or(T::zero());
        let mut h = (h_max * T::lit(0.1)).min(T::lit(0.5) * self.singular_distance(z));
        let mut end = Termination::MaxLength;

        while s < max_length {
            let cap = T::lit(0.5) * self.singular_distance(z);
            h = h.min(cap).min(max_length - s).max(stepper.h_min);
            let reference = r;
            let mut rhs = |_s: T, y: &[Complex<T>; 1]| -> Result<[Complex<T>; 1]> {
                let w = self.dphi.eval(y[0])?;
                Ok([kind.direction(follow_root(w, reference, y[0])?)])
            };
            let trial = match stepper.trial(&mut rhs, s, &[z], h) {
                Ok(t) => t,
                Err(Error::BranchFailure { .. }) | Err(Error::Pole { .. }) => {
                    h *= T::lit(0.5);
                    if h < stepper.h_min {
                        return Err(step_collapse(z));
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            if trial.error > T::one() {
                h = stepper.next_step(h, trial.error).min(h * T::lit(0.9));
                if h < stepper.h_min {
                    return Err(step_collapse(z));
                }
                continue;
            }
            let z1 = trial.y[0];
            let w1 = self.dphi.eval(z1)?;
            let r1 = match follow_root(w1, r, z1) {
                Ok(v) => v,
                Err(Error::BranchFailure { .. }) => {
                    h *= T::lit(0.5);
                    continue;
                }
                Err(e) => return Err(e),
            };

            // Boundary exit, clipped by bisection on the step length.
            let inside = self.region.inside(z1);
            if inside != Some(true) {
                let (zc, rc, hc) = if inside == Some(false) {
                    let mut lo = T::zero();
                    let mut hi = h;
                    let mut best = (z, r);
                    for _ in 0..80 {
                        if hi - lo <= T::lit(1e-13) * scale {
                            break;
                        }
                        let mid = (lo + hi) * T::lit(0.5);
                        let zt = stepper.trial(&mut rhs, s, &[z], mid)?.y[0];
                        match self.region.inside(zt) {
                            Some(true) => {
                                lo = mid;
                                best = (zt, follow_root(self.dphi.eval(zt)?, r, zt)?);
                            }
                            _ => hi = mid,
                        }
                    }
                    (best.0, best.1, lo)
                } else {
                    (z1, r1, h)
                };
                s += hc;
                points.push(zc);
                roots.push(rc);
                end = Termination::Boundary(zc);
                break;
            }

            // Closure: the step crosses the normal line through the start.
            if left_start {
                let p0 = ((z - start) * start_dir.conj()).re;
                let p1 = ((z1 - start) * start_dir.conj()).re;
                if p0 < T::zero() && p1 >= T::zero() && (z1 - start).norm() <= (z1 - z).norm() + leave {
                    let mut lo = T::zero();
                    let mut hi = h;
                    for _ in 0..80 {
                        let mid = (lo + hi) * T::lit(0.5);
                        let zt = stepper.trial(&mut rhs, s, &[z], mid)?.y[0];
                        if ((zt - start) * start_dir.conj()).re < T::zero() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= T::lit(1e-15) * scale {
                            break;
                        }
                    }
                    let hc = (lo + hi) * T::lit(0.5);
                    let zc = stepper.trial(&mut rhs, s, &[z], hc)?.y[0];
                    let rc = follow_root(self.dphi.eval(zc)?, r, zc)?;
                    let gap = (zc - start).norm();
                    let cos = (kind.direction(rc) * start_dir.conj()).re;
                    if gap < self.opts.closure_tol * scale && cos > self.opts.closure_alignment {
                        s += hc;
                        points.push(zc);
                        roots.push(rc);
                        end = Termination::Closed { gap };
                        break;
                    }
                }
            }

            s += h;
            z = z1;
            r = r1;
            points.push(z);
            roots.push(r);
            if !left_start && (z - start).norm() > leave {
                left_start = true;
            }
            if let Some((_, z0)) = origin {
                if !left_origin && (z - z0).norm() > T::lit(2.0) * origin_radius {
                    left_origin = true;
                }
            }

            // Capture by a zero (the originating one only after leaving it).
            let mut captured = None;
            for (id, zero) in self.zeros.iter().enumerate() {
                if !left_origin && origin.map(|(o, _)| o) == Some(id) {
                    continue;
                }
                if (z - zero.location).norm() < capture {
                    captured = Some(id);
                    break;
                }
            }
            if let Some(id) = captured {
                end = Termination::Zero(id);
                break;
            }
            h = stepper.next_step(h, trial.error);
        }

        let drift = self.drift(kind, &points, &roots, origin)?;
        let mut mags: Vec<T> = roots.iter().map(|r| r.norm()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median_root = mags[mags.len() / 2];
        Ok(Trajectory {
            kind,
            points,
            roots,
            length: s,
            end,
            drift,
            median_root,
        })
    }

    /// Accumulates `∫√φ′ dz` over the chords of the polyline (path
    /// independence makes chords equivalent to the traced arc) and returns
    /// the largest deviation of the conserved component.
    fn drift(
        &self,
        kind: ArcKind,
        points: &[Complex<T>],
        roots: &[Complex<T>],
        origin: Option<(usize, Complex<T>)>,
    ) -> Result<T> {
        let gl = GaussLegendre::new(8);
        let mut acc = match origin {
            Some((id, z0)) => ray_integral(self.dphi, z0, points[0], roots[0], self.zeros[id].order)?,
            None => cr(T::zero()),
        };
        let mut worst = kind.drift_part(acc).abs();
        for i in 1..points.len() {
            let (a, b) = (points[i - 1], points[i]);
            let ra = roots[i - 1];
            let mut err = None;
            let inc = gl.integrate_segment(a, b, |z| match self.dphi.eval(z).and_then(|w| follow_root(w, ra, z)) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    cr(T::zero())
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            acc += inc;
            worst = worst.max(kind.drift_part(acc).abs());
        }
        Ok(worst)
    }
}

fn step_collapse<T: Real>(z: Complex<T>) -> Error {
    Error::StepCollapse {
        re: z.re.to_f64().unwrap_or(f64::NAN),
        im: z.im.to_f64().unwrap_or(f64::NAN),
    }
}

/// `∫_{z0}^{z} √φ′ dζ` along the ray from a zero of order `m`, with the
/// branch fixed by the root `root_end` at `z`. The substitution `t = u²`
/// removes the half-integer branch-point singularity.
fn ray_integral<T: Real>(
    dphi: &RationalFunction<T>,
    z0: Complex<T>,
    z: Complex<T>,
    root_end: Complex<T>,
    m: usize,
) -> Result<Complex<T>> {
    let gl = GaussLegendre::new(24);
    let d = z - z0;
    let half_m = T::from_usize_(m) * T::lit(0.5);
    // Branch at parameter u ∈ (0,1]: root_end · u^m times the slowly varying
    // correction, chosen nearest to that leading model.
    let mut err = None;
    let val = gl.integrate_segment(cr(T::zero()), cr(T::one()), |u| {
        let u = u.re;
        let t = u * u;
        let p = z0 + d * t;
        let model = root_end * t.powf(half_m);
        let r = match dphi.eval(p) {
            Ok(w) => {
                let s = w.sqrt();
                if (s * model.conj()).re >= T::zero() {
                    s
                } else {
                    -s
                }
            }
            Err(e) => {
                err = Some(e);
                cr(T::zero())
            }
        };
        r * d * (T::lit(2.0) * u)
    });
    match err {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// Traces the trajectory of `kind` through `start`, with the branch of
/// `√φ′(start)` chosen so the initial direction best matches
/// `initial_direction` (principal branch when `None`).
pub fn trace_trajectory<T: Real, R: Region<T> + ?Sized>(
    dphi: &RationalFunction<T>,
    region: &R,
    zeros: &[ZeroOfPhiPrime<T>],
    start: Complex<T>,
    kind: ArcKind,
    initial_direction: Option<Complex<T>>,
    opts: &TraceOptions<T>,
) -> Result<Trajectory<T>> {
    let w = dphi.eval(start)?;
    if !(w.norm() > T::zero()) {
        return Err(Error::TurningPoint {
            re: start.re.to_f64().unwrap_or(f64::NAN),
            im: start.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut root = w.sqrt();
    if let Some(d) = initial_direction {
        if (kind.direction(root) * d.conj()).re < T::zero() {
            root = -root;
        }
    }
    Tracer::new(dphi, region, zeros, *opts).trace(kind, start, root, None)
}

/// Departure angles `θ_j = (2πj − arg a)/(m + 2)` of the plus arcs from a
/// zero with leading coefficient `a` of order `m`; minus arcs are offset by
/// `π/(m + 2)`.
pub fn departure_angles<T: Real>(a: Complex<T>, m: usize, kind: ArcKind) -> Vec<T> {
    let n = T::from_usize_(m + 2);
    let shift = match kind {
        ArcKind::Plus => T::zero(),
        ArcKind::Minus => T::PI(),
    };
    (0..m + 2)
        .map(|j| (T::two_pi() * T::from_usize_(j) + shift - a.arg()) / n)
        .collect()
}

/// Leading Taylor coefficient `a = φ′^{(m)}(z0)/m!` at a zero of order `m`.
pub fn leading_coefficient<T: Real>(dphi: &RationalFunction<T>, zero: &ZeroOfPhiPrime<T>) -> Result<Complex<T>> {
    let mut f = dphi.clone();
    let mut factorial = T::one();
    for k in 1..=zero.order {
        f = f.derivative();
        factorial *= T::from_usize_(k);
    }
    Ok(f.eval(zero.location)? / factorial)
}

/// One arc of the Stokes graph.
#[derive(Debug, Clone)]
pub struct StokesArc<T> {
    pub kind: ArcKind,
    /// Index of the originating zero.
    pub zero: usize,
    /// Measured departure angle at the zero.
    pub departure_angle: T,
    pub trajectory: Trajectory<T>,
}

/// Zeros of `φ′` with the `m + 2` plus and minus arcs from each.
#[derive(Debug, Clone)]
pub struct StokesGraph<T> {
    pub zeros: Vec<ZeroOfPhiPrime<T>>,
    pub arcs: Vec<StokesArc<T>>,
}

impl<T: Real> StokesGraph<T> {
    pub fn arcs_from(&self, zero: usize, kind: ArcKind) -> impl Iterator<Item = &StokesArc<T>> {
        self.arcs
            .iter()
            .filter(move |a| a.zero == zero && a.kind == kind)
    }

    /// Sorted departure angles in `[0, 2π)`.
    fn sorted_angles(&self, zero: usize, kind: ArcKind) -> Vec<T> {
        let mut v: Vec<T> = self
            .arcs_from(zero, kind)
            .map(|a| {
                let x = a.departure_angle % T::two_pi();
                if x < T::zero() {
                    x + T::two_pi()
                } else {
                    x
                }
            })
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    /// `max |gap between adjacent plus angles − 2π/(m + 2)|` over all zeros.
    pub fn angle_defect(&self) -> T {
        let mut worst = T::zero();
        for (id, zero) in self.zeros.iter().enumerate() {
            let angles = self.sorted_angles(id, ArcKind::Plus);
            let expected = T::two_pi() / T::from_usize_(zero.order + 2);
            for (i, a) in angles.iter().enumerate() {
                let next = if i + 1 < angles.len() {
                    angles[i + 1]
                } else {
                    angles[0] + T::two_pi()
                };
                worst = worst.max((next - *a - expected).abs());
            }
        }
        worst
    }

    /// `max` distance of each minus angle from the bisector of the adjacent
    /// plus angles.
    pub fn bisector_defect(&self) -> T {
        let mut worst = T::zero();
        for id in 0..self.zeros.len() {
            let plus = self.sorted_angles(id, ArcKind::Plus);
            for b in self.sorted_angles(id, ArcKind::Minus) {
                let mut best = T::infinity();
                for (i, a) in plus.iter().enumerate() {
                    let next = if i + 1 < plus.len() {
                        plus[i + 1]
                    } else {
                        plus[0] + T::two_pi()
                    };
                    let bisector = (*a + next) * T::lit(0.5);
                    let d = crate::scalar::wrap_angle(b - bisector).abs();
                    best = best.min(d);
                }
                worst = worst.max(best);
            }
        }
        worst
    }

    pub fn max_relative_drift(&self) -> T {
        self.arcs
            .iter()
            .map(|a| a.trajectory.relative_drift())
            .fold(T::zero(), T::max)
    }

    /// Arc counts, departure spacing, bisection and drift.
    pub fn check_invariants(&self) -> Result<()> {
        for (id, zero) in self.zeros.iter().enumerate() {
            for kind in [ArcKind::Plus, ArcKind::Minus] {
                let n = self.arcs_from(id, kind).count();
                if n != zero.order + 2 {
                    return Err(Error::InvalidArgument(format!(
                        "zero {id} has {n} {kind} arcs, expected {}",
                        zero.order + 2
                    )));
                }
            }
        }
        let tol = T::lit(1e-3);
        if self.angle_defect() > tol || self.bisector_defect() > tol {
            return Err(Error::InvalidArgument("departure directions are not equiangular".into()));
        }
        if self.max_relative_drift() > T::lit(1e-8) {
            return Err(Error::InvalidArgument(format!(
                "arc drift {:e} exceeds bound",
                self.max_relative_drift().to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }
}

/// Finds the zeros of `φ′` in the region and traces every arc from each of
/// them. Arcs are traced in parallel; their order is deterministic (by zero,
/// then plus before minus, then departure index).
pub fn stokes_graph<T: Real, R: Region<T> + ?Sized>(
    dphi: &RationalFunction<T>,
    region: &R,
    opts: &TraceOptions<T>,
) -> Result<StokesGraph<T>> {
    let zeros = find_zeros_in(dphi, region)?;
    let mut jobs = Vec::new();
    for (id, zero) in zeros.iter().enumerate() {
        let a = leading_coefficient(dphi, zero)?;
        for kind in [ArcKind::Plus, ArcKind::Minus] {
            for theta in departure_angles(a, zero.order, kind) {
                jobs.push((id, kind, theta));
            }
        }
    }
    let tracer = Tracer::new(dphi, region, &zeros, *opts);
    let arcs = jobs
        .par_iter()
        .map(|&(id, kind, theta)| trace_from_zero(&tracer, id, kind, theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(StokesGraph { zeros, arcs })
}

fn trace_from_zero<T: Real, R: Region<T> + ?Sized>(
    tracer: &Tracer<'_, T, R>,
    id: usize,
    kind: ArcKind,
    theta0: T,
) -> Result<StokesArc<T>> {
    let zero = tracer.zeros[id];
    let z0 = zero.location;
    let others = tracer
        .singular
        .iter()
        .filter(|p| (**p - z0).norm() > T::zero())
        .map(|p| (*p - z0).norm())
        .fold(T::infinity(), T::min);
    let delta = (T::lit(1e-4) * tracer.scale).min(T::lit(0.1) * others);
    let a = leading_coefficient(tracer.dphi, &zero)?;
    let half_m = T::from_usize_(zero.order) * T::lit(0.5);

    // Root at z0 + δe^{iθ} continued from the leading term, oriented so the
    // flow leaves the zero.
    let start_root = |theta: T| -> Result<(Complex<T>, Complex<T>)> {
        let z = z0 + Complex::from_polar(delta, theta);
        let model = a.sqrt() * Complex::from_polar(delta.powf(half_m), half_m * theta);
        let s = tracer.dphi.eval(z)?.sqrt();
        let mut r = if (s * model.conj()).re >= T::zero() { s } else { -s };
        if (kind.direction(r) * Complex::from_polar(T::one(), -theta)).re < T::zero() {
            r = -r;
        }
        Ok((z, r))
    };
    // Refine θ so the start point lies on the arc: the conserved component
    // of ∫√φ′ from the zero vanishes.
    let g = |theta: T| -> Result<T> {
        let (z, r) = start_root(theta)?;
        Ok(kind.drift_part(ray_integral(tracer.dphi, z0, z, r, zero.order)?))
    };
    let mut t0 = theta0;
    let mut t1 = theta0 + T::lit(1e-3);
    let mut g0 = g(t0)?;
    let mut g1 = g(t1)?;
    for _ in 0..30 {
        if g1 == g0 {
            break;
        }
        let t2 = t1 - g1 * (t1 - t0) / (g1 - g0);
        t0 = t1;
        g0 = g1;
        t1 = t2;
        g1 = g(t1)?;
        if (t1 - t0).abs() < T::lit(1e-15) {
            break;
        }
    }
    let theta = if (t1 - theta0).abs() < T::lit(0.1) { t1 } else { theta0 };
    let (start, root) = start_root(theta)?;
    let trajectory = tracer.trace(kind, start, root, Some((id, z0)))?;
    Ok(StokesArc {
        kind,
        zero: id,
        departure_angle: theta,
        trajectory,
    })
}

/// Topology summary of the traced trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub closed_count: usize,
    pub boundary_ending_count: usize,
    /// Trajectories that reached the length limit.
    pub indeterminate: usize,
    /// No plus trajectory ends on the boundary and none is indeterminate.
    /// Numerical evidence only.
    pub maximal: bool,
}

/// Deterministic seed points on a `k × k` grid of the bounding box that lie
/// inside the region and away from the zeros.
pub fn seed_points<T: Real, R: Region<T> + ?Sized>(region: &R, zeros: &[ZeroOfPhiPrime<T>], k: usize) -> Vec<Complex<T>> {
    let b = region.bounding_box();
    let scale = region.scale();
    let mut seeds = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let fx = (T::from_usize_(i) + T::lit(0.5)) / T::from_usize_(k);
            let fy = (T::from_usize_(j) + T::lit(0.5)) / T::from_usize_(k);
            let z = Complex::new(b.lo.re + b.width() * fx, b.lo.im + b.height() * fy);
            if region.inside(z) == Some(true)
                && zeros.iter().all(|q| (q.location - z).norm() > T::lit(1e-2) * scale)
            {
                seeds.push(z);
            }
        }
    }
    seeds
}

/// Classifies the plus arcs of `graph` together with plus trajectories
/// traced through `seeds`.
pub fn classify<T: Real, R: Region<T> + ?Sized>(
    graph: &StokesGraph<T>,
    dphi: &RationalFunction<T>,
    region: &R,
    seeds: &[Complex<T>],
    opts: &TraceOptions<T>,
) -> Result<(Classification, Vec<Trajectory<T>>)> {
    let tracer = Tracer::new(dphi, region, &graph.zeros, *opts);
    let sampled = seeds
        .par_iter()
        .map(|z| {
            let w = dphi.eval(*z)?;
            tracer.trace(ArcKind::Plus, *z, w.sqrt(), None)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = Classification {
        closed_count: 0,
        boundary_ending_count: 0,
        indeterminate: 0,
        maximal: false,
    };
    let plus_arcs = graph
        .arcs
        .iter()
        .filter(|a| a.kind == ArcKind::Plus)
        .map(|a| &a.trajectory);
    let mut traced = 0;
    for t in plus_arcs.chain(sampled.iter()) {
        traced += 1;
        match t.end {
            Termination::Closed { .. } => c.closed_count += 1,
            Termination::Boundary(_) => c.boundary_ending_count += 1,
            Termination::MaxLength => c.indeterminate += 1,
            Termination::Zero(_) => {}
        }
    }
    c.maximal = traced > 0 && c.boundary_ending_count == 0 && c.indeterminate == 0;
    Ok((c, sampled))
}

/// `max_t |φ′(γ_k)τ² − (1 + λα_kκ)|` for each component.
pub fn boundary_metric_check<T: Real>(domain: &Domain<T>, phi: &RationalFunction<T>, lambda: T) -> Result<Vec<T>> {
    let dphi = phi.derivative();
    let mut out = Vec::with_capacity(domain.n_components());
    for (k, contour) in domain.components().enumerate() {
        let alpha = domain.alpha(k);
        let mut worst = T::zero();
        for t in contour.grid() {
            let tau = contour.tangent(t)?;
            let kappa = contour.curvature(t)?;
            let lhs = dphi.eval(contour.eval(t))? * tau * tau;
            worst = worst.max((lhs - cr(T::one() + lambda * alpha * kappa)).norm());
        }
        out.push(worst);
    }
    Ok(out)
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

    fn annulus(r1: f64, r2: f64) -> Domain<f64> {
        Domain::new(
            Contour::circle(cx(0.0, 0.0), r1).unwrap(),
            vec![Contour::circle(cx(0.0, 0.0), r2).unwrap()],
            None,
        )
        .unwrap()
    }

    fn minus_two_over_z2() -> RationalFunction<f64> {
        RationalFunction::zero().with_pole(cx(0.0, 0.0), vec![cx(0.0, 0.0), cx(-2.0, 0.0)])
    }

    #[test]
    fn zeros_of_z2_minus_1() {
        let r = Rect::square(cx(0.0, 0.0), 2.0).unwrap();
        let z = find_zeros(&poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &r).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0].location - cx(-1.0, 0.0)).norm() < 1e-12 && z[0].order == 1);
        assert!((z[1].location - cx(1.0, 0.0)).norm() < 1e-12 && z[1].order == 1);
    }

    #[test]
    fn triple_zero_of_z3() {
        let r = Rect::square(cx(0.0, 0.0), 1.0).unwrap();
        let z = find_zeros(&poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &r).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].order, 3);
        assert!(z[0].location.norm() < 1e-10);
    }

    #[test]
    fn annulus_quadratic_differential_has_no_zeros() {
        let d = annulus(2.0, 1.0);
        assert!(find_zeros_in(&minus_two_over_z2(), &d).unwrap().is_empty());
        let bbox = d.bounding_box();
        assert_eq!(argument_principle_count(&minus_two_over_z2(), &bbox).unwrap(), 0);
    }

    #[test]
    fn sqrt_examples() {
        let path: Vec<_> = (0..=64).map(|k| Complex::from_polar(1.0, 2.0 * PI * k as f64 / 64.0)).collect();
        let one = sqrt_tracked(&poly(&[(1.0, 0.0)]), &path, 1.0).unwrap();
        assert!(one.iter().all(|r| (*r - cx(1.0, 0.0)).norm() < 1e-15));
        let z = sqrt_tracked(&poly(&[(0.0, 0.0), (1.0, 0.0)]), &path, 1.0).unwrap();
        assert!((z[64] - cx(-1.0, 0.0)).norm() < 1e-12);
        let z2 = sqrt_tracked(&poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &path, 1.0).unwrap();
        assert!((z2[64] - z2[0]).norm() < 1e-12);
        // Coarse path: the per-step turn exceeds π/2 and is subdivided.
        let coarse: Vec<_> = (0..=3).map(|k| Complex::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)).collect();
        let c = sqrt_tracked(&poly(&[(0.0, 0.0), (1.0, 0.0)]), &coarse, 1.0).unwrap();
        assert!((c[3] - cx(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn annulus_trajectory_is_a_closed_circle() {
        let d = annulus(2.0, 1.0);
        let t = trace_trajectory(&minus_two_over_z2(), &d, &[], cx(1.5, 0.0), ArcKind::Plus, None, &TraceOptions::default()).unwrap();
        match t.end {
            Termination::Closed { gap } => assert!(gap < 1e-6),
            e => panic!("unexpected end {e:?}"),
        }
        let radius_var = t.points.iter().map(|p| (p.norm() - 1.5).abs()).fold(0.0, f64::max);
        assert!(radius_var < 1e-8, "{radius_var}");
        assert!((t.length - 3.0 * PI).abs() < 1e-6);
        assert!(t.relative_drift() < 1e-8);
    }

    #[test]
    fn constant_differential_gives_horizontal_chords() {
        let disk = Disk { center: cx(0.0, 0.0), radius: 1.0 };
        let t = trace_trajectory(&poly(&[(1.0, 0.0)]), &disk, &[], cx(0.0, 0.3), ArcKind::Plus, None, &TraceOptions::default()).unwrap();
        assert!(t.points.iter().all(|p| (p.im - 0.3).abs() < 1e-12));
        match t.end {
            Termination::Boundary(p) => assert!((p - cx((1.0f64 - 0.09).sqrt(), 0.3)).norm() < 1e-7),
            e => panic!("unexpected end {e:?}"),
        }
    }

    #[test]
    fn airy_graph_has_three_equiangular_arcs() {
        let disk = Disk { center: cx(0.0, 0.0), radius: 1.0 };
        let dphi = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        let g = stokes_graph(&dphi, &disk, &TraceOptions::default()).unwrap();
        assert_eq!(g.zeros.len(), 1);
        assert_eq!(g.arcs_from(0, ArcKind::Plus).count(), 3);
        assert!(g.angle_defect() < 1e-3);
        assert!(g.bisector_defect() < 1e-3);
        g.check_invariants().unwrap();
        let (c, _) = classify(&g, &dphi, &disk, &[], &TraceOptions::default()).unwrap();
        assert_eq!(c.boundary_ending_count, 3);
        assert!(!c.maximal);
    }

    #[test]
    fn quintic_structure_of_z_cubed() {
        let disk = Disk { center: cx(0.0, 0.0), radius: 1.0 };
        let g = stokes_graph(&poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &disk, &TraceOptions::default()).unwrap();
        assert_eq!(g.arcs_from(0, ArcKind::Plus).count(), 5);
        g.check_invariants().unwrap();
    }

    #[test]
    fn two_zero_graph_endpoints() {
        let r = Rect::square(cx(0.0, 0.0), 2.0).unwrap();
        let dphi = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let g = stokes_graph(&dphi, &r, &TraceOptions::default()).unwrap();
        assert_eq!(g.zeros.len(), 2);
        g.check_invariants().unwrap();
        for a in &g.arcs {
            assert!(matches!(a.trajectory.end, Termination::Boundary(_) | Termination::Zero(_)));
        }
        // The segment between the zeros is an arc of one family.
        let joined = g
            .arcs
            .iter()
            .filter(|a| a.zero == 0 && a.trajectory.end == Termination::Zero(1))
            .count();
        assert_eq!(joined, 1);
    }

    #[test]
    fn annulus_classification_is_maximal() {
        let d = annulus(2.0, 1.0);
        let dphi = minus_two_over_z2();
        let opts = TraceOptions::default();
        let g = stokes_graph(&dphi, &d, &opts).unwrap();
        assert!(g.arcs.is_empty());
        let seeds = seed_points(&d, &g.zeros, 6);
        assert!(!seeds.is_empty());
        let (c, _) = classify(&g, &dphi, &d, &seeds, &opts).unwrap();
        assert_eq!(c.boundary_ending_count, 0);
        assert_eq!(c.closed_count, seeds.len());
        assert!(c.maximal);
    }

    #[test]
    fn constant_on_disk_is_not_maximal() {
        let disk = Disk { center: cx(0.0, 0.0), radius: 1.0 };
        let dphi = poly(&[(1.0, 0.0)]);
        let opts = TraceOptions::default();
        let g = stokes_graph(&dphi, &disk, &opts).unwrap();
        let seeds = seed_points(&disk, &g.zeros, 4);
        let (c, _) = classify(&g, &dphi, &disk, &seeds, &opts).unwrap();
        assert_eq!(c.boundary_ending_count, seeds.len());
        assert!(!c.maximal);
    }

    #[test]
    fn metric_identity_examples() {
        let d = annulus(2.0, 1.0);
        let phi = RationalFunction::zero().with_pole(cx(0.0, 0.0), vec![cx(2.0, 0.0)]);
        let r = boundary_metric_check(&d, &phi, 1.0).unwrap();
        assert!(r[0] < 1e-10 && r[1] < 1e-10);
        let r = boundary_metric_check(&d, &RationalFunction::zero(), 0.0).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }
}
