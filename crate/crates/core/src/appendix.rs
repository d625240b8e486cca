//! Concentric-annulus oracle and the identities that force an extremal
//! doubly-connected domain to be a concentric annulus.
//!
//! The boundary correspondence `μ = h⁻¹((R1/R2) h)` built from a conformal
//! map `h` onto a round annulus is a Möbius map. Curvature and polar data of
//! the two boundary curves are compared pointwise along it.

use std::fmt;

use num_complex::Complex;

use crate::analytic::{schwarzian, ComplexMap, MobiusMap, RationalFunction};
use crate::error::{Error, Result};
use crate::extremal::{boundary_residual, riccati_residual};
use crate::geometry::{geometric_summary, Contour, Domain};
use crate::quadrature::periodic_derivatives;
use crate::scalar::{cr, periodic_grid, wrap_angle, Real};

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_radii<T: Real>(r1: T, r2: T) -> Result<()> {
    if !(r2 > T::zero() && r1 > r2 && r1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "annulus radii must satisfy R1 > R2 > 0, got R1 = {r1}, R2 = {r2}"
        )));
    }
    if (r1 - r2) / r1 < T::lit(1e-8) {
        return Err(Error::Degenerate {
            lambda: f64_of(r1 - r2),
            diameter: f64_of(r1 + r1),
        });
    }
    Ok(())
}

/// `{R2 < |z| < R1}` with both circles centred at the origin.
pub fn annulus_domain<T: Real>(r1: T, r2: T) -> Result<Domain<T>> {
    check_radii(r1, r2)?;
    let origin = cr(T::zero());
    Domain::new(
        Contour::circle(origin, r1)?,
        vec![Contour::circle(origin, r2)?],
        Some(vec![origin]),
    )
}

/// Closed-form extremal data of the concentric annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusOracle<T> {
    pub r1: T,
    pub r2: T,
    /// `R1 − R2`.
    pub lambda: T,
    /// `R1 R2 / z`.
    pub phi: RationalFunction<T>,
    /// `−R1 R2 / z²`.
    pub dphi: RationalFunction<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResiduals<T> {
    pub boundary: T,
    pub riccati: T,
    /// `|2A/P − λ|`.
    pub lambda_formula: T,
}

pub fn annulus_oracle<T: Real>(r1: T, r2: T) -> Result<AnnulusOracle<T>> {
    check_radii(r1, r2)?;
    let origin = cr(T::zero());
    let phi = RationalFunction::zero().with_pole(origin, vec![cr(r1 * r2)]);
    let dphi = phi.derivative();
    Ok(AnnulusOracle {
        r1,
        r2,
        lambda: r1 - r2,
        phi,
        dphi,
    })
}

impl<T: Real> AnnulusOracle<T> {
    pub fn domain(&self) -> Result<Domain<T>> {
        annulus_domain(self.r1, self.r2)
    }

    /// `(z/R1)^{R1/λ}`, unimodular on the outer circle.
    pub fn v1(&self, z: Complex<T>) -> Complex<T> {
        (z / self.r1).powf(self.r1 / self.lambda)
    }

    /// `(z/R2)^{−R2/λ}`, unimodular on the inner circle.
    pub fn v2(&self, z: Complex<T>) -> Complex<T> {
        (z / self.r2).powf(-self.r2 / self.lambda)
    }

    /// Maxima of `|boundary_residual|` and `|riccati_residual|` over both
    /// circles sampled at `samples` points, and the `λ = 2A/P` defect.
    pub fn residuals(&self, samples: usize) -> Result<OracleResiduals<T>> {
        let domain = self.domain()?;
        let mut boundary = T::zero();
        let mut riccati = T::zero();
        for k in 0..2 {
            for t in periodic_grid::<T>(samples) {
                boundary = boundary.max(boundary_residual(&domain, &self.phi, self.lambda, k, t)?.norm());
                riccati = riccati.max(riccati_residual(&domain, &self.dphi, self.lambda, k, t)?.norm());
            }
        }
        let summary = geometric_summary(&domain)?;
        Ok(OracleResiduals {
            boundary,
            riccati,
            lambda_formula: (summary.lambda_min - self.lambda).abs(),
        })
    }
}

/// Conformal map `h` of a doubly-connected domain onto a round annulus
/// `R2 < |w| < R1`, with its derivative and inverse.
pub trait ConformalMap<T: Real>: Sync {
    fn h(&self, z: Complex<T>) -> Complex<T>;
    fn h_prime(&self, z: Complex<T>) -> Complex<T>;
    fn h_inv(&self, w: Complex<T>) -> Complex<T>;
}

impl<T: Real, H: ConformalMap<T> + ?Sized> ConformalMap<T> for &H {
    fn h(&self, z: Complex<T>) -> Complex<T> {
        (**self).h(z)
    }
    fn h_prime(&self, z: Complex<T>) -> Complex<T> {
        (**self).h_prime(z)
    }
    fn h_inv(&self, w: Complex<T>) -> Complex<T> {
        (**self).h_inv(w)
    }
}

/// Möbius conformal maps; the identity covers concentric annuli and the
/// general case produces eccentric annuli for synthetic tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusConformal<T> {
    forward: MobiusMap<T>,
    backward: MobiusMap<T>,
}

impl<T: Real> MobiusConformal<T> {
    pub fn new(forward: MobiusMap<T>) -> Result<Self> {
        Ok(Self {
            forward,
            backward: forward.inverse()?,
        })
    }

    pub fn identity() -> Self {
        Self {
            forward: MobiusMap::identity(),
            backward: MobiusMap::identity(),
        }
    }

    pub fn forward(&self) -> &MobiusMap<T> {
        &self.forward
    }

    /// The correspondence `h⁻¹ ∘ (R1/R2) ∘ h` as a single Möbius map.
    pub fn correspondence(&self, r1: T, r2: T) -> Result<MobiusMap<T>> {
        let scale = MobiusMap::affine(cr(r1 / r2), cr(T::zero()))?;
        self.backward.compose(&scale.compose(&self.forward)?)
    }

    /// Preimage of the round annulus `R2 < |w| < R1`. The point sent to
    /// infinity by `h⁻¹` must lie outside `|w| ≤ R1`.
    pub fn annulus_preimage(&self, r1: T, r2: T) -> Result<Domain<T>> {
        check_radii(r1, r2)?;
        if let Some(w_pole) = self.backward.pole() {
            if w_pole.norm() <= r1 * T::lit(1.0 + 1e-9) {
                return Err(Error::InvalidArgument(
                    "inverse map has a pole inside the target annulus disk".into(),
                ));
            }
        }
        let image_circle = |r: T| -> Result<Contour<T>> {
            let pts: Vec<Complex<T>> = [0.0, 2.0, 4.0]
                .iter()
                .map(|&a| self.backward.apply(Complex::from_polar(r, T::lit(a))))
                .collect::<Result<_>>()?;
            let (center, radius) = circumcircle(pts[0], pts[1], pts[2])?;
            Contour::circle(center, radius)
        };
        Domain::new(image_circle(r1)?, vec![image_circle(r2)?], None)
    }
}

fn circumcircle<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Result<(Complex<T>, T)> {
    let (ab, ac) = (b - a, c - a);
    let d = (ab.conj() * ac).im * T::lit(2.0);
    if d.abs() <= T::epsilon() * ab.norm_sqr().max(ac.norm_sqr()) {
        return Err(Error::InvalidArgument("collinear points have no circumcircle".into()));
    }
    // Solve |o − a|² = |o − b|² = |o − c|² for o − a.
    let ox = (ac.im * ab.norm_sqr() - ab.im * ac.norm_sqr()) / d;
    let oy = (ab.re * ac.norm_sqr() - ac.re * ab.norm_sqr()) / d;
    let o = Complex::new(ox, oy);
    Ok((a + o, o.norm()))
}

impl<T: Real> ConformalMap<T> for MobiusConformal<T> {
    fn h(&self, z: Complex<T>) -> Complex<T> {
        self.forward.at(z)
    }
    fn h_prime(&self, z: Complex<T>) -> Complex<T> {
        self.forward.derivatives(z).0
    }
    fn h_inv(&self, w: Complex<T>) -> Complex<T> {
        self.backward.at(w)
    }
}

/// `φ′(z) = C (h′(z)/h(z))²` for a conformal map onto a round annulus.
#[derive(Debug, Clone, Copy)]
pub struct MapQuadDiff<H, T> {
    pub map: H,
    pub c: Complex<T>,
}

pub fn quaddiff_from_map<T: Real, H: ConformalMap<T>>(map: H, c: Complex<T>) -> MapQuadDiff<H, T> {
    MapQuadDiff { map, c }
}

impl<T: Real, H: ConformalMap<T>> MapQuadDiff<H, T> {
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let dh = self.map.h_prime(z);
        if dh.norm() == T::zero() || !dh.norm().is_finite() {
            return Err(Error::VanishingDerivative(f64_of(dh.norm())));
        }
        if self.c.norm() == T::zero() {
            return Ok(cr(T::zero()));
        }
        let log_derivative = dh / self.map.h(z);
        Ok(self.c * log_derivative * log_derivative)
    }
}

impl<T: Real, H: ConformalMap<T>> ComplexMap<T> for MapQuadDiff<H, T> {
    fn at(&self, z: Complex<T>) -> Complex<T> {
        self.eval(z)
            .unwrap_or_else(|_| Complex::new(T::nan(), T::nan()))
    }
}

/// A boundary correspondence with its complex derivative.
pub trait Correspondence<T: Real>: Sync {
    fn image(&self, z: Complex<T>) -> Complex<T>;
    fn derivative(&self, z: Complex<T>) -> Complex<T>;
}

impl<T: Real> Correspondence<T> for MobiusMap<T> {
    fn image(&self, z: Complex<T>) -> Complex<T> {
        self.at(z)
    }
    fn derivative(&self, z: Complex<T>) -> Complex<T> {
        self.derivatives(z).0
    }
}

/// `μ(z) = h⁻¹((R1/R2) h(z))`, carrying the inner boundary onto the outer.
#[derive(Debug, Clone, Copy)]
pub struct MuMap<H, T> {
    pub map: H,
    pub r1: T,
    pub r2: T,
}

impl<T: Real, H: ConformalMap<T>> MuMap<H, T> {
    pub fn new(map: H, r1: T, r2: T) -> Result<Self> {
        check_radii(r1, r2)?;
        Ok(Self { map, r1, r2 })
    }

    fn on_circle(&self, z: Complex<T>, r: T) -> Result<Complex<T>> {
        let w = self.map.h(z);
        if (w.norm() - r).abs() > T::lit(1e-8) * r {
            return Err(Error::InvalidArgument(format!(
                "|h(z)| = {} is not on the circle of radius {r}",
                w.norm()
            )));
        }
        Ok(w)
    }

    /// Image of a point of the inner boundary (`|h(z)| = R2`).
    pub fn apply(&self, z: Complex<T>) -> Result<Complex<T>> {
        let w = self.on_circle(z, self.r2)?;
        Ok(self.map.h_inv(w * (self.r1 / self.r2)))
    }

    /// Preimage of a point of the outer boundary (`|h(z)| = R1`).
    pub fn inverse_apply(&self, z: Complex<T>) -> Result<Complex<T>> {
        let w = self.on_circle(z, self.r1)?;
        Ok(self.map.h_inv(w * (self.r2 / self.r1)))
    }
}

impl<T: Real, H: ConformalMap<T>> Correspondence<T> for MuMap<H, T> {
    fn image(&self, z: Complex<T>) -> Complex<T> {
        self.map.h_inv(self.map.h(z) * (self.r1 / self.r2))
    }
    fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let z1 = self.image(z);
        self.map.h_prime(z) / self.map.h_prime(z1) * (self.r1 / self.r2)
    }
}

impl<T: Real, H: ConformalMap<T>> ComplexMap<T> for MuMap<H, T> {
    fn at(&self, z: Complex<T>) -> Complex<T> {
        self.image(z)
    }
}

pub fn mu_map<T: Real, H: ConformalMap<T>>(map: H, r1: T, r2: T, z: Complex<T>) -> Result<Complex<T>> {
    MuMap::new(map, r1, r2)?.apply(z)
}

/// `μ` sampled on the inner boundary together with the square-root relation
/// between `μ′` and `φ′`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuSamples<T> {
    pub inner: Vec<Complex<T>>,
    pub outer: Vec<Complex<T>>,
    pub derivative: Vec<Complex<T>>,
    /// `√(φ′(z₂)/φ′(z₁))` continued along the samples.
    pub root_ratio: Vec<Complex<T>>,
    /// `max |μ′ − √(φ′(z₂)/φ′(z₁))| / |μ′|`.
    pub root_residual: T,
    /// `max |S(μ)|` at the samples.
    pub schwarzian: T,
}

/// Samples `μ` at the given inner-boundary points (taken in boundary order)
/// and checks `μ′(z₂) = √(φ′(z₂)/φ′(z₁))` with the root continued from
/// sample to sample. A continued root that lands on `−μ′` is a branch
/// failure. `schwarzian_radius` sets the Cauchy circle used for `S(μ)`.
pub fn mu_samples<T: Real, H: ConformalMap<T>>(
    mu: &MuMap<H, T>,
    c: Complex<T>,
    inner: &[Complex<T>],
    schwarzian_radius: T,
) -> Result<MuSamples<T>> {
    let dphi = quaddiff_from_map(&mu.map, c);
    let mut outer = Vec::with_capacity(inner.len());
    let mut derivative = Vec::with_capacity(inner.len());
    let mut root_ratio: Vec<Complex<T>> = Vec::with_capacity(inner.len());
    let mut root_residual = T::zero();
    let mut max_schwarzian = T::zero();
    for &z2 in inner {
        let z1 = mu.apply(z2)?;
        let dmu = mu.derivative(z2);
        let ratio = dphi.eval(z2)? / dphi.eval(z1)?;
        let mut root = ratio.sqrt();
        let reference = root_ratio.last().copied().unwrap_or(dmu);
        if (root - reference).norm() > (root + reference).norm() {
            root = -root;
        }
        let gap = (root - dmu).norm() / dmu.norm();
        if (root + dmu).norm() / dmu.norm() < gap && gap > T::lit(1e-8) {
            return Err(Error::BranchFailure {
                re: f64_of(z2.re),
                im: f64_of(z2.im),
            });
        }
        root_residual = root_residual.max(gap);
        max_schwarzian = max_schwarzian.max(schwarzian(mu, z2, schwarzian_radius)?.norm());
        outer.push(z1);
        derivative.push(dmu);
        root_ratio.push(root);
    }
    Ok(MuSamples {
        inner: inner.to_vec(),
        outer,
        derivative,
        root_ratio,
        root_residual,
        schwarzian: max_schwarzian,
    })
}

/// `max |φ′(z₂) − φ′(μ(z₂)) μ′(z₂)²|` over the samples.
pub fn invariance_check<T, G, M>(dphi: &G, mu: &M, inner: &[Complex<T>]) -> T
where
    T: Real,
    G: ComplexMap<T> + ?Sized,
    M: Correspondence<T> + ?Sized,
{
    inner
        .iter()
        .map(|&z| {
            let d = mu.derivative(z);
            (dphi.at(z) - dphi.at(mu.image(z)) * d * d).norm()
        })
        .fold(T::zero(), T::max)
}

/// Polar centres `(image, source)` of a Möbius correspondence: `(a, c)` for
/// `a + b/(z − c)`, the fixed point for an affine map.
pub fn polar_centers<T: Real>(mu: &MobiusMap<T>) -> Result<(Complex<T>, Complex<T>)> {
    match *mu {
        MobiusMap::General { a, c, .. } => Ok((a, c)),
        MobiusMap::Affine { p, q } => {
            let one = cr(T::one());
            if (p - one).norm() <= T::epsilon() * T::lit(16.0) {
                return Err(Error::InvalidArgument("translation has no polar centre".into()));
            }
            let fixed = q / (one - p);
            Ok((fixed, fixed))
        }
    }
}

/// Dimensionless residuals of the curvature identities along `μ`, with the
/// pointwise ratio `K = (1 − λκ₁) r₁/r₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePairResiduals<T> {
    /// `(1 − λκ₁)(ds₁/ds₂)² = 1 + λκ₂`.
    pub metric_pairing: T,
    /// `dκ₁/ds₂ = dκ₂/ds₁`, scaled by the squared diameter.
    pub curvature_exchange: T,
    /// Mean of the pointwise `K`.
    pub ratio_constant: T,
    /// `max |K − mean K|`.
    pub ratio_spread: T,
    /// `r₁/r₂ = ds₁/ds₂`, relative.
    pub radius_speed: T,
    /// `2πλ = L₁ − K L₂`, relative to `L₁`.
    pub outer_length_balance: T,
    /// `K L₁ = L₂ + 2πλ`, relative to `L₁`.
    pub inner_length_balance: T,
    /// `(1 − λκ₁) r₁ = r₂` and `(1 + λκ₂) r₂ = r₁`, relative.
    pub radius_transfer: T,
    /// `κ₂ r₂ = κ₁ r₁`.
    pub curvature_radius_balance: T,
    /// Largest distance from `μ(z₂)` to the outer contour over the diameter.
    pub correspondence_gap: T,
}

/// Evaluates the curvature identities on a doubly-connected domain along the
/// Möbius correspondence `μ` from the inner to the outer component. Polar
/// radii are measured from the centres given by [`polar_centers`].
pub fn curvature_pair_checks<T: Real>(
    domain: &Domain<T>,
    mu: &MobiusMap<T>,
    lambda: T,
) -> Result<CurvaturePairResiduals<T>> {
    if domain.n_components() != 2 {
        return Err(Error::InvalidDomain(format!(
            "curvature pair checks need 2 boundary components, got {}",
            domain.n_components()
        )));
    }
    let (center1, center2) = polar_centers(mu)?;
    let outer = domain.component(0);
    let inner = domain.component(1);
    let diameter = domain.diameter();
    let (l1, l2) = (outer.length(), inner.length());

    let mut ks = Vec::with_capacity(inner.samples());
    let mut res = CurvaturePairResiduals {
        metric_pairing: T::zero(),
        curvature_exchange: T::zero(),
        ratio_constant: T::zero(),
        ratio_spread: T::zero(),
        radius_speed: T::zero(),
        outer_length_balance: T::zero(),
        inner_length_balance: T::zero(),
        radius_transfer: T::zero(),
        curvature_radius_balance: T::zero(),
        correspondence_gap: T::zero(),
    };
    for t2 in inner.grid() {
        let z2 = inner.eval(t2);
        let z1 = mu.apply(z2)?;
        let (gap, t1) = outer.distance(z1);
        let speed_ratio = mu.derivatives(z2).0.norm();
        let k1 = outer.curvature(t1)?;
        let k2 = inner.curvature(t2)?;
        let dk1 = outer.curvature_derivative(t1)?;
        let dk2 = inner.curvature_derivative(t2)?;
        let r1 = (z1 - center1).norm();
        let r2 = (z2 - center2).norm();

        let lhs = (T::one() - lambda * k1) * speed_ratio * speed_ratio;
        let rhs = T::one() + lambda * k2;
        let exchange = (dk1 * speed_ratio - dk2 / speed_ratio).abs() * diameter * diameter;
        let transfer = ((T::one() - lambda * k1) * r1 - r2).abs() / r2;
        let transfer_back = ((T::one() + lambda * k2) * r2 - r1).abs() / r1;

        res.metric_pairing = res.metric_pairing.max((lhs - rhs).abs());
        res.curvature_exchange = res.curvature_exchange.max(exchange);
        res.radius_speed = res.radius_speed.max((r1 / r2 - speed_ratio).abs() / speed_ratio);
        res.radius_transfer = res.radius_transfer.max(transfer.max(transfer_back));
        res.curvature_radius_balance = res.curvature_radius_balance.max((k2 * r2 - k1 * r1).abs());
        res.correspondence_gap = res.correspondence_gap.max(gap / diameter);
        ks.push((T::one() - lambda * k1) * r1 / r2);
    }
    let k_mean = ks.iter().fold(T::zero(), |a, &k| a + k) / T::from_usize_(ks.len());
    res.ratio_constant = k_mean;
    res.ratio_spread = ks.iter().map(|&k| (k - k_mean).abs()).fold(T::zero(), T::max);
    let two_pi_lambda = T::two_pi() * lambda;
    res.outer_length_balance = (two_pi_lambda - (l1 - k_mean * l2)).abs() / l1;
    res.inner_length_balance = (k_mean * l1 - l2 - two_pi_lambda).abs() / l1;
    Ok(res)
}

impl<T: Real> CurvaturePairResiduals<T> {
    /// Identity checks at tolerance `tol`; `K` is compared with 1.
    pub fn checks(&self, tol: T) -> Vec<IdentityCheck<T>> {
        vec![
            IdentityCheck::new("metric-pairing", self.metric_pairing, tol),
            IdentityCheck::new("curvature-derivative-exchange", self.curvature_exchange, tol),
            IdentityCheck::new("ratio-constancy", self.ratio_spread, tol),
            IdentityCheck::new("ratio-equals-one", (self.ratio_constant - T::one()).abs(), tol),
            IdentityCheck::new("radius-speed-ratio", self.radius_speed, tol),
            IdentityCheck::new("outer-length-balance", self.outer_length_balance, tol),
            IdentityCheck::new("inner-length-balance", self.inner_length_balance, tol),
            IdentityCheck::new("radius-transfer", self.radius_transfer, tol),
            IdentityCheck::new("curvature-radius-balance", self.curvature_radius_balance, tol),
            IdentityCheck::new("correspondence-on-boundary", self.correspondence_gap, tol),
        ]
    }
}

/// Curvature of the polar curve `r(φ)` sampled on the uniform grid over
/// `[0, 2π)`, `κ = (r² + 2r′² − r r″)/(r² + r′²)^{3/2}`, with spectral
/// derivatives.
pub fn polar_curvature<T: Real>(r: &[T]) -> Result<Vec<T>> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("no polar samples".into()));
    }
    let scale = r.iter().copied().fold(T::zero(), T::max);
    if r.iter().any(|&x| !(x > T::lit(1e-12) * scale)) {
        return Err(Error::InvalidArgument("polar radius vanishes".into()));
    }
    let (d1, d2) = periodic_derivatives(r);
    Ok(r.iter()
        .zip(d1.iter().zip(&d2))
        .map(|(&r, (&r1, &r2))| {
            let q = r * r + r1 * r1;
            (q + r1 * r1 - r * r2) / (q * q.sqrt())
        })
        .collect())
}

/// Polar data of a curve point relative to a centre, from `w = z − centre`
/// and its parameter derivatives through `L = w′/w = (log r)′ + iφ′`.
#[derive(Debug, Clone, Copy)]
struct PolarPoint<T> {
    w: Complex<T>,
    l: Complex<T>,
    dl: Complex<T>,
}

impl<T: Real> PolarPoint<T> {
    fn new(w: Complex<T>, dw: Complex<T>, d2w: Complex<T>) -> Self {
        let l = dw / w;
        Self {
            w,
            l,
            dl: d2w / w - l * l,
        }
    }

    fn r(&self) -> T {
        self.w.norm()
    }

    fn phi_sign(&self) -> T {
        if self.l.im < T::zero() {
            -T::one()
        } else {
            T::one()
        }
    }

    /// `κ r` for the curve oriented by its own parameter.
    fn curvature_times_radius(&self) -> T {
        let (x, y, dx, dy) = (self.l.re, self.l.im, self.dl.re, self.dl.im);
        let m = self.l.norm();
        (m * m * y - dx * y + x * dy) / (m * m * m)
    }

    /// `κ r` from the polar formula, for the curve oriented by increasing
    /// polar angle.
    fn polar_curvature_times_radius(&self) -> T {
        let (x, y, dx, dy) = (self.l.re, self.l.im, self.dl.re, self.dl.im);
        let rho = x / y;
        let rho_prime = (dx * y - x * dy) / (y * y * y);
        let q = T::one() + rho * rho;
        (q - rho_prime) / (q * q.sqrt())
    }

    /// `ρ′/(1 + ρ²)^{3/2}` with `ρ = d log r/dφ` and `′ = d/dφ`.
    fn rho_prime_term(&self) -> T {
        let (x, y, dx, dy) = (self.l.re, self.l.im, self.dl.re, self.dl.im);
        let m = self.l.norm();
        self.phi_sign() * (dx * y - x * dy) / (m * m * m)
    }
}

/// Residuals of the polar identities for a curve and its image under a
/// non-affine Möbius map `z₁ = a + b/(z₂ − c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusPairResiduals<T> {
    /// `r₁ r₂ = |b|`, relative.
    pub radius_product: T,
    /// Spread of `φ₁ + φ₂`.
    pub angle_sum: T,
    /// `dz₁/dz₂ = −(z₁ − a)/(z₂ − c)`, relative.
    pub derivative_ratio: T,
    /// `ds₁/ds₂ = r₁/r₂`, relative.
    pub speed_ratio: T,
    /// `ρ₁ = ρ₂`, cross-multiplied and normalised.
    pub log_rate: T,
    /// `ρ₁′ = −ρ₂′` in the form `(r₁″/r₁ − ρ₁²) = −(r₂″/r₂ − ρ₂²)`, scaled
    /// by `(1 + ρ²)^{3/2}`.
    pub log_rate_derivative: T,
    /// `κ₁ r₁ − κ₂ r₂ = −2ρ₁′/(1 + ρ₁²)^{3/2}` with polar curvatures.
    pub curvature_difference: T,
    /// Polar-formula curvature against the Cartesian curvature, both curves.
    pub polar_cartesian: T,
}

/// Evaluates the Möbius-pair identities at the sample points of `source`.
pub fn mobius_pair_identities<T: Real>(
    mu: &MobiusMap<T>,
    source: &Contour<T>,
) -> Result<MobiusPairResiduals<T>> {
    let MobiusMap::General { a, b, c } = *mu else {
        return Err(Error::InvalidArgument(
            "Möbius pair identities need a non-affine map".into(),
        ));
    };
    let floor = T::lit(1e-8) * source.diameter();
    let mut res = MobiusPairResiduals {
        radius_product: T::zero(),
        angle_sum: T::zero(),
        derivative_ratio: T::zero(),
        speed_ratio: T::zero(),
        log_rate: T::zero(),
        log_rate_derivative: T::zero(),
        curvature_difference: T::zero(),
        polar_cartesian: T::zero(),
    };
    let mut angle0 = None;
    for t in source.grid() {
        let z2 = source.eval(t);
        let (d1, d2) = (source.derivative(t, 1), source.derivative(t, 2));
        let w2 = z2 - c;
        if w2.norm() <= floor {
            return Err(Error::Pole {
                re: f64_of(c.re),
                im: f64_of(c.im),
            });
        }
        let (m1, m2, _) = mu.derivatives(z2);
        let z1 = mu.apply(z2)?;
        let w1 = z1 - a;
        let dz1 = m1 * d1;
        let d2z1 = m2 * d1 * d1 + m1 * d2;
        let p1 = PolarPoint::new(w1, dz1, d2z1);
        let p2 = PolarPoint::new(w2, d1, d2);
        let (r1, r2) = (p1.r(), p2.r());

        let angle = wrap_angle((w1 * w2 / b).arg());
        let angle0 = *angle0.get_or_insert(angle);
        res.radius_product = res.radius_product.max((r1 * r2 - b.norm()).abs() / b.norm());
        res.angle_sum = res.angle_sum.max(wrap_angle(angle - angle0).abs());
        res.derivative_ratio = res.derivative_ratio.max((m1 + w1 / w2).norm() / m1.norm());
        let ds_ratio = dz1.norm() / d1.norm();
        res.speed_ratio = res.speed_ratio.max((ds_ratio - r1 / r2).abs() / ds_ratio);

        let (x1, y1, x2, y2) = (p1.l.re, p1.l.im, p2.l.re, p2.l.im);
        res.log_rate = res.log_rate.max((x1 * y2 - x2 * y1).abs() / (p1.l.norm() * p2.l.norm()));
        res.log_rate_derivative = res
            .log_rate_derivative
            .max((p1.rho_prime_term() + p2.rho_prime_term()).abs());

        let kr1 = p1.phi_sign() * p1.curvature_times_radius();
        let kr2 = p2.phi_sign() * p2.curvature_times_radius();
        let dif = kr1 - kr2 + T::lit(2.0) * p1.rho_prime_term();
        res.curvature_difference = res.curvature_difference.max(dif.abs());

        let cart1 = (dz1.conj() * d2z1).im / dz1.norm().powi(3) * r1;
        let cart2 = source.curvature(t)? * r2;
        let cross = (cart1 - p1.curvature_times_radius())
            .abs()
            .max((cart2 - p2.curvature_times_radius()).abs());
        res.polar_cartesian = res.polar_cartesian.max(cross);
    }
    Ok(res)
}

impl<T: Real> MobiusPairResiduals<T> {
    pub fn checks(&self, tol: T) -> Vec<IdentityCheck<T>> {
        vec![
            IdentityCheck::new("radius-product", self.radius_product, tol),
            IdentityCheck::new("angle-sum-constant", self.angle_sum, tol),
            IdentityCheck::new("derivative-ratio", self.derivative_ratio, tol),
            IdentityCheck::new("arclength-ratio", self.speed_ratio, tol),
            IdentityCheck::new("log-rate-equality", self.log_rate, tol),
            IdentityCheck::new("log-rate-derivative-reversal", self.log_rate_derivative, tol),
            IdentityCheck::new("polar-curvature-difference", self.curvature_difference, tol),
        ]
    }
}

/// Pointwise polar curvature of a curve about `center`, compared with its
/// Cartesian curvature; returns the largest `|κ_polar − κ|·r`. Requires the
/// curve to be star-shaped about `center`.
pub fn polar_cartesian_gap<T: Real>(contour: &Contour<T>, center: Complex<T>) -> Result<T> {
    let mut gap = T::zero();
    for t in contour.grid() {
        let p = PolarPoint::new(contour.eval(t) - center, contour.derivative(t, 1), contour.derivative(t, 2));
        if p.l.im.abs() <= T::lit(1e-9) * p.l.norm() {
            return Err(Error::InvalidArgument("curve is not star-shaped about the centre".into()));
        }
        let polar = p.phi_sign() * p.polar_curvature_times_radius();
        gap = gap.max((polar - contour.curvature(t)? * p.r()).abs());
    }
    Ok(gap)
}

/// Roundness and concentricity of the boundary curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Circularity<T> {
    /// Standard deviation of `κ` over `|mean κ|`, per component.
    pub curvature_variation: Vec<T>,
    /// Mean centre of curvature, per component.
    pub centers: Vec<Complex<T>>,
    /// Largest distance between centres over the domain diameter.
    pub center_offset: T,
}

impl<T: Real> Circularity<T> {
    /// Circles within `curvature_tol` sharing a centre within `center_tol`.
    pub fn is_concentric_annulus(&self, curvature_tol: T, center_tol: T) -> bool {
        self.curvature_variation.iter().all(|&v| v < curvature_tol) && self.center_offset < center_tol
    }
}

pub fn circularity<T: Real>(domain: &Domain<T>) -> Result<Circularity<T>> {
    let mut curvature_variation = Vec::with_capacity(domain.n_components());
    let mut centers = Vec::with_capacity(domain.n_components());
    for contour in domain.components() {
        let n = T::from_usize_(contour.samples());
        let mut kappas = Vec::with_capacity(contour.samples());
        let mut center = cr(T::zero());
        for t in contour.grid() {
            let k = contour.curvature(t)?;
            let normal = contour.tangent(t)? * Complex::new(T::zero(), T::one());
            center += contour.eval(t) + normal / k;
            kappas.push(k);
        }
        let mean = kappas.iter().fold(T::zero(), |a, &k| a + k) / n;
        let var = kappas.iter().fold(T::zero(), |a, &k| a + (k - mean) * (k - mean)) / n;
        curvature_variation.push(var.sqrt() / mean.abs());
        centers.push(center / n);
    }
    let center_offset = centers
        .iter()
        .map(|c| (*c - centers[0]).norm())
        .fold(T::zero(), T::max)
        / domain.diameter();
    Ok(Circularity {
        curvature_variation,
        centers,
        center_offset,
    })
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck<T> {
    pub name: String,
    pub residual: T,
    pub tolerance: T,
}

impl<T: Real> IdentityCheck<T> {
    pub fn new(name: impl Into<String>, residual: T, tolerance: T) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport<T> {
    pub checks: Vec<IdentityCheck<T>>,
}

impl<T: Real> VerificationReport<T> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = IdentityCheck<T>>) {
        self.checks.extend(checks);
    }
}

impl<T: Real> fmt::Display for VerificationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{:<36} residual {:.3e}  tol {:.1e}  {}",
                check.name,
                f64_of(check.residual),
                f64_of(check.tolerance),
                if check.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Runs the whole identity chain on the concentric annulus `(R1, R2)` with
/// `samples` boundary points: oracle residuals, the quadratic differential
/// from the identity map, `μ` with its derivative relation and Schwarzian,
/// invariance, the curvature identities and roundness.
pub fn concentric_report<T: Real>(r1: T, r2: T, samples: usize, tol: T) -> Result<VerificationReport<T>> {
    let oracle = annulus_oracle(r1, r2)?;
    let residuals = oracle.residuals(samples)?;
    let mut report = VerificationReport::default();
    report.extend([
        IdentityCheck::new("oracle-boundary-system", residuals.boundary, tol),
        IdentityCheck::new("oracle-riccati", residuals.riccati, tol),
        IdentityCheck::new("oracle-lambda-formula", residuals.lambda_formula, tol),
    ]);

    let map = MobiusConformal::identity();
    let c = cr(-(r1 * r2));
    let dphi = quaddiff_from_map(map, c);
    let inner: Vec<Complex<T>> = periodic_grid::<T>(samples)
        .map(|t| Complex::from_polar(r2, t))
        .collect();
    let map_gap = inner
        .iter()
        .map(|&z| (dphi.at(z) - oracle.dphi.at(z)).norm())
        .fold(T::zero(), T::max);
    report.extend([IdentityCheck::new("map-quadratic-differential", map_gap, tol)]);

    let mu = MuMap::new(map, r1, r2)?;
    let sampled = mu_samples(&mu, c, &inner, r2 * T::lit(0.1))?;
    report.extend([
        IdentityCheck::new("correspondence-root-ratio", sampled.root_residual, tol),
        IdentityCheck::new("correspondence-schwarzian", sampled.schwarzian, tol),
        IdentityCheck::new("differential-invariance", invariance_check(&dphi, &mu, &inner), tol),
    ]);

    let origin = cr(T::zero());
    let domain = Domain::new(
        Contour::circle(origin, r1)?.resampled(samples)?,
        vec![Contour::circle(origin, r2)?.resampled(samples)?],
        Some(vec![origin]),
    )?;
    let mobius = map.correspondence(r1, r2)?;
    report.extend(curvature_pair_checks(&domain, &mobius, oracle.lambda)?.checks(tol));
    let round = circularity(&domain)?;
    let variation = round.curvature_variation.iter().copied().fold(T::zero(), T::max);
    report.extend([
        IdentityCheck::new("boundary-roundness", variation, T::lit(1e-4)),
        IdentityCheck::new("boundary-concentricity", round.center_offset, T::lit(1e-6)),
    ]);
    Ok(report)
}
