//! Candidate analytic functions on multiply-connected domains, Cauchy-integral
//! derivatives of black-box holomorphic maps, Schwarzian derivatives and
//! Möbius maps.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::scalar::{cr, Real};

/// Anything that can be evaluated as a holomorphic function of one complex
/// variable.
pub trait ComplexMap<T>: Sync {
    fn at(&self, z: Complex<T>) -> Complex<T>;
}

impl<T, F> ComplexMap<T> for F
where
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    fn at(&self, z: Complex<T>) -> Complex<T> {
        self(z)
    }
}

/// Principal part `Σ_j b_j (z − c)^{−j}` at one centre; `coeffs[j − 1] = b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolePart<T> {
    pub center: Complex<T>,
    pub coeffs: Vec<Complex<T>>,
}

/// Polynomial part plus principal parts at fixed centres.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RationalFunction<T> {
    /// `a_0, a_1, …` for `Σ a_k z^k`.
    pub poly: Vec<Complex<T>>,
    pub poles: Vec<PolePart<T>>,
}

impl<T: Real> RationalFunction<T> {
    pub fn zero() -> Self {
        Self {
            poly: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn polynomial(coeffs: Vec<Complex<T>>) -> Self {
        Self {
            poly: coeffs,
            poles: Vec::new(),
        }
    }

    pub fn with_pole(mut self, center: Complex<T>, coeffs: Vec<Complex<T>>) -> Self {
        self.poles.push(PolePart { center, coeffs });
        self
    }

    /// Exact evaluation; fails within a relative `1e-14` of a pole centre.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let mut acc = horner(&self.poly, z);
        for pole in &self.poles {
            if pole.coeffs.iter().all(|b| b.norm() == T::zero()) {
                continue;
            }
            let d = z - pole.center;
            if d.norm() <= T::lit(1e-14) * (T::one() + pole.center.norm()) {
                return Err(Error::Pole {
                    re: pole.center.re.to_f64().unwrap_or(f64::NAN),
                    im: pole.center.im.to_f64().unwrap_or(f64::NAN),
                });
            }
            let w = d.inv();
            acc += horner(&pole.coeffs, w) * w;
        }
        Ok(acc)
    }

    /// Coefficient-wise derivative.
    pub fn derivative(&self) -> Self {
        let poly = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| *a * T::from_usize_(k))
            .collect();
        let poles = self
            .poles
            .iter()
            .map(|p| {
                let mut coeffs = vec![Complex::new(T::zero(), T::zero())];
                coeffs.extend(
                    p.coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, b)| -*b * T::from_usize_(j + 1)),
                );
                PolePart {
                    center: p.center,
                    coeffs,
                }
            })
            .collect();
        Self { poly, poles }
    }

    /// Highest power with a nonzero coefficient at each pole.
    pub fn pole_orders(&self) -> Vec<(Complex<T>, usize)> {
        self.poles
            .iter()
            .filter_map(|p| {
                p.coeffs
                    .iter()
                    .rposition(|b| b.norm() > T::zero())
                    .map(|j| (p.center, j + 1))
            })
            .collect()
    }

    /// Fails unless every pole centre lies outside the domain.
    pub fn check_poles_outside(&self, domain: &Domain<T>) -> Result<()> {
        for (center, _) in self.pole_orders() {
            match domain.contains(center) {
                Ok(false) => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "pole centre ({}, {}) is not outside the domain",
                        center.re, center.im
                    )))
                }
            }
        }
        Ok(())
    }
}

impl<T: Real> ComplexMap<T> for RationalFunction<T> {
    fn at(&self, z: Complex<T>) -> Complex<T> {
        self.eval(z)
            .unwrap_or_else(|_| Complex::new(T::infinity(), T::infinity()))
    }
}

fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, a| acc * z + *a)
}

const CAUCHY_NODES: usize = 64;

fn cauchy_with_nodes<T: Real, G: ComplexMap<T> + ?Sized>(
    g: &G,
    z0: Complex<T>,
    order: usize,
    radius: T,
    nodes: usize,
) -> (Vec<Complex<T>>, T) {
    let nf = T::from_usize_(nodes);
    let values: Vec<(Complex<T>, T)> = (0..nodes)
        .map(|k| {
            let theta = T::two_pi() * T::from_usize_(k) / nf;
            (g.at(z0 + Complex::from_polar(radius, theta)), theta)
        })
        .collect();
    let max_abs = values.iter().map(|(v, _)| v.norm()).fold(T::zero(), T::max);
    let mut out = Vec::with_capacity(order + 1);
    let mut factorial = T::one();
    for j in 0..=order {
        if j > 0 {
            factorial *= T::from_usize_(j);
        }
        let jf = T::from_usize_(j);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (v, theta) in &values {
            acc += *v * Complex::from_polar(T::one(), -jf * *theta);
        }
        out.push(acc * (factorial / (nf * radius.powi(j as i32))));
    }
    (out, max_abs)
}

/// `g^{(j)}(z0)` for `j = 0..=order` from the trapezoid-discretised Cauchy
/// integral on the circle of the given radius.
///
/// The estimate is repeated with twice as many nodes; a discrepancy above the
/// roundoff floor is reported as [`Error::CauchyNonConvergence`].
pub fn cauchy_derivatives<T: Real, G: ComplexMap<T> + ?Sized>(
    g: &G,
    z0: Complex<T>,
    order: usize,
    radius: T,
) -> Result<Vec<Complex<T>>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument("Cauchy radius must be positive".into()));
    }
    let (coarse, _) = cauchy_with_nodes(g, z0, order, radius, CAUCHY_NODES);
    let (fine, max_abs) = cauchy_with_nodes(g, z0, order, radius, 2 * CAUCHY_NODES);
    if !max_abs.is_finite() {
        return Err(Error::CauchyNonConvergence(f64::INFINITY));
    }
    let mut factorial = T::one();
    let mut worst = T::zero();
    for j in 0..=order {
        if j > 0 {
            factorial *= T::from_usize_(j);
        }
        let floor = T::lit(1e3) * T::epsilon() * max_abs * factorial / radius.powi(j as i32);
        let tol = T::lit(1e-9) * fine[j].norm() + floor;
        let diff = (coarse[j] - fine[j]).norm();
        if diff > tol {
            worst = worst.max(diff / tol);
        }
    }
    if worst > T::zero() {
        return Err(Error::CauchyNonConvergence(worst.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(fine)
}

/// Schwarzian derivative `f‴/f′ − (3/2)(f″/f′)²` from Cauchy derivatives on
/// a circle of radius `radius` about `z`.
pub fn schwarzian<T: Real, G: ComplexMap<T> + ?Sized>(
    f: &G,
    z: Complex<T>,
    radius: T,
) -> Result<Complex<T>> {
    let d = cauchy_derivatives(f, z, 3, radius)?;
    let scale = d[0]
        .norm()
        .max(d[1].norm() * radius)
        .max(d[2].norm() * radius * radius * T::lit(0.5))
        .max(d[3].norm() * radius.powi(3) / T::lit(6.0))
        .max(T::min_positive_value());
    if d[1].norm() * radius <= T::lit(1e-12) * scale {
        return Err(Error::VanishingDerivative(d[1].norm().to_f64().unwrap_or(0.0)));
    }
    let ratio = d[2] / d[1];
    Ok(d[3] / d[1] - ratio * ratio * T::lit(1.5))
}

/// Möbius map, either `z ↦ a + b/(z − c)` or the affine `z ↦ p z + q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobiusMap<T> {
    General {
        a: Complex<T>,
        b: Complex<T>,
        c: Complex<T>,
    },
    Affine {
        p: Complex<T>,
        q: Complex<T>,
    },
}

impl<T: Real> MobiusMap<T> {
    pub fn general(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Result<Self> {
        if b.norm() == T::zero() {
            return Err(Error::InvalidArgument("Möbius map needs b ≠ 0".into()));
        }
        Ok(Self::General { a, b, c })
    }

    pub fn affine(p: Complex<T>, q: Complex<T>) -> Result<Self> {
        if p.norm() == T::zero() {
            return Err(Error::InvalidArgument("affine map needs p ≠ 0".into()));
        }
        Ok(Self::Affine { p, q })
    }

    pub fn identity() -> Self {
        Self::Affine {
            p: cr(T::one()),
            q: cr(T::zero()),
        }
    }

    /// From `(αz + β)/(γz + δ)`.
    pub fn from_matrix(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let [[alpha, beta], [gamma, delta]] = m;
        let det = alpha * delta - beta * gamma;
        let scale = m.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max);
        if det.norm() <= T::epsilon() * scale * scale {
            return Err(Error::InvalidArgument("singular Möbius matrix".into()));
        }
        if gamma.norm() <= T::epsilon() * scale {
            Self::affine(alpha / delta, beta / delta)
        } else {
            Self::general(
                alpha / gamma,
                (beta * gamma - alpha * delta) / (gamma * gamma),
                -delta / gamma,
            )
        }
    }

    pub fn to_matrix(&self) -> [[Complex<T>; 2]; 2] {
        let one = cr(T::one());
        let zero = cr(T::zero());
        match *self {
            Self::General { a, b, c } => [[a, b - a * c], [one, -c]],
            Self::Affine { p, q } => [[p, q], [zero, one]],
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let a = self.to_matrix();
        let b = inner.to_matrix();
        let mut m = [[cr(T::zero()); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_matrix(m)
    }

    pub fn inverse(&self) -> Result<Self> {
        let [[a, b], [c, d]] = self.to_matrix();
        Self::from_matrix([[d, -b], [-c, a]])
    }

    /// The pole `c` of a non-affine map.
    pub fn pole(&self) -> Option<Complex<T>> {
        match *self {
            Self::General { c, .. } => Some(c),
            Self::Affine { .. } => None,
        }
    }

    pub fn apply(&self, z: Complex<T>) -> Result<Complex<T>> {
        match *self {
            Self::General { a, b, c } => {
                let d = z - c;
                if d.norm() <= T::lit(1e-14) * (T::one() + c.norm()) {
                    return Err(Error::Pole {
                        re: c.re.to_f64().unwrap_or(f64::NAN),
                        im: c.im.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(a + b / d)
            }
            Self::Affine { p, q } => Ok(p * z + q),
        }
    }

    /// Derivatives `(m′, m″, m‴)` at `z`.
    pub fn derivatives(&self, z: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
        match *self {
            Self::General { b, c, .. } => {
                let w = (z - c).inv();
                let w2 = w * w;
                (
                    -b * w2,
                    b * w2 * w * T::lit(2.0),
                    -b * w2 * w2 * T::lit(6.0),
                )
            }
            Self::Affine { p, .. } => (p, cr(T::zero()), cr(T::zero())),
        }
    }
}

impl<T: Real> ComplexMap<T> for MobiusMap<T> {
    fn at(&self, z: Complex<T>) -> Complex<T> {
        self.apply(z)
            .unwrap_or_else(|_| Complex::new(T::infinity(), T::infinity()))
    }
}

/// `|S(m∘f)(z) − S(f)(z)|`; vanishes because Möbius maps leave the
/// Schwarzian invariant under left composition.
pub fn mobius_compose_schwarzian_check<T: Real, G: ComplexMap<T> + ?Sized>(
    f: &G,
    m: &MobiusMap<T>,
    z: Complex<T>,
    radius: T,
) -> Result<T> {
    let composed = |w: Complex<T>| m.at(f.at(w));
    let lhs = schwarzian(&composed, z, radius)?;
    let rhs = schwarzian(f, z, radius)?;
    Ok((lhs - rhs).norm())
}

/// `|S(f∘m)(z) − S(f)(m(z)) m′(z)²|`, the quadratic-differential law for
/// right composition.
pub fn mobius_right_covariance_check<T: Real, G: ComplexMap<T> + ?Sized>(
    f: &G,
    m: &MobiusMap<T>,
    z: Complex<T>,
    radius: T,
) -> Result<T> {
    let composed = |w: Complex<T>| f.at(m.at(w));
    let lhs = schwarzian(&composed, z, radius)?;
    let w = m.apply(z)?;
    let (dm, _, _) = m.derivatives(z);
    let rhs = schwarzian(f, w, radius * dm.norm())? * dm * dm;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rational_eval_examples() {
        let f = RationalFunction::zero().with_pole(cx(0.0, 0.0), vec![cx(2.0, 0.0)]);
        assert!((f.eval(cx(1.0, 0.0)).unwrap() - cx(2.0, 0.0)).norm() < 1e-15);
        let df = f.derivative();
        assert!((df.eval(cx(0.0, 1.0)).unwrap() - cx(2.0, 0.0)).norm() < 1e-15);
        let sq = RationalFunction::polynomial(vec![cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        assert!((sq.eval(cx(3.0, 0.0)).unwrap() - cx(9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluation_at_pole_fails() {
        let f = RationalFunction::zero().with_pole(cx(0.5, 0.0), vec![cx(1.0, 0.0)]);
        assert!(matches!(f.eval(cx(0.5, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = RationalFunction::polynomial(vec![cx(1.0, 0.5), cx(-0.3, 0.2), cx(0.1, 0.0)])
            .with_pole(cx(0.2, -0.1), vec![cx(0.5, 0.1), cx(-0.2, 0.3)]);
        let df = f.derivative();
        for z in [cx(1.3, 0.4), cx(-0.8, 1.1), cx(2.0, -0.5)] {
            let h = 1e-6;
            let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
            assert!((fd - df.eval(z).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn cauchy_examples() {
        let d = cauchy_derivatives(&|z: Complex<f64>| z.exp(), cx(0.0, 0.0), 2, 0.5).unwrap();
        for v in d {
            assert!((v - cx(1.0, 0.0)).norm() < 1e-10);
        }
        let d = cauchy_derivatives(&|z: Complex<f64>| z * z * z, cx(1.0, 0.0), 3, 0.5).unwrap();
        for (v, w) in d.iter().zip([1.0, 3.0, 6.0, 6.0]) {
            assert!((v - cx(w, 0.0)).norm() < 1e-10 * w);
        }
        let d = cauchy_derivatives(&|z: Complex<f64>| z.inv(), cx(2.0, 0.0), 1, 0.5).unwrap();
        assert!((d[0] - cx(0.5, 0.0)).norm() < 1e-12);
        assert!((d[1] - cx(-0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cauchy_detects_enclosed_singularity() {
        let g = |z: Complex<f64>| (z - cx(0.3, 0.0)).inv();
        assert!(matches!(
            cauchy_derivatives(&g, cx(0.0, 0.0), 2, 0.31),
            Err(Error::CauchyNonConvergence(_))
        ));
    }

    #[test]
    fn schwarzian_examples() {
        let m = MobiusMap::general(cx(1.0, 2.0), cx(0.5, -1.0), cx(-3.0, 0.0)).unwrap();
        assert!(schwarzian(&m, cx(0.5, 0.5), 0.5).unwrap().norm() < 1e-8);
        let s = schwarzian(&|z: Complex<f64>| z.exp(), cx(0.3, -0.2), 0.5).unwrap();
        assert!((s - cx(-0.5, 0.0)).norm() < 1e-10);
        let s = schwarzian(&|z: Complex<f64>| z * z, cx(1.0, 0.0), 0.25).unwrap();
        assert!((s - cx(-1.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn schwarzian_rejects_critical_point() {
        let s = schwarzian(&|z: Complex<f64>| z * z, cx(0.0, 0.0), 0.25);
        assert!(matches!(s, Err(Error::VanishingDerivative(_))));
    }

    #[test]
    fn composition_examples() {
        let recip = MobiusMap::general(cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)).unwrap();
        let exp = |z: Complex<f64>| z.exp();
        assert!(mobius_compose_schwarzian_check(&exp, &recip, cx(1.0, 0.0), 0.5).unwrap() < 1e-7);
        let aff = MobiusMap::affine(cx(2.0, 0.0), cx(1.0, 0.0)).unwrap();
        let sq = |z: Complex<f64>| z * z;
        assert!(mobius_compose_schwarzian_check(&sq, &aff, cx(2.0, 0.0), 0.5).unwrap() < 1e-7);
        let m = MobiusMap::general(cx(0.5, 0.0), cx(1.0, 1.0), cx(-2.0, 0.0)).unwrap();
        assert!(mobius_right_covariance_check(&exp, &m, cx(0.5, 0.3), 0.3).unwrap() < 1e-7);
    }

    #[test]
    fn matrix_round_trip_and_inverse() {
        let m = MobiusMap::general(cx(1.0, -1.0), cx(2.0, 0.5), cx(0.3, 0.2)).unwrap();
        let inv = m.inverse().unwrap();
        let id = m.compose(&inv).unwrap();
        for z in [cx(1.0, 1.0), cx(-2.0, 0.4)] {
            assert!((id.apply(z).unwrap() - z).norm() < 1e-13);
            assert!((inv.apply(m.apply(z).unwrap()).unwrap() - z).norm() < 1e-13);
        }
        assert!(matches!(MobiusMap::affine(cx(3.0, 0.0), cx(1.0, 0.0)).unwrap().inverse().unwrap(), MobiusMap::Affine { .. }));
    }
}
