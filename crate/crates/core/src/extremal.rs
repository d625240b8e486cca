//! Extremality system for `z̄ − φ` on the boundary, the best uniform analytic
//! approximation of `z̄`, vacuum boundary phases and the monodromy sum.

use num_complex::Complex;

use crate::analytic::{PolePart, RationalFunction};
use crate::error::{Error, Result};
use crate::geometry::{geometric_summary, Domain};
use crate::minimax::{self, MinimaxOptions};
use crate::quadrature::periodic_cumulative;
use crate::scalar::{cr, periodic_grid, Real};

/// `u = |γ′|/γ′ = 1/τ` at parameter `t` of component `k`.
fn reciprocal_tangent<T: Real>(domain: &Domain<T>, k: usize, t: T) -> Result<(Complex<T>, Complex<T>)> {
    let contour = domain.component(k);
    let d1 = contour.derivative(t, 1);
    let speed = d1.norm();
    if speed <= T::lit(1e-12) * contour.diameter() {
        return Err(Error::DegenerateTangent(t.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((cr(speed) / d1, d1))
}

/// `conj(γ_k(t)) + iα_k λ u_k(t) − φ(γ_k(t))`.
///
/// Vanishes on every component exactly when `(domain, φ, λ)` satisfies the
/// extremality system. Component `k = 0` is the outer contour.
pub fn boundary_residual<T: Real>(
    domain: &Domain<T>,
    phi: &RationalFunction<T>,
    lambda: T,
    k: usize,
    t: T,
) -> Result<Complex<T>> {
    let z = domain.component(k).eval(t);
    let (u, _) = reciprocal_tangent(domain, k, t)?;
    let i_alpha_lambda = Complex::new(T::zero(), domain.alpha(k) * lambda);
    Ok(z.conj() + i_alpha_lambda * u - phi.eval(z)?)
}

/// `u_k² + iα_k λ du_k/dz − φ′(γ_k(t))` with `d/dz = (dγ/dt)⁻¹ d/dt`.
pub fn riccati_residual<T: Real>(
    domain: &Domain<T>,
    dphi: &RationalFunction<T>,
    lambda: T,
    k: usize,
    t: T,
) -> Result<Complex<T>> {
    let contour = domain.component(k);
    let z = contour.eval(t);
    let (u, d1) = reciprocal_tangent(domain, k, t)?;
    let d2 = contour.derivative(t, 2);
    let speed = d1.norm();
    let dspeed = (d1.conj() * d2).re / speed;
    let du_dt = cr(dspeed) / d1 - cr(speed) * d2 / (d1 * d1);
    let i_alpha_lambda = Complex::new(T::zero(), domain.alpha(k) * lambda);
    Ok(u * u + i_alpha_lambda * du_dt / d1 - dphi.eval(z)?)
}

/// `(Σ_k ∮ −α_k/λ ds)/(2π) = (L_1 − Σ_{k≥2} L_k)/(2πλ)`; an integer value
/// means the monodromy condition holds.
pub fn monodromy_sum<T: Real>(domain: &Domain<T>, lambda: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let total = domain
        .components()
        .enumerate()
        .map(|(k, c)| -domain.alpha(k) * c.length())
        .fold(T::zero(), |a, b| a + b);
    Ok(total / (T::two_pi() * lambda))
}

/// Boundary restriction of the vacuum `v_k = exp(−iα/λ ∫ u_k dζ)`.
#[derive(Debug, Clone)]
pub struct VacuumComponent<T> {
    pub alpha: T,
    /// Arclength `s` at the grid points, starting from `0`.
    pub arclength: Vec<T>,
    pub v: Vec<Complex<T>>,
    /// `w = λ dv/dz`.
    pub w: Vec<Complex<T>>,
    /// Total change of `Arg v` over the component.
    pub winding: T,
}

#[derive(Debug, Clone)]
pub struct VacuumSolution<T> {
    pub lambda: T,
    pub components: Vec<VacuumComponent<T>>,
}

/// Samples the vacuum phases on the grid of every component.
pub fn vacuum_solution<T: Real>(domain: &Domain<T>, lambda: T) -> Result<VacuumSolution<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let mut components = Vec::new();
    for (k, contour) in domain.components().enumerate() {
        let alpha = domain.alpha(k);
        let speeds: Vec<T> = contour.grid().map(|t| contour.speed(t)).collect();
        let arclength = periodic_cumulative(&speeds);
        let mut v = Vec::with_capacity(arclength.len());
        let mut w = Vec::with_capacity(arclength.len());
        for (s, t) in arclength.iter().zip(contour.grid()) {
            let vk = Complex::from_polar(T::one(), -alpha * *s / lambda);
            let (u, _) = reciprocal_tangent(domain, k, t)?;
            // dv/dz = (−iα/λ) u v, so w = λ dv/dz = −iα u v.
            w.push(Complex::new(T::zero(), -alpha) * u * vk);
            v.push(vk);
        }
        components.push(VacuumComponent {
            alpha,
            arclength,
            v,
            w,
            winding: -alpha * contour.length() / lambda,
        });
    }
    Ok(VacuumSolution { lambda, components })
}

impl<T: Real> VacuumSolution<T> {
    /// `max ||v_k| − 1|` over all samples.
    pub fn modulus_defect(&self) -> T {
        self.components
            .iter()
            .flat_map(|c| c.v.iter())
            .map(|v| (v.norm() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    /// `max |dArg(v_k)/ds + α/λ|` from consecutive samples.
    pub fn rate_defect(&self) -> T {
        let mut worst = T::zero();
        for c in &self.components {
            for j in 1..c.v.len() {
                let dphase = (c.v[j] / c.v[j - 1]).arg();
                let ds = c.arclength[j] - c.arclength[j - 1];
                worst = worst.max((dphase / ds + c.alpha / self.lambda).abs());
            }
        }
        worst
    }

    /// `Σ_k winding_k / 2π`.
    pub fn monodromy_sum_over_2pi(&self) -> T {
        self.components
            .iter()
            .map(|c| c.winding)
            .fold(T::zero(), |a, b| a + b)
            / T::two_pi()
    }
}

/// Basis sizes and sampling of the best-approximation fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisConfig {
    /// Highest polynomial power.
    pub poly_degree: usize,
    /// Highest negative power at each hole centre.
    pub pole_order: usize,
    /// Boundary samples per component.
    pub samples: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self {
            poly_degree: 8,
            pole_order: 8,
            samples: 512,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult<T> {
    pub phi: RationalFunction<T>,
    /// `max |z̄ − φ|` over all boundary samples.
    pub achieved_norm: T,
    /// Certified bound on the distance to the discrete optimum.
    pub gap_bound: T,
    pub condition: T,
    pub stages: Vec<(u32, T)>,
}

struct ScaledBasis<T> {
    center: Complex<T>,
    radius: T,
    holes: Vec<(Complex<T>, T)>,
    poly_degree: usize,
    pole_order: usize,
}

impl<T: Real> ScaledBasis<T> {
    fn new(domain: &Domain<T>, config: &BasisConfig) -> Self {
        let outer = domain.outer();
        let center = outer
            .modes()
            .iter()
            .find(|(j, _)| *j == 0)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| cr(T::zero()));
        let radius = outer
            .grid_points()
            .iter()
            .map(|p| (*p - center).norm())
            .fold(T::zero(), T::max);
        let holes = domain
            .inners()
            .iter()
            .zip(domain.hole_centers())
            .map(|(c, h)| {
                let pts = c.grid_points();
                let mean = pts.iter().map(|p| (*p - *h).norm()).fold(T::zero(), |a, b| a + b)
                    / T::from_usize_(pts.len());
                (*h, mean)
            })
            .collect();
        Self {
            center,
            radius,
            holes,
            poly_degree: config.poly_degree,
            pole_order: config.pole_order,
        }
    }

    fn len(&self) -> usize {
        self.poly_degree + 1 + self.holes.len() * self.pole_order
    }

    fn row(&self, z: Complex<T>, out: &mut Vec<Complex<T>>) {
        let x = (z - self.center) / self.radius;
        let mut pw = cr(T::one());
        for _ in 0..=self.poly_degree {
            out.push(pw);
            pw *= x;
        }
        for (c, rho) in &self.holes {
            let w = cr(*rho) / (z - *c);
            let mut pw = w;
            for _ in 0..self.pole_order {
                out.push(pw);
                pw *= w;
            }
        }
    }

    /// Expands the scaled, centred coefficients into monomials about 0 and
    /// principal parts at the hole centres.
    fn to_rational(&self, x: &[Complex<T>]) -> RationalFunction<T> {
        let np = self.poly_degree + 1;
        let mut poly = vec![cr(T::zero()); np];
        // Σ_k x_k ((z − c)/ρ)^k, expanded term by term: binomial rows of
        // (z − c)^k built incrementally.
        let mut binom = vec![cr(T::zero()); np];
        binom[0] = cr(T::one());
        let mut rho_pow = T::one();
        for k in 0..np {
            if k > 0 {
                for i in (0..=k).rev() {
                    let prev = if i > 0 { binom[i - 1] } else { cr(T::zero()) };
                    binom[i] = prev - binom[i] * self.center;
                }
                rho_pow *= self.radius;
            }
            for i in 0..=k {
                poly[i] += x[k] * binom[i] / rho_pow;
            }
        }
        let mut poles = Vec::new();
        for (h, (c, rho)) in self.holes.iter().enumerate() {
            let base = np + h * self.pole_order;
            let coeffs = (0..self.pole_order)
                .map(|j| x[base + j] * rho.powi(j as i32 + 1))
                .collect();
            poles.push(PolePart { center: *c, coeffs });
        }
        RationalFunction { poly, poles }
    }
}

/// Best uniform approximation of `z̄` on the sampled boundary by a
/// polynomial plus principal parts at the hole centres.
pub fn fit_best_phi<T: Real>(domain: &Domain<T>, config: &BasisConfig) -> Result<FitResult<T>> {
    if config.poly_degree < 1 || config.pole_order < 1 {
        return Err(Error::InvalidArgument("basis degrees must be at least 1".into()));
    }
    if config.samples < 256 {
        return Err(Error::InvalidArgument(format!(
            "at least 256 samples per contour required, got {}",
            config.samples
        )));
    }
    let basis = ScaledBasis::new(domain, config);
    let n = basis.len();
    let mut rows = Vec::with_capacity(domain.n_components() * config.samples * n);
    let mut target = Vec::with_capacity(domain.n_components() * config.samples);
    for contour in domain.components() {
        for t in periodic_grid::<T>(config.samples) {
            let z = contour.eval(t);
            basis.row(z, &mut rows);
            target.push(z.conj());
        }
    }
    let sol = minimax::solve(&rows, n, &target, &MinimaxOptions::default())?;
    Ok(FitResult {
        phi: basis.to_rational(&sol.coeffs),
        achieved_norm: sol.norm,
        gap_bound: sol.gap_bound,
        condition: sol.condition,
        stages: sol.stages,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Extremal,
    NotExtremal,
    Indeterminate,
}

/// Residual threshold (relative to the diameter) below which a domain is
/// declared extremal.
pub const EXTREMAL_THRESHOLD: f64 = 1e-6;
/// Residual threshold above which a domain is declared non-extremal.
pub const INDETERMINATE_THRESHOLD: f64 = 1e-4;
/// Domains with `λ_m` below this fraction of the diameter are rejected.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ExtremalityReport<T> {
    pub lambda_min: T,
    pub area: T,
    pub perimeter: T,
    pub diameter: T,
    pub basis: BasisConfig,
    pub fitted_phi: RationalFunction<T>,
    pub achieved_norm: T,
    pub gap_bound: T,
    /// `|boundary_residual|` with `λ = λ_m` on each component's fit grid.
    pub residual_profiles: Vec<Vec<T>>,
    pub max_residual: T,
    pub monodromy_sum_over_2pi: T,
    pub verdict: Verdict,
}

impl<T: Real> ExtremalityReport<T> {
    /// `achieved_norm ≥ λ_m − tol`.
    pub fn respects_lower_bound(&self, tol: T) -> bool {
        self.achieved_norm >= self.lambda_min - tol
    }
}

pub fn extremality_report<T: Real>(
    domain: &Domain<T>,
    config: &BasisConfig,
) -> Result<ExtremalityReport<T>> {
    let summary = geometric_summary(domain)?;
    let diameter = domain.diameter();
    let lambda = summary.lambda_min;
    if lambda < T::lit(DEGENERACY_THRESHOLD) * diameter {
        return Err(Error::Degenerate {
            lambda: lambda.to_f64().unwrap_or(0.0),
            diameter: diameter.to_f64().unwrap_or(0.0),
        });
    }
    let fit = fit_best_phi(domain, config)?;
    let mut residual_profiles = Vec::with_capacity(domain.n_components());
    let mut max_residual = T::zero();
    for k in 0..domain.n_components() {
        let profile = periodic_grid::<T>(config.samples)
            .map(|t| boundary_residual(domain, &fit.phi, lambda, k, t).map(|r| r.norm()))
            .collect::<Result<Vec<T>>>()?;
        max_residual = profile.iter().copied().fold(max_residual, T::max);
        residual_profiles.push(profile);
    }
    let verdict = if max_residual < T::lit(EXTREMAL_THRESHOLD) * diameter {
        Verdict::Extremal
    } else if max_residual < T::lit(INDETERMINATE_THRESHOLD) * diameter {
        Verdict::Indeterminate
    } else {
        Verdict::NotExtremal
    };
    Ok(ExtremalityReport {
        lambda_min: lambda,
        area: summary.area,
        perimeter: summary.perimeter,
        diameter,
        basis: *config,
        achieved_norm: fit.achieved_norm,
        gap_bound: fit.gap_bound,
        fitted_phi: fit.phi,
        residual_profiles,
        max_residual,
        monodromy_sum_over_2pi: monodromy_sum(domain, lambda)?,
        verdict,
    })
}
