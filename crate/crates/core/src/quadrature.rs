//! Quadrature rules and spectral operations on periodic samples.

use num_complex::Complex;

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize_(n);
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, refined by Newton on P_n.
            let mut x = (T::PI() * (T::from_usize_(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` along the straight segment from `a` to `b` in ℂ.
    pub fn integrate_segment<F>(&self, a: Complex<T>, b: Complex<T>, mut f: F) -> Complex<T>
    where
        F: FnMut(Complex<T>) -> Complex<T>,
    {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * *x) * *w;
        }
        acc * half
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Trapezoid rule for a periodic integrand sampled on a uniform grid over one
/// period of length `2π`.
pub fn periodic_trapezoid<T: Real>(samples: impl IntoIterator<Item = T>) -> T {
    let mut n = 0usize;
    let mut sum = T::zero();
    for s in samples {
        sum += s;
        n += 1;
    }
    sum * T::two_pi() / T::from_usize_(n)
}

/// Discrete Fourier coefficients `ĉ_k = (1/n) Σ f_j e^{−ikt_j}` for signed
/// wavenumbers `k ∈ (−n/2, n/2]`, returned in the order `0, 1, …, −1`.
fn dft<T: Real>(samples: &[T]) -> Vec<Complex<T>> {
    let n = samples.len();
    let nf = T::from_usize_(n);
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, s) in samples.iter().enumerate() {
                let ang = -T::two_pi() * T::from_usize_((k * j) % n) / nf;
                acc += Complex::from_polar(*s, ang);
            }
            acc / nf
        })
        .collect()
}

fn signed_wavenumber(k: usize, n: usize) -> isize {
    if k <= n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

fn synthesize<T: Real>(coeffs: &[Complex<T>], t: T) -> T {
    let n = coeffs.len();
    let mut acc = T::zero();
    for (k, ck) in coeffs.iter().enumerate() {
        let m = signed_wavenumber(k, n);
        // The Nyquist mode is real for real data; keep its cosine part only.
        if n % 2 == 0 && k == n / 2 {
            acc += ck.re * (T::from_isize(m).unwrap() * t).cos();
            continue;
        }
        acc += (*ck * Complex::from_polar(T::one(), T::from_isize(m).unwrap() * t)).re;
    }
    acc
}

/// Spectral derivatives of a real periodic function sampled on the uniform
/// grid over `[0, 2π)`. Returns `(f′, f″)` at the grid points.
pub fn periodic_derivatives<T: Real>(samples: &[T]) -> (Vec<T>, Vec<T>) {
    let n = samples.len();
    let coeffs = dft(samples);
    let mut d1 = coeffs.clone();
    let mut d2 = coeffs;
    for k in 0..n {
        let m = T::from_isize(signed_wavenumber(k, n)).unwrap();
        if n % 2 == 0 && k == n / 2 {
            d1[k] = Complex::new(T::zero(), T::zero());
            d2[k] = d2[k] * (-(m * m));
            continue;
        }
        d1[k] = d1[k] * Complex::new(T::zero(), m);
        d2[k] = d2[k] * (-(m * m));
    }
    let grid: Vec<T> = crate::scalar::periodic_grid(n).collect();
    (
        grid.iter().map(|&t| synthesize(&d1, t)).collect(),
        grid.iter().map(|&t| synthesize(&d2, t)).collect(),
    )
}

/// Spectral running integral `F(t_j) = ∫_0^{t_j} f(t) dt` of a real periodic
/// integrand on the uniform grid.
pub fn periodic_cumulative<T: Real>(samples: &[T]) -> Vec<T> {
    let n = samples.len();
    let coeffs = dft(samples);
    let mean = coeffs[0].re;
    let mut anti = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 1..n {
        if n % 2 == 0 && k == n / 2 {
            continue;
        }
        let m = T::from_isize(signed_wavenumber(k, n)).unwrap();
        anti[k] = coeffs[k] / Complex::new(T::zero(), m);
    }
    let base = synthesize(&anti, T::zero());
    crate::scalar::periodic_grid(n)
        .map(|t| mean * t + synthesize(&anti, t) - base)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::<f64>::new(8);
        // ∫_{-1}^{1} x^14 dx = 2/15
        let s: f64 = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn segment_integral_of_exp() {
        let gl = GaussLegendre::<f64>::new(12);
        let a = Complex::new(0.0, 0.0);
        let b = Complex::new(1.0, 1.0);
        let got = gl.integrate_segment(a, b, |z| z.exp());
        let want = b.exp() - a.exp();
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn spectral_derivative_of_trig() {
        let n = 64;
        let grid: Vec<f64> = crate::scalar::periodic_grid(n).collect();
        let f: Vec<f64> = grid.iter().map(|t| (2.0 * t).sin() + 0.5 * t.cos()).collect();
        let (d1, d2) = periodic_derivatives(&f);
        for (j, t) in grid.iter().enumerate() {
            assert!((d1[j] - (2.0 * (2.0 * t).cos() - 0.5 * t.sin())).abs() < 1e-12);
            assert!((d2[j] - (-4.0 * (2.0 * t).sin() - 0.5 * t.cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn cumulative_integral_of_shifted_cosine() {
        let n = 64;
        let grid: Vec<f64> = crate::scalar::periodic_grid(n).collect();
        let f: Vec<f64> = grid.iter().map(|t| 2.0 + t.cos()).collect();
        let cum = periodic_cumulative(&f);
        for (j, t) in grid.iter().enumerate() {
            assert!((cum[j] - (2.0 * t + t.sin())).abs() < 1e-12);
        }
    }
}
