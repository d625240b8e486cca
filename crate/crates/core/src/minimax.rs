//! Discrete complex Chebyshev approximation.
//!
//! Minimises `max_i |f_i − Σ_j B_ij x_j|` over complex coefficients `x`. The
//! objective is a maximum of moduli of affine functions, so the problem is
//! convex. It is solved in two phases: a p-norm homotopy (`Σ |r_i|^{2p}` for
//! `p = 1, 2, 4, …, 64`, each stage by damped Newton warm-started from the
//! previous one) followed by a log-barrier interior-point polish of the
//! epigraph form `min t s.t. |r_i| ≤ t`, whose central path carries an
//! explicit optimality-gap bound.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{solve_spd, SquareMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct MinimaxOptions<T> {
    /// Largest exponent `p` of the homotopy.
    pub p_max: u32,
    /// Stop the homotopy once successive stage norms differ by less than this
    /// (relative to the target scale).
    pub stage_tol: T,
    /// Target optimality-gap bound of the barrier polish (relative).
    pub gap_tol: T,
    /// Basis condition estimate above which the problem is rejected.
    pub max_condition: T,
}

impl<T: Real> Default for MinimaxOptions<T> {
    fn default() -> Self {
        Self {
            p_max: 64,
            stage_tol: T::lit(1e-9),
            gap_tol: T::lit(1e-11),
            max_condition: T::lit(1e14),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxSolution<T> {
    pub coeffs: Vec<Complex<T>>,
    /// Achieved `max_i |r_i|`.
    pub norm: T,
    /// Upper bound on `norm − optimum` certified by the barrier central path.
    pub gap_bound: T,
    /// Condition estimate of the least-squares normal matrix.
    pub condition: T,
    /// `(p, max |r|)` after each homotopy stage.
    pub stages: Vec<(u32, T)>,
}

struct Rows<T> {
    /// Real and imaginary parts of `∂r_i/∂y`, `m × d` each.
    re: Vec<T>,
    im: Vec<T>,
    f: Vec<Complex<T>>,
    d: usize,
}

impl<T: Real> Rows<T> {
    fn residual(&self, i: usize, y: &[T]) -> Complex<T> {
        let d = self.d;
        let mut r = self.f[i];
        for k in 0..d {
            r.re += self.re[i * d + k] * y[k];
            r.im += self.im[i * d + k] * y[k];
        }
        r
    }

    fn max_residual(&self, y: &[T]) -> T {
        (0..self.f.len())
            .map(|i| self.residual(i, y).norm())
            .fold(T::zero(), T::max)
    }

    fn grad_q(&self, i: usize, r: Complex<T>, out: &mut [T]) {
        let d = self.d;
        let two = T::lit(2.0);
        for k in 0..d {
            out[k] = two * (r.re * self.re[i * d + k] + r.im * self.im[i * d + k]);
        }
    }

    /// Adds `w · 2(A Aᵀ + C Cᵀ)` for row `i` into the leading `d × d` block.
    fn add_gram(&self, i: usize, w: T, h: &mut SquareMatrix<T>) {
        let d = self.d;
        let w2 = w * T::lit(2.0);
        for a in 0..d {
            let ra = self.re[i * d + a] * w2;
            let ia = self.im[i * d + a] * w2;
            for b in 0..d {
                h.add(a, b, ra * self.re[i * d + b] + ia * self.im[i * d + b]);
            }
        }
    }
}

/// Solves the discrete complex minimax problem for the `m × n` row-major
/// basis matrix `basis` and targets `target`.
pub fn solve<T: Real>(
    basis: &[Complex<T>],
    n: usize,
    target: &[Complex<T>],
    opts: &MinimaxOptions<T>,
) -> Result<MinimaxSolution<T>> {
    let m = target.len();
    if n == 0 || basis.len() != m * n {
        return Err(Error::InvalidArgument(format!(
            "basis has {} entries, expected {} × {}",
            basis.len(),
            m,
            n
        )));
    }
    let scale = target.iter().map(|f| f.norm()).fold(T::zero(), T::max);
    if scale == T::zero() {
        return Ok(MinimaxSolution {
            coeffs: vec![Complex::new(T::zero(), T::zero()); n],
            norm: T::zero(),
            gap_bound: T::zero(),
            condition: T::one(),
            stages: Vec::new(),
        });
    }
    // Column scaling keeps the Newton systems well balanced.
    let col_scale: Vec<T> = (0..n)
        .map(|j| {
            let s = (0..m).map(|i| basis[i * n + j].norm()).fold(T::zero(), T::max);
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let d = 2 * n;
    let mut re = vec![T::zero(); m * d];
    let mut im = vec![T::zero(); m * d];
    for i in 0..m {
        for j in 0..n {
            let b = basis[i * n + j] / col_scale[j];
            // ∂r/∂(Re x_j) = −B_ij, ∂r/∂(Im x_j) = −i B_ij
            re[i * d + 2 * j] = -b.re;
            im[i * d + 2 * j] = -b.im;
            re[i * d + 2 * j + 1] = b.im;
            im[i * d + 2 * j + 1] = -b.re;
        }
    }
    let rows = Rows {
        re,
        im,
        f: target.iter().map(|f| *f / scale).collect(),
        d,
    };

    // Least squares (p = 1) start.
    let mut gram = SquareMatrix::zeros(d);
    let mut rhs = vec![T::zero(); d];
    let mut g = vec![T::zero(); d];
    for i in 0..m {
        rows.add_gram(i, T::one(), &mut gram);
        rows.grad_q(i, rows.f[i], &mut g);
        for k in 0..d {
            rhs[k] -= g[k];
        }
    }
    let (mut y, condition) = solve_spd(&gram, &rhs)?;
    if condition > opts.max_condition {
        return Err(Error::IllConditioned(condition.to_f64().unwrap_or(f64::INFINITY)));
    }
    let mut stages = vec![(1, rows.max_residual(&y))];

    let mut p = 2u32;
    while p <= opts.p_max {
        y = pnorm_stage(&rows, y, p)?;
        let norm = rows.max_residual(&y);
        let prev = stages.last().map(|s| s.1).unwrap_or(norm);
        stages.push((p, norm));
        if (prev - norm).abs() < opts.stage_tol {
            break;
        }
        p *= 2;
    }

    let (y_polished, gap) = barrier_polish(&rows, &y, opts.gap_tol)?;
    let (y, gap) = if rows.max_residual(&y_polished) <= rows.max_residual(&y) {
        (y_polished, gap)
    } else {
        (y, T::infinity())
    };
    let norm = rows.max_residual(&y);
    let coeffs = (0..n)
        .map(|j| Complex::new(y[2 * j], y[2 * j + 1]) * scale / col_scale[j])
        .collect();
    Ok(MinimaxSolution {
        coeffs,
        norm: norm * scale,
        gap_bound: gap * scale,
        condition,
        stages: stages.into_iter().map(|(p, v)| (p, v * scale)).collect(),
    })
}

fn pnorm_objective<T: Real>(rows: &Rows<T>, y: &[T], q_ref: T, p: u32) -> T {
    (0..rows.f.len())
        .map(|i| (rows.residual(i, y).norm_sqr() / q_ref).powi(p as i32))
        .fold(T::zero(), |a, b| a + b)
}

fn pnorm_stage<T: Real>(rows: &Rows<T>, mut y: Vec<T>, p: u32) -> Result<Vec<T>> {
    let d = rows.d;
    let m = rows.f.len();
    let pf = T::from_u32(p).unwrap();
    let mut g = vec![T::zero(); d];
    for _ in 0..200 {
        let q_ref = (0..m)
            .map(|i| rows.residual(i, &y).norm_sqr())
            .fold(T::zero(), T::max)
            .max(T::min_positive_value());
        let mut hess = SquareMatrix::zeros(d);
        let mut grad = vec![T::zero(); d];
        for i in 0..m {
            let r = rows.residual(i, &y);
            let q = r.norm_sqr() / q_ref;
            if q < T::lit(1e-300) {
                continue;
            }
            let w = q.powi(p as i32 - 1);
            rows.grad_q(i, r, &mut g);
            for k in 0..d {
                grad[k] += w * g[k];
            }
            rows.add_gram(i, w, &mut hess);
            if p > 1 {
                hess.add_outer(&g, (pf - T::one()) * q.powi(p as i32 - 2) / q_ref);
            }
        }
        let neg: Vec<T> = grad.iter().map(|v| -*v).collect();
        let (step, _) = solve_spd(&hess, &neg)?;
        let decrement: T = step.iter().zip(&grad).map(|(s, g)| -*s * *g).fold(T::zero(), |a, b| a + b);
        let f0 = pnorm_objective(rows, &y, q_ref, p);
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = y.iter().zip(&step).map(|(a, s)| *a + alpha * *s).collect();
            let f1 = pnorm_objective(rows, &trial, q_ref, p);
            if f1 <= f0 - T::lit(1e-4) * alpha * decrement * pf {
                y = trial;
                accepted = true;
                break;
            }
            alpha *= T::lit(0.5);
        }
        // Newton decrement relative to the objective scale.
        if !accepted || decrement <= T::lit(1e-13) * f0 / pf {
            break;
        }
    }
    Ok(y)
}

fn barrier_value<T: Real>(rows: &Rows<T>, y: &[T], t: T, tau: T) -> Option<T> {
    let mut acc = tau * t;
    for i in 0..rows.f.len() {
        let g = t * t - rows.residual(i, y).norm_sqr();
        if !(g > T::zero()) {
            return None;
        }
        acc -= g.ln();
    }
    Some(acc)
}

fn barrier_polish<T: Real>(rows: &Rows<T>, y0: &[T], gap_tol: T) -> Result<(Vec<T>, T)> {
    let d = rows.d;
    let m = rows.f.len();
    let mf = T::from_usize_(m);
    let mut y = y0.to_vec();
    let mut t = rows.max_residual(&y) * T::lit(1.01) + T::lit(1e-12);
    let mut tau = T::lit(2.0) * mf / (T::lit(1e-2) * t);
    let mut g = vec![T::zero(); d];
    let mut v = vec![T::zero(); d + 1];
    let mut gap = T::lit(2.0) * mf / tau;
    for _outer in 0..40 {
        for _ in 0..100 {
            let mut hess = SquareMatrix::zeros(d + 1);
            let mut grad = vec![T::zero(); d + 1];
            grad[d] = tau;
            for i in 0..m {
                let r = rows.residual(i, &y);
                let gi = t * t - r.norm_sqr();
                rows.grad_q(i, r, &mut g);
                let inv = gi.recip();
                for k in 0..d {
                    grad[k] += g[k] * inv;
                    v[k] = -g[k];
                }
                grad[d] -= T::lit(2.0) * t * inv;
                v[d] = T::lit(2.0) * t;
                hess.add_outer(&v, inv * inv);
                rows.add_gram(i, inv, &mut hess);
                hess.add(d, d, -T::lit(2.0) * inv);
            }
            let neg: Vec<T> = grad.iter().map(|x| -*x).collect();
            let (step, _) = solve_spd(&hess, &neg)?;
            let decrement: T = step
                .iter()
                .zip(&grad)
                .map(|(s, g)| -*s * *g)
                .fold(T::zero(), |a, b| a + b);
            if decrement <= T::lit(1e-10) {
                break;
            }
            let f0 = barrier_value(rows, &y, t, tau).ok_or_else(|| {
                Error::SolverNonConvergence("barrier iterate left the feasible set".into())
            })?;
            let mut alpha = T::one();
            let mut moved = false;
            for _ in 0..80 {
                let ty: Vec<T> = y.iter().zip(&step).map(|(a, s)| *a + alpha * *s).collect();
                let tt = t + alpha * step[d];
                if let Some(f1) = barrier_value(rows, &ty, tt, tau) {
                    if f1 <= f0 - T::lit(0.25) * alpha * decrement {
                        y = ty;
                        t = tt;
                        moved = true;
                        break;
                    }
                }
                alpha *= T::lit(0.5);
            }
            if !moved {
                break;
            }
        }
        gap = T::lit(2.0) * mf / tau;
        if gap <= gap_tol {
            break;
        }
        tau *= T::lit(8.0);
    }
    Ok((y, gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_constant_for_points_on_a_circle_is_the_centre() {
        // min_x max_i |f_i − x| for f on a circle of radius 2 around 1+i.
        let m = 64;
        let centre = Complex::new(1.0, 1.0);
        let target: Vec<Complex<f64>> = (0..m)
            .map(|i| centre + Complex::from_polar(2.0, i as f64 * 0.0981748))
            .collect();
        let basis = vec![Complex::new(1.0, 0.0); m];
        let sol = solve(&basis, 1, &target, &MinimaxOptions::default()).unwrap();
        assert!((sol.coeffs[0] - centre).norm() < 1e-7);
        assert!((sol.norm - 2.0).abs() < 1e-9);
    }

    #[test]
    fn real_chebyshev_fit_of_abs_on_three_points() {
        // Best affine fit to |x| at x ∈ {−1, 0, 1}: a = 1/2, b = 0, error 1/2.
        let xs = [-1.0, 0.0, 1.0];
        let target: Vec<Complex<f64>> = xs.iter().map(|x: &f64| Complex::new(x.abs(), 0.0)).collect();
        let mut basis = Vec::new();
        for x in xs {
            basis.push(Complex::new(1.0, 0.0));
            basis.push(Complex::new(x, 0.0));
        }
        let sol = solve(&basis, 2, &target, &MinimaxOptions::default()).unwrap();
        assert!((sol.norm - 0.5).abs() < 1e-9);
        assert!((sol.coeffs[0] - Complex::new(0.5, 0.0)).norm() < 1e-6);
        assert!(sol.coeffs[1].norm() < 1e-6);
    }
}
