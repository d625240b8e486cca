//! Small dense linear algebra used by the minimax solver and the WKB matching.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] += v;
    }

    /// Adds `w · g gᵀ`.
    pub fn add_outer(&mut self, g: &[T], w: T) {
        for i in 0..self.n {
            let gi = g[i] * w;
            if gi == T::zero() {
                continue;
            }
            for j in 0..self.n {
                self.data[i * self.n + j] += gi * g[j];
            }
        }
    }
}

/// Cholesky factorisation `A = L Lᵀ` of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
    condition: T,
}

impl<T: Real> Cholesky<T> {
    pub fn new(a: &SquareMatrix<T>) -> Result<Self> {
        let n = a.n;
        let mut l = vec![T::zero(); n * n];
        let mut dmin = T::infinity();
        let mut dmax = T::zero();
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::IllConditioned(f64::INFINITY));
            }
            let djj = d.sqrt();
            dmin = dmin.min(djj);
            dmax = dmax.max(djj);
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        let ratio = dmax / dmin;
        Ok(Self {
            n,
            l,
            condition: ratio * ratio,
        })
    }

    /// Rough condition estimate from the pivot spread.
    pub fn condition_estimate(&self) -> T {
        self.condition
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Solves a symmetric positive semi-definite system, adding a relative
/// diagonal shift if the plain factorisation fails. Returns the solution and
/// a condition estimate.
pub fn solve_spd<T: Real>(a: &SquareMatrix<T>, b: &[T]) -> Result<(Vec<T>, T)> {
    if let Ok(ch) = Cholesky::new(a) {
        return Ok((ch.solve(b), ch.condition_estimate()));
    }
    let diag_max = (0..a.n).map(|i| a.get(i, i).abs()).fold(T::zero(), T::max);
    let mut shift = diag_max * T::epsilon() * T::lit(16.0);
    for _ in 0..12 {
        let mut shifted = a.clone();
        for i in 0..a.n {
            shifted.add(i, i, shift);
        }
        if let Ok(ch) = Cholesky::new(&shifted) {
            return Ok((ch.solve(b), ch.condition_estimate()));
        }
        shift *= T::lit(100.0);
    }
    Err(Error::IllConditioned(f64::INFINITY))
}

/// Solves the complex 2×2 system `[[a, b], [c, d]] x = r`.
pub fn solve_2x2<T: Real>(
    m: [[Complex<T>; 2]; 2],
    r: [Complex<T>; 2],
) -> Result<[Complex<T>; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    if det.norm() <= T::epsilon() * scale * scale {
        return Err(Error::InvalidArgument("singular 2×2 system".into()));
    }
    Ok([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = SquareMatrix {
            n: 3,
            data: vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0],
        };
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a.get(i, j) * x_true[j]).sum())
            .collect();
        let (x, cond) = solve_spd(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(x_true) {
            assert!((xi - ti).abs() < 1e-14);
        }
        assert!(cond >= 1.0);
    }

    #[test]
    fn singular_semidefinite_is_regularised() {
        let a = SquareMatrix {
            n: 2,
            data: vec![1.0f64, 1.0, 1.0, 1.0],
        };
        let (x, _) = solve_spd(&a, &[2.0, 2.0]).unwrap();
        assert!((x[0] + x[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn complex_2x2() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let x = solve_2x2([[one, one], [i, -i]], [one * 2.0, Complex::new(0.0, 0.0)]).unwrap();
        assert!((x[0] - one).norm() < 1e-15);
        assert!((x[1] - one).norm() < 1e-15);
    }
}
