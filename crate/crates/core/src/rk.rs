//! Embedded Dormand–Prince 5(4) stepper for complex-valued systems.

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

/// State vector of `N` complex components.
pub type State<T, const N: usize> = [Complex<T>; N];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances and step bounds for [`Dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub h_max: T,
    pub h_min: T,
}

/// Outcome of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<T, const N: usize> {
    pub y: State<T, N>,
    /// Weighted error norm; the step is acceptable when `≤ 1`.
    pub error: T,
}

impl<T: Real> Dopri5<T> {
    pub fn new(rtol: T, atol: T, h_max: T) -> Self {
        Self {
            rtol,
            atol,
            h_max,
            h_min: h_max * T::lit(1e-13),
        }
    }

    /// Takes one trial step of size `h` from `(s, y)`.
    pub fn trial<const N: usize, F>(&self, f: &mut F, s: T, y: &State<T, N>, h: T) -> Result<Trial<T, N>>
    where
        F: FnMut(T, &State<T, N>) -> Result<State<T, N>>,
    {
        let zero = Complex::new(T::zero(), T::zero());
        let mut k = [[zero; N]; 7];
        for stage in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = T::lit(A[stage][j]);
                if a == T::zero() {
                    continue;
                }
                for c in 0..N {
                    ys[c] += kj[c] * (a * h);
                }
            }
            k[stage] = f(s + T::lit(C[stage]) * h, &ys)?;
        }
        let mut y_new = *y;
        let mut err = T::zero();
        for c in 0..N {
            let mut hi = zero;
            let mut lo = zero;
            for stage in 0..7 {
                hi += k[stage][c] * T::lit(B[stage]);
                lo += k[stage][c] * T::lit(B_LOW[stage]);
            }
            y_new[c] += hi * h;
            let scale = self.atol + self.rtol * y[c].norm().max(y_new[c].norm());
            err = err.max(((hi - lo) * h).norm() / scale);
        }
        Ok(Trial { y: y_new, error: err })
    }

    /// Step-size proposal after a trial with weighted error `error`.
    pub fn next_step(&self, h: T, error: T) -> T {
        let factor = if error <= T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * error.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
        };
        (h * factor).min(self.h_max)
    }

    /// Integrates from `s0` to `s1` (with `s1 > s0`), calling `observer` after
    /// every accepted step. Returns the final state.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: &mut F,
        s0: T,
        s1: T,
        y0: State<T, N>,
        mut observer: O,
    ) -> Result<State<T, N>>
    where
        F: FnMut(T, &State<T, N>) -> Result<State<T, N>>,
        O: FnMut(T, &State<T, N>),
    {
        let mut s = s0;
        let mut y = y0;
        let mut h = self.h_max.min((s1 - s0) * T::lit(0.1)).max(self.h_min);
        while s < s1 {
            if s + h > s1 {
                h = s1 - s;
            }
            let trial = self.trial(f, s, &y, h)?;
            if trial.error <= T::one() {
                s += h;
                y = trial.y;
                observer(s, &y);
                h = self.next_step(h, trial.error);
            } else {
                h = self.next_step(h, trial.error).min(h * T::lit(0.9));
                if h < self.h_min {
                    let z = y[0];
                    return Err(crate::Error::StepCollapse {
                        re: z.re.to_f64().unwrap_or(f64::NAN),
                        im: z.im.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_matches_closed_form() {
        let rk = Dopri5::new(1e-12, 1e-14, 0.1);
        let lam = Complex::new(-0.5, 2.0);
        let mut f = |_s: f64, y: &State<f64, 1>| Ok([y[0] * lam]);
        let y = rk
            .integrate(&mut f, 0.0, 3.0, [Complex::new(1.0, 0.0)], |_, _| {})
            .unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_two_component() {
        let rk = Dopri5::new(1e-12, 1e-14, 0.05);
        let mut f = |_s: f64, y: &State<f64, 2>| Ok([y[1], -y[0]]);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let y = rk.integrate(&mut f, 0.0, 10.0, [one, zero], |_, _| {}).unwrap();
        assert!((y[0].re - 10f64.cos()).abs() < 1e-10);
        assert!((y[1].re + 10f64.sin()).abs() < 1e-10);
    }
}
