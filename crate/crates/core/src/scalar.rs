use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the numerical code is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Uniform periodic grid `t_i = 2πi/n`.
pub fn periodic_grid<T: Real>(n: usize) -> impl Iterator<Item = T> + Clone {
    let step = T::two_pi() / T::from_usize_(n);
    (0..n).map(move |i| step * T::from_usize_(i))
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::two_pi();
    let mut x = a % two_pi;
    if x > T::PI() {
        x -= two_pi;
    } else if x <= -T::PI() {
        x += two_pi;
    }
    x
}
