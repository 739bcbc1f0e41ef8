//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the physics is written against.
///
/// Implemented for `f32` and `f64`. Everything in the crate is generic over
/// this trait; the `*F64` aliases at the crate root fix it to `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for `Complex::new`.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Purely real complex number.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// The imaginary unit.
#[inline]
pub fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `|a - b| / max(|a|, |b|)`, or the absolute difference when both vanish.
pub fn rel_diff<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let scale = a.norm().max(b.norm());
    let diff = (a - b).norm();
    if scale > T::zero() {
        diff / scale
    } else {
        diff
    }
}

/// `exp(x) - 1` for complex `x`, accurate for small `|x|`.
pub fn expm1<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(1e-3) {
        // Taylor series to x^6 / 720; truncation error below eps for |x| < 1e-3.
        let mut term = x;
        let mut sum = x;
        for k in 2..=6 {
            term = term * x / T::from_count(k);
            sum += term;
        }
        sum
    } else {
        x.exp() - Complex::new(T::one(), T::zero())
    }
}

/// `(exp(x) - 1) / x`, equal to 1 at `x = 0`.
pub fn exprel<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        expm1(x) / x
    }
}
