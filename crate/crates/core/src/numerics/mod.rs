//! Generic numerical building blocks: ODE stepping, quadrature, quadratic
//! roots, fixed-point solving and finite differences.

pub mod fixed_point;
pub mod ode;
pub mod quadratic;
pub mod quadrature;

use num_complex::Complex;

use crate::scalar::Real;

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn central_diff4<T: Real, F: Fn(T) -> Complex<T>>(f: F, x: T, h: T) -> Complex<T> {
    let two = T::lit(2.0);
    let eight = T::lit(8.0);
    (f(x - two * h) - f(x + two * h) + (f(x + h) - f(x - h)) * eight) / (T::lit(12.0) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn central_diff4_error_scales_as_h4() {
        let f = |x: f64| cplx(x.sin(), x.exp());
        let exact = cplx(1f64.cos(), 1f64.exp());
        let e1 = (central_diff4(f, 1.0, 0.1) - exact).norm();
        let e2 = (central_diff4(f, 1.0, 0.05) - exact).norm();
        assert!(e1 / e2 > 14.0 && e1 / e2 < 18.0);
    }
}
