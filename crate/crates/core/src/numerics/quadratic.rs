//! Quadratic roots without catastrophic cancellation.
//!
//! The larger-magnitude root comes from the sign-matched branch of the
//! quadratic formula; the other follows from the product of the roots.

use num_complex::Complex;

use crate::scalar::Real;

/// Roots of `a x^2 + b x + c = 0` for real coefficients, labelled the way
/// the textbook formula labels them: `plus = (-b + sqrt(D)) / 2a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticRoots<T> {
    Real { plus: T, minus: T },
    /// Complex-conjugate pair; `plus` carries the positive imaginary part
    /// when `a > 0`.
    Complex { plus: Complex<T>, minus: Complex<T> },
}

impl<T: Real> QuadraticRoots<T> {
    pub fn plus(&self) -> Complex<T> {
        match *self {
            QuadraticRoots::Real { plus, .. } => Complex::new(plus, T::zero()),
            QuadraticRoots::Complex { plus, .. } => plus,
        }
    }

    pub fn minus(&self) -> Complex<T> {
        match *self {
            QuadraticRoots::Real { minus, .. } => Complex::new(minus, T::zero()),
            QuadraticRoots::Complex { minus, .. } => minus,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, QuadraticRoots::Real { .. })
    }
}

/// Roots of `a x^2 + b x + c = 0`, `a != 0`.
pub fn solve_real<T: Real>(a: T, b: T, c: T) -> QuadraticRoots<T> {
    let two = T::lit(2.0);
    let disc = b * b - T::lit(4.0) * a * c;
    if disc >= T::zero() {
        let sd = disc.sqrt();
        if b >= T::zero() {
            let q = -(b + sd) / two;
            if q == T::zero() {
                return QuadraticRoots::Real {
                    plus: T::zero(),
                    minus: T::zero(),
                };
            }
            let (first, second) = (q / a, c / q);
            // q / a is the (-b - sqrt D) / 2a root
            QuadraticRoots::Real {
                plus: second,
                minus: first,
            }
        } else {
            let q = (sd - b) / two;
            QuadraticRoots::Real {
                plus: q / a,
                minus: c / q,
            }
        }
    } else {
        let re = -b / (two * a);
        let im = (-disc).sqrt() / (two * a);
        QuadraticRoots::Complex {
            plus: Complex::new(re, im),
            minus: Complex::new(re, -im),
        }
    }
}

/// Roots of the monic quadratic `x^2 + p x + q = 0` with complex
/// coefficients, labelled `plus = (-p + sqrt(p^2 - 4q)) / 2` using the
/// principal square root.
pub fn solve_monic_complex<T: Real>(p: Complex<T>, q: Complex<T>) -> (Complex<T>, Complex<T>) {
    let two = T::lit(2.0);
    let d = (p * p - q * T::lit(4.0)).sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    // pick the branch that adds magnitudes: Re(conj(p) d) >= 0
    let aligned = (p.conj() * d).re >= T::zero();
    if aligned {
        let big = -(p + d) / two; // the "minus" root
        if big == zero {
            return (zero, zero);
        }
        (q / big, big)
    } else {
        let big = (d - p) / two; // the "plus" root
        if big == zero {
            return (zero, zero);
        }
        (big, q / big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cplx, rel_diff};

    #[test]
    fn textbook_labels() {
        match solve_real(1.0, -3.0, 2.0) {
            QuadraticRoots::Real { plus, minus } => {
                assert_eq!(plus, 2.0);
                assert_eq!(minus, 1.0);
            }
            _ => panic!("expected real roots"),
        }
        match solve_real(1.0, 3.0, 2.0) {
            QuadraticRoots::Real { plus, minus } => {
                assert_eq!(plus, -1.0);
                assert_eq!(minus, -2.0);
            }
            _ => panic!("expected real roots"),
        }
    }

    #[test]
    fn small_root_keeps_precision() {
        // x^2 - 1e8 x + 1 = 0: small root 1e-8 would be lost by the naive formula
        match solve_real(1.0f64, -1e8, 1.0) {
            QuadraticRoots::Real { plus, minus } => {
                assert!((minus - 1e-8).abs() / 1e-8 < 1e-15);
                assert!((plus - 1e8).abs() / 1e8 < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn complex_pair() {
        let r = solve_real(1.0, 0.0, 1.0);
        assert_eq!(r.plus(), cplx(0.0, 1.0));
        assert_eq!(r.minus(), cplx(0.0, -1.0));
        assert!(!r.is_real());
    }

    #[test]
    fn monic_complex_labels_match_formula() {
        let p = cplx(10.0, 0.0);
        let q = cplx(9.0, 0.0);
        let (plus, minus) = solve_monic_complex(p, q);
        assert!(rel_diff(plus, cplx(-1.0, 0.0)) < 1e-15);
        assert!(rel_diff(minus, cplx(-9.0, 0.0)) < 1e-15);
        let (plus, minus) = solve_monic_complex(cplx(-10.0, 0.0), q);
        assert!(rel_diff(plus, cplx(9.0, 0.0)) < 1e-15);
        assert!(rel_diff(minus, cplx(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn monic_zero_product() {
        let (plus, minus) = solve_monic_complex(cplx(2.0, 0.0), cplx(0.0, 0.0));
        assert_eq!(plus, cplx(0.0, 0.0));
        assert_eq!(minus, cplx(-2.0, 0.0));
        let (plus, minus) = solve_monic_complex(cplx(0.0f64, 0.0), cplx(0.0, 0.0));
        assert_eq!(plus, minus);
    }
}
