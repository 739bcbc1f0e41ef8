//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: Complex<T>,
    pub error: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: Complex<T>,
    error: T,
    // integral of |f| over the segment, for the round-off floor
    magnitude: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn gk15<T: Real, F: FnMut(T) -> Complex<T>>(f: &mut F, lo: T, hi: T) -> Segment<T> {
    let half = (hi - lo) * T::lit(0.5);
    let center = (hi + lo) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut magnitude = fc.norm() * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let (fl, fr) = (f(center - dx), f(center + dx));
        let pair = fl + fr;
        magnitude += (fl.norm() + fr.norm()) * T::lit(WGK[j]);
        kronrod += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Segment {
        lo,
        hi,
        value,
        error,
        magnitude: magnitude * half.abs(),
    }
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol * |integral|)`.
///
/// Fails with [`EitError::QuadratureNonConvergence`] naming the worst
/// remaining subinterval when `max_intervals` is exhausted.
pub fn integrate<T: Real, F: FnMut(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Integral<T>> {
    integrate_with_breaks(f, &[a, b], rel_tol, abs_tol, max_intervals)
}

/// Like [`integrate`], over the union of the consecutive intervals given by
/// `breaks` (at least two points, monotone). The initial partition lets
/// callers resolve features narrower than a single 15-point rule would see.
pub fn integrate_with_breaks<T: Real, F: FnMut(T) -> Complex<T>>(
    mut f: F,
    breaks: &[T],
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Integral<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut heap = BinaryHeap::new();
    let mut total = zero;
    let mut total_err = T::zero();
    let mut total_mag = T::zero();
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let s = gk15(&mut f, w[0], w[1]);
        total += s.value;
        total_err += s.error;
        total_mag += s.magnitude;
        heap.push(s);
    }
    if heap.is_empty() {
        return Ok(Integral {
            value: zero,
            error: T::zero(),
            intervals: 0,
        });
    }

    loop {
        let tol = abs_tol.max(rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        // round-off floor: errors this small relative to the sum cannot shrink further
        if total_err <= T::lit(50.0) * T::epsilon() * total_mag {
            break;
        }
        if heap.len() >= max_intervals {
            let worst = *heap.peek().expect("heap never empty");
            return Err(EitError::QuadratureNonConvergence {
                lo: worst.lo.as_f64(),
                hi: worst.hi.as_f64(),
                error: worst.error.as_f64(),
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = (worst.lo + worst.hi) * T::lit(0.5);
        let left = gk15(&mut f, worst.lo, mid);
        let right = gk15(&mut f, mid, worst.hi);
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        total_mag = total_mag - worst.magnitude + left.magnitude + right.magnitude;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed accumulated cancellation from the running updates
    let mut value = zero;
    let mut error = T::zero();
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    Ok(Integral {
        value,
        error,
        intervals: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| cplx(x * x * x, 2.0 * x), 0.0, 2.0, 1e-12, 0.0, 100).unwrap();
        assert!((r.value.re - 4.0).abs() < 1e-14);
        assert!((r.value.im - 4.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_complex_exponential() {
        // int_0^10 exp(i 5 x) dx = (exp(50 i) - 1) / (5 i)
        let r = integrate(|x: f64| cplx(0.0, 5.0 * x).exp(), 0.0, 10.0, 1e-12, 0.0, 1000).unwrap();
        let exact = (cplx(0.0, 50.0f64).exp() - cplx(1.0, 0.0)) / cplx(0.0, 5.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn sharp_peak_needs_subdivision() {
        let r = integrate(|x: f64| cplx((-(1e4) * (x - 0.3).powi(2)).exp(), 0.0), 0.0, 1.0, 1e-10, 0.0, 1000)
            .unwrap();
        let exact = (std::f64::consts::PI / 1e4).sqrt();
        assert!((r.value.re - exact).abs() / exact < 1e-10);
        assert!(r.intervals > 1);
    }

    #[test]
    fn reports_worst_interval_on_failure() {
        let err = integrate(|x: f64| cplx(1.0 / x.abs().sqrt().max(1e-300), 0.0), -1.0, 1.0, 1e-14, 0.0, 4)
            .unwrap_err();
        assert!(matches!(err, EitError::QuadratureNonConvergence { .. }));
    }
}
