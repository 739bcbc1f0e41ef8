//! Damped fixed-point iteration for complex scalar equations `x = g(x)`,
//! with a secant fallback on `x - g(x) = 0`.

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    Iteration,
    Secant,
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOutcome<T> {
    pub value: Complex<T>,
    pub iterations: usize,
    /// `|x - g(x)|` at the returned value.
    pub residual: T,
    pub method: FixedPointMethod,
}

/// Solves `x = g(x)` starting from `x0`.
///
/// The returned value satisfies `|x - g(x)| <= tol`. Plain iteration is
/// damped by one half once an update grows; if half the iteration budget
/// passes without convergence, a secant solve takes over.
pub fn solve<T: Real, G: FnMut(Complex<T>) -> Complex<T>>(
    mut g: G,
    x0: Complex<T>,
    tol: T,
    max_iter: usize,
) -> Result<FixedPointOutcome<T>> {
    let half = T::lit(0.5);
    let mut x = x0;
    let mut damping = T::one();
    let mut prev_step = T::infinity();
    let fp_budget = (max_iter / 2).max(1);
    let mut last_residual = T::infinity();

    for k in 1..=fp_budget {
        let step = g(x) - x;
        let residual = step.norm();
        if !residual.is_finite() {
            break;
        }
        last_residual = residual;
        if residual <= tol {
            return Ok(FixedPointOutcome {
                value: x,
                iterations: k,
                residual,
                method: FixedPointMethod::Iteration,
            });
        }
        if residual > prev_step {
            damping = half;
        }
        prev_step = residual;
        x += step * damping;
    }

    // secant on F(x) = x - g(x), restarting from the last good iterate
    let mut f = |z: Complex<T>| z - g(z);
    let mut x_prev = if x.re.is_finite() && x.im.is_finite() { x } else { x0 };
    let mut f_prev = f(x_prev);
    let nudge = Complex::new(tol.sqrt().max(T::lit(1e-6)), T::zero());
    let mut x_cur = x_prev + nudge;
    let mut f_cur = f(x_cur);
    for k in (fp_budget + 1)..=max_iter {
        let residual = f_cur.norm();
        last_residual = residual;
        if residual <= tol {
            return Ok(FixedPointOutcome {
                value: x_cur,
                iterations: k,
                residual,
                method: FixedPointMethod::Secant,
            });
        }
        let denom = f_cur - f_prev;
        if denom.norm() == T::zero() || !residual.is_finite() {
            break;
        }
        let x_next = x_cur - f_cur * (x_cur - x_prev) / denom;
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x_next;
        f_cur = f(x_cur);
    }

    Err(EitError::NonConvergence {
        iterations: max_iter,
        residual: last_residual.as_f64(),
        last_re: x_cur.re.as_f64(),
        last_im: x_cur.im.as_f64(),
    })
}
