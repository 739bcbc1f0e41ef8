//! Explicit Runge-Kutta integrators on fixed-size real state vectors.
//!
//! [`Dopri5`] is the Dormand-Prince 5(4) embedded pair with PI step-size
//! control and the 4th-order continuous extension of Hairer, Norsett and
//! Wanner. [`rk4_step`] is a plain classical RK4 step used by the
//! fixed-step propagation scheme.

use crate::error::{EitError, Result};
use crate::scalar::Real;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step statistics of an adaptive run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Samples produced by [`Dopri5::integrate`].
#[derive(Debug, Clone)]
pub struct DenseSamples<T, const N: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
    pub stats: StepStats,
}

/// Dormand-Prince 5(4) integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub h_max: Option<T>,
    pub max_steps: usize,
    safety: T,
    fac_min: T,
    fac_max: T,
    beta: T,
}

impl<T: Real> Dopri5<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            h_max: None,
            max_steps: 1_000_000,
            safety: T::lit(0.9),
            fac_min: T::lit(0.2),
            fac_max: T::lit(10.0),
            beta: T::lit(0.04),
        }
    }

    pub fn with_h_max(mut self, h_max: T) -> Self {
        self.h_max = Some(h_max);
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    fn error_norm<const N: usize>(&self, y0: &[T; N], y1: &[T; N], err: &[T; N]) -> T {
        let mut sum = T::zero();
        for i in 0..N {
            let sk = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            let r = err[i] / sk;
            sum += r * r;
        }
        (sum / T::from_count(N)).sqrt()
    }

    fn initial_step<const N: usize, F>(&self, f: &mut F, t0: T, y0: &[T; N], f0: &[T; N], span: T) -> T
    where
        F: FnMut(T, &[T; N]) -> [T; N],
    {
        let d0 = self.error_norm(y0, y0, y0);
        let d1 = self.error_norm(y0, y0, f0);
        let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
            T::lit(1e-6) * span
        } else {
            T::lit(0.01) * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = axpy(y0, h0, f0);
        let f1 = f(t0 + h0, &y1);
        let diff = axpy(&f1, -T::one(), f0);
        let d2 = self.error_norm(y0, y0, &diff) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= T::lit(1e-15) {
            (h0 * T::lit(1e-3)).max(T::lit(1e-6) * span)
        } else {
            (T::lit(0.01) / dmax).powf(T::lit(0.2))
        };
        (T::lit(100.0) * h0).min(h1).min(span)
    }

    /// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, returning the
    /// state at each entry of `sample_times` (sorted, inside `[t0, t_end]`).
    ///
    /// `check` is called after every accepted step and may abort the run.
    pub fn integrate<const N: usize, F, C>(
        &self,
        mut f: F,
        t0: T,
        y0: [T; N],
        t_end: T,
        sample_times: &[T],
        mut check: C,
    ) -> Result<DenseSamples<T, N>>
    where
        F: FnMut(T, &[T; N]) -> [T; N],
        C: FnMut(T, &[T; N]) -> Result<()>,
    {
        if !(t_end > t0) {
            return Err(EitError::Precondition(format!(
                "time span must be increasing, got [{}, {}]",
                t0, t_end
            )));
        }
        let span = t_end - t0;
        let mut stats = StepStats::default();
        let mut out_t = Vec::with_capacity(sample_times.len());
        let mut out_y = Vec::with_capacity(sample_times.len());
        let mut next_sample = 0usize;

        // samples sitting exactly at the start
        while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
            out_t.push(sample_times[next_sample]);
            out_y.push(y0);
            next_sample += 1;
        }

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        stats.evaluations += 1;
        let mut h = self.initial_step(&mut f, t, &y, &k1, span);
        stats.evaluations += 1;
        if let Some(hm) = self.h_max {
            h = h.min(hm);
        }
        let mut fac_old = T::lit(1e-4);
        let expo1 = T::lit(0.2) - self.beta * T::lit(0.75);
        let mut last_rejected = false;
        let eps = T::epsilon();

        let c = |x: f64| T::lit(x);

        while t < t_end {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(EitError::StepSizeUnderflow {
                    t: t.as_f64(),
                    h: h.as_f64(),
                });
            }
            if h < T::lit(10.0) * eps * t.abs().max(span) {
                return Err(EitError::StepSizeUnderflow {
                    t: t.as_f64(),
                    h: h.as_f64(),
                });
            }
            let finishing = t + h * T::lit(1.01) >= t_end;
            if finishing {
                h = t_end - t;
            }

            let y2 = comb(&y, h, &[(c(A21), &k1)]);
            let k2 = f(t + c(C2) * h, &y2);
            let y3 = comb(&y, h, &[(c(A31), &k1), (c(A32), &k2)]);
            let k3 = f(t + c(C3) * h, &y3);
            let y4 = comb(&y, h, &[(c(A41), &k1), (c(A42), &k2), (c(A43), &k3)]);
            let k4 = f(t + c(C4) * h, &y4);
            let y5 = comb(
                &y,
                h,
                &[(c(A51), &k1), (c(A52), &k2), (c(A53), &k3), (c(A54), &k4)],
            );
            let k5 = f(t + c(C5) * h, &y5);
            let y6 = comb(
                &y,
                h,
                &[
                    (c(A61), &k1),
                    (c(A62), &k2),
                    (c(A63), &k3),
                    (c(A64), &k4),
                    (c(A65), &k5),
                ],
            );
            let k6 = f(t + h, &y6);
            let y_new = comb(
                &y,
                h,
                &[
                    (c(A71), &k1),
                    (c(A73), &k3),
                    (c(A74), &k4),
                    (c(A75), &k5),
                    (c(A76), &k6),
                ],
            );
            let t_new = if finishing { t_end } else { t + h };
            let k7 = f(t_new, &y_new);
            stats.evaluations += 6;

            let err_vec = comb(
                &[T::zero(); N],
                h,
                &[
                    (c(E1), &k1),
                    (c(E3), &k3),
                    (c(E4), &k4),
                    (c(E5), &k5),
                    (c(E6), &k6),
                    (c(E7), &k7),
                ],
            );
            let err = self.error_norm(&y, &y_new, &err_vec);
            if !err.is_finite() {
                // shrink hard and retry
                stats.rejected += 1;
                h = h * T::lit(0.1);
                last_rejected = true;
                continue;
            }

            let fac11 = err.powf(expo1);
            if err <= T::one() {
                stats.accepted += 1;
                let ydiff = axpy(&y_new, -T::one(), &y);
                let bspl = axpy(&scale(&k1, h), -T::one(), &ydiff);
                let mut r4 = axpy(&ydiff, -h, &k7);
                r4 = axpy(&r4, -T::one(), &bspl);
                let r5 = comb(
                    &[T::zero(); N],
                    h,
                    &[
                        (c(D1), &k1),
                        (c(D3), &k3),
                        (c(D4), &k4),
                        (c(D5), &k5),
                        (c(D6), &k6),
                        (c(D7), &k7),
                    ],
                );
                while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                    let ts = sample_times[next_sample];
                    let theta = (ts - t) / (t_new - t);
                    let theta1 = T::one() - theta;
                    let mut ys = [T::zero(); N];
                    for i in 0..N {
                        ys[i] = y[i]
                            + theta
                                * (ydiff[i]
                                    + theta1
                                        * (bspl[i] + theta * (r4[i] + theta1 * r5[i])));
                    }
                    out_t.push(ts);
                    out_y.push(ys);
                    next_sample += 1;
                }

                t = t_new;
                y = y_new;
                k1 = k7;
                check(t, &y)?;

                let mut fac = fac11 / fac_old.powf(self.beta);
                fac_old = err.max(T::lit(1e-4));
                fac = (fac / self.safety)
                    .max(T::one() / self.fac_max)
                    .min(T::one() / self.fac_min);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                if let Some(hm) = self.h_max {
                    h_new = h_new.min(hm);
                }
                last_rejected = false;
                h = h_new;
            } else {
                stats.rejected += 1;
                let fac = (fac11 / self.safety).min(T::one() / self.fac_min);
                h = h / fac;
                last_rejected = true;
            }
        }

        Ok(DenseSamples {
            times: out_t,
            states: out_y,
            stats,
        })
    }
}

/// One classical RK4 step of size `h`.
pub fn rk4_step<T: Real, const N: usize, F>(mut f: F, t: T, y: &[T; N], h: T) -> [T; N]
where
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let half = h * T::lit(0.5);
    let k1 = f(t, y);
    let k2 = f(t + half, &axpy(y, half, &k1));
    let k3 = f(t + half, &axpy(y, half, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let mut out = *y;
    for i in 0..N {
        out[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<T: Real, const N: usize>(y: &[T; N], a: T, x: &[T; N]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}

#[inline]
fn scale<T: Real, const N: usize>(x: &[T; N], a: T) -> [T; N] {
    let mut out = *x;
    for v in out.iter_mut() {
        *v *= a;
    }
    out
}

#[inline]
fn comb<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (a, k) in terms {
        let ah = *a * h;
        for i in 0..N {
            out[i] += ah * k[i];
        }
    }
    out
}
