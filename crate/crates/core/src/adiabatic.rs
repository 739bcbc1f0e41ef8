//! Adiabatic coherences of the resonant Λ system.
//!
//! With the atoms held near |b⟩ and `|dρ/dt| ≪ |Ω_c|`, the fast coherences
//! follow the fields algebraically and the slow ones obey first-order
//! linear equations relaxing at `λ = γ_bc + |Ω_c|²/(4γ_ab)`:
//!
//! ```text
//! dρ_bc/dt = −λ ρ_bc − Ω_p* Ω_c / (4γ_ab)
//! dρ_ba/dt = −λ ρ_ba + (1/(2iγ_ab)) (dΩ_p*/dt + γ_bc Ω_p*)
//! ```
//!
//! The coupling field is taken constant throughout this module.

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::modes::ProbeModeCoefficients;
use crate::numerics::central_diff4;
use crate::numerics::quadrature::integrate_with_breaks;
use crate::params::{AtomParams, DerivedRates, FieldParams};
use crate::scalar::{cplx, exprel, i_unit, re, Real};

/// Relative tolerance of every quadrature in this module.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 4000;

/// How a [`CoherenceSolution`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMethod {
    Quadrature,
    ClosedForm,
    LongTimeLimit,
}

/// Coherence time series.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSolution<T> {
    pub times: Vec<T>,
    pub rho_bc: Vec<Complex<T>>,
    pub rho_ba: Vec<Complex<T>>,
    pub rho_ab: Vec<Complex<T>>,
    pub method: CoherenceMethod,
}

fn require_coupling<T: Real>(omega_c: Complex<T>) -> Result<()> {
    if omega_c.norm() == T::zero() {
        return Err(EitError::DivisionByZero {
            parameter: "omega_c",
            context: "the adiabatic relations need a nonzero coupling field (EIT regime)",
        });
    }
    Ok(())
}

/// `ρ_cb = −(Ω_p + 2iγ_ab ρ_ab)/Ω_c`.
pub fn rho_cb_from_rho_ab<T: Real>(
    rho_ab: Complex<T>,
    omega_p: Complex<T>,
    omega_c: Complex<T>,
    gamma_ab: T,
) -> Result<Complex<T>> {
    require_coupling(omega_c)?;
    Ok(-(omega_p + i_unit::<T>() * rho_ab * (T::lit(2.0) * gamma_ab)) / omega_c)
}

/// `ρ_ba = 2i(dρ_bc/dt + γ_bc ρ_bc)/Ω_c`.
pub fn rho_ba_from_rho_bc<T: Real>(
    rho_bc: Complex<T>,
    rho_bc_derivative: Complex<T>,
    omega_c: Complex<T>,
    gamma_bc: T,
) -> Result<Complex<T>> {
    require_coupling(omega_c)?;
    Ok(cplx(T::zero(), T::lit(2.0)) * (rho_bc_derivative + rho_bc * gamma_bc) / omega_c)
}

/// Time derivative of the probe envelope, needed by the ρ_ba quadrature.
pub enum DriveDerivative<'a, T> {
    /// Exact derivative supplied by the caller.
    Analytic(&'a dyn Fn(T) -> Complex<T>),
    /// Fourth-order central difference with this step.
    CentralDifference(T),
}

impl<T: Real> DriveDerivative<'_, T> {
    fn eval<P: Fn(T) -> Complex<T>>(&self, omega_p: &P, t: T) -> Complex<T> {
        match self {
            DriveDerivative::Analytic(d) => d(t),
            DriveDerivative::CentralDifference(h) => central_diff4(omega_p, t, *h),
        }
    }
}

/// Solution at `t` of `dy/dt = −λ y + s(t)`, `y(0) = y0`:
/// `y0 e^{−λt} + ∫₀ᵗ s(t') e^{λ(t'−t)} dt'`.
///
/// The kernel is integrated in shifted form so that nothing overflows for
/// large `λt`; the last `40/λ` before `t`, where the kernel has support, is
/// pre-split into pieces of width `4/λ`.
pub fn relax<T: Real, S: Fn(T) -> Complex<T>>(lambda: T, source: S, y0: Complex<T>, t: T) -> Result<Complex<T>> {
    if !(t >= T::zero()) {
        return Err(EitError::InvalidParameter {
            name: "t",
            reason: format!("time must be non-negative, got {}", t),
        });
    }
    let homogeneous = y0 * (-lambda * t).exp();
    if t == T::zero() {
        return Ok(y0);
    }
    let breaks = kernel_breaks(lambda, t);
    let integral = integrate_with_breaks(
        |s| source(s) * (lambda * (s - t)).exp(),
        &breaks,
        T::lit(QUADRATURE_REL_TOL),
        T::zero(),
        MAX_INTERVALS,
    )?;
    Ok(homogeneous + integral.value)
}

fn kernel_breaks<T: Real>(lambda: T, t: T) -> Vec<T> {
    let width = T::lit(4.0) / lambda;
    let support = T::lit(40.0) / lambda;
    if !(lambda > T::zero()) || !width.is_finite() {
        return vec![T::zero(), t];
    }
    let start = (t - support).max(T::zero());
    let mut breaks = vec![T::zero()];
    if start > T::zero() {
        breaks.push(start);
    }
    let n = ((t - start) / width).ceil().to_usize().unwrap_or(1).clamp(1, 10);
    for k in 1..=n {
        breaks.push(start + (t - start) * T::from_count(k) / T::from_count(n));
    }
    breaks
}

/// ρ_bc(t) under a constant coupling field, by quadrature.
pub fn rho_bc_quadrature<T: Real, P: Fn(T) -> Complex<T>>(
    omega_p: P,
    rates: &DerivedRates<T>,
    omega_c: Complex<T>,
    gamma_ab: T,
    rho_bc0: Complex<T>,
    t: T,
) -> Result<Complex<T>> {
    let k = omega_c / (T::lit(4.0) * gamma_ab);
    relax(rates.lambda, |s| -omega_p(s).conj() * k, rho_bc0, t)
}

/// `1/(2iγ_ab)`.
fn half_inverse_i<T: Real>(gamma_ab: T) -> Complex<T> {
    cplx(T::zero(), -T::one() / (T::lit(2.0) * gamma_ab))
}

/// ρ_ba(t) by quadrature.
pub fn rho_ba_quadrature<T: Real, P: Fn(T) -> Complex<T>>(
    omega_p: P,
    derivative: &DriveDerivative<'_, T>,
    rates: &DerivedRates<T>,
    gamma_ab: T,
    gamma_bc: T,
    rho_ba0: Complex<T>,
    t: T,
) -> Result<Complex<T>> {
    let k = half_inverse_i(gamma_ab);
    relax(
        rates.lambda,
        |s| (derivative.eval(&omega_p, s).conj() + omega_p(s).conj() * gamma_bc) * k,
        rho_ba0,
        t,
    )
}

/// ρ_ab(t) by quadrature: the conjugate equation, driven by `Ω_p` itself.
pub fn rho_ab_quadrature<T: Real, P: Fn(T) -> Complex<T>>(
    omega_p: P,
    derivative: &DriveDerivative<'_, T>,
    rates: &DerivedRates<T>,
    gamma_ab: T,
    gamma_bc: T,
    rho_ab0: Complex<T>,
    t: T,
) -> Result<Complex<T>> {
    let k = half_inverse_i(gamma_ab).conj();
    relax(
        rates.lambda,
        |s| (derivative.eval(&omega_p, s) + omega_p(s) * gamma_bc) * k,
        rho_ab0,
        t,
    )
}

/// All three coherences at the requested times by quadrature; `ρ_ab` starts
/// from `conj(ρ_ba(0))`.
#[allow(clippy::too_many_arguments)]
pub fn quadrature_coherences<T: Real, P: Fn(T) -> Complex<T>>(
    omega_p: P,
    derivative: &DriveDerivative<'_, T>,
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    rho_bc0: Complex<T>,
    rho_ba0: Complex<T>,
    times: &[T],
) -> Result<CoherenceSolution<T>> {
    let mut sol = empty(times, CoherenceMethod::Quadrature);
    for &t in times {
        sol.rho_bc
            .push(rho_bc_quadrature(&omega_p, rates, omega_c, atom.gamma_ab, rho_bc0, t)?);
        sol.rho_ba.push(rho_ba_quadrature(
            &omega_p,
            derivative,
            rates,
            atom.gamma_ab,
            atom.gamma_bc,
            rho_ba0,
            t,
        )?);
        sol.rho_ab.push(rho_ab_quadrature(
            &omega_p,
            derivative,
            rates,
            atom.gamma_ab,
            atom.gamma_bc,
            rho_ba0.conj(),
            t,
        )?);
    }
    Ok(sol)
}

fn empty<T: Real>(times: &[T], method: CoherenceMethod) -> CoherenceSolution<T> {
    CoherenceSolution {
        times: times.to_vec(),
        rho_bc: Vec::with_capacity(times.len()),
        rho_ba: Vec::with_capacity(times.len()),
        rho_ab: Vec::with_capacity(times.len()),
        method,
    }
}

/// `∫₀ᵗ e^{a s} e^{λ(s−t)} ds = (e^{at} − e^{−λt})/(a + λ)`, continuous
/// through `a = −λ` where it becomes `t e^{−λt}`.
fn mode_response<T: Real>(a: Complex<T>, lambda: T, t: T) -> Complex<T> {
    let x = (a + re(lambda)) * t;
    if x.norm() < T::lit(1e-3) {
        exprel(x) * (t * (-lambda * t).exp())
    } else {
        ((a * t).exp() - re((-lambda * t).exp())) / (a + re(lambda))
    }
}

/// Closed-form coherences driven by the two probe modes at `position`,
/// `Ω_p(t) = Σ± Ω̃± e^{η± t}` with `Ω̃± = amp± e^{σ k̂·r}`.
///
/// The degenerate denominator `η + λ = 0` is handled through its limit.
#[allow(clippy::too_many_arguments)]
pub fn explicit_coherences<T: Real>(
    mode: &ProbeModeCoefficients<T>,
    amp_plus: Complex<T>,
    amp_minus: Complex<T>,
    position: [T; 3],
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    rho_bc0: Complex<T>,
    rho_ba0: Complex<T>,
    times: &[T],
) -> Result<CoherenceSolution<T>> {
    if atom.gamma_ab == T::zero() {
        return Err(EitError::DivisionByZero {
            parameter: "gamma_ab",
            context: "adiabatic coherences",
        });
    }
    let k = mode.k_hat_p;
    let spatial = (mode.sigma * (k[0] * position[0] + k[1] * position[1] + k[2] * position[2])).exp();
    let modes = [
        (amp_plus * spatial, mode.eta_plus),
        (amp_minus * spatial, mode.eta_minus),
    ];
    let lambda = rates.lambda;
    let bc_factor = -omega_c / (T::lit(4.0) * atom.gamma_ab);
    let ba_factor = half_inverse_i(atom.gamma_ab);

    let mut sol = empty(times, CoherenceMethod::ClosedForm);
    for &t in times {
        let decay = (-lambda * t).exp();
        let mut bc = rho_bc0 * decay;
        let mut ba = rho_ba0 * decay;
        for &(amp, eta) in &modes {
            let g = mode_response(eta.conj(), lambda, t) * amp.conj();
            bc += bc_factor * g;
            ba += ba_factor * (eta.conj() + re(atom.gamma_bc)) * g;
        }
        sol.rho_bc.push(bc);
        sol.rho_ba.push(ba);
        sol.rho_ab.push(ba.conj());
    }
    Ok(sol)
}

/// Late-time ρ_ba for a slowly varying `+` mode:
/// `−(i/2) γ_bc/(γ_ab γ_bc + |Ω_c|²/4) · conj(Ω̃₊)`, i.e. `(γ_bc/λ) conj(Ω̃₊)/(2iγ_ab)`.
pub fn rho_ba_longtime<T: Real>(
    omega_p_plus: Complex<T>,
    rates: &DerivedRates<T>,
    gamma_ab: T,
    gamma_bc: T,
) -> Complex<T> {
    if gamma_bc == T::zero() {
        return re(T::zero());
    }
    half_inverse_i(gamma_ab) * omega_p_plus.conj() * (gamma_bc / rates.lambda)
}

/// Resonant susceptibility `κ iγ_bc/(γ_ab γ_bc + |Ω_c|²/4)`.
pub fn chi_resonant<T: Real>(atom: &AtomParams<T>, field: &FieldParams<T>) -> Complex<T> {
    if atom.gamma_bc == T::zero() {
        return re(T::zero());
    }
    let denom = atom.gamma_ab * atom.gamma_bc + field.omega_c_rabi.norm_sqr() / T::lit(4.0);
    cplx(T::zero(), atom.kappa * atom.gamma_bc / denom)
}
