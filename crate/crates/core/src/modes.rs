//! Travelling-wave probe modes: envelope ODE coefficients, characteristic
//! roots, the group-velocity quadratic and the slow-light limit.
//!
//! A probe envelope `Ω(r, t) = f(r − k̂ v_g t)` travelling through the medium
//! obeys `Ω'' + ζ Ω' + ς Ω = 0` in time. Exponential modes
//! `exp(σ k̂·r + η t)` solve it when `η² + ζη + ς = 0`, and requiring
//! `v_g = −η/σ` closes the loop into a quadratic for `v_g`.

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::numerics::central_diff4;
use crate::numerics::quadratic::{solve_monic_complex, solve_real, QuadraticRoots};
use crate::params::{AtomParams, DerivedRates, FieldParams};
use crate::scalar::{re, Real};

/// Which characteristic root reproduces the selected group velocity through
/// `v_g = −η/σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaBranch {
    Plus,
    Minus,
    /// Neither root matches to 1e-6 relative.
    Neither,
}

/// Consistency and regime information that accompanies a solved mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiagnostics<T> {
    pub matched_branch: EtaBranch,
    /// `|−η/σ − v_g| / v_g` for the closer branch.
    pub branch_mismatch: T,
    /// `|ζ| / |ς|`; infinite when ς vanishes.
    pub zeta_over_varsigma: T,
    /// ς < 0 and a root with positive real part, i.e. a growing mode.
    pub growing_mode: bool,
}

/// Envelope coefficients, roots and group velocities of the probe modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeModeCoefficients<T> {
    pub zeta: Complex<T>,
    pub varsigma: Complex<T>,
    pub eta_plus: Complex<T>,
    pub eta_minus: Complex<T>,
    pub sigma: T,
    /// The retained (smaller subluminal) group velocity.
    pub v_g: T,
    pub v_g_plus: Complex<T>,
    pub v_g_minus: Complex<T>,
    pub k_hat_p: [T; 3],
    pub diagnostics: ModeDiagnostics<T>,
}

/// `ζ = λ + β/(1 − c/v_g)` and `ς = β γ_bc/(1 − c/v_g)`.
pub fn envelope_coefficients<T: Real>(
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    v_g: T,
) -> Result<(Complex<T>, Complex<T>)> {
    if v_g == T::zero() {
        return Err(EitError::InvalidParameter {
            name: "v_g",
            reason: "envelope coefficients are undefined for a stationary envelope".into(),
        });
    }
    if v_g == atom.c {
        return Err(EitError::Pole {
            what: "envelope coefficients (1 - c/v_g = 0)",
            location: v_g.as_f64(),
        });
    }
    let denom = T::one() - atom.c / v_g;
    let zeta = rates.lambda + rates.beta / denom;
    let varsigma = rates.beta * atom.gamma_bc / denom;
    Ok((re(zeta), re(varsigma)))
}

/// Roots of `x² + ζx + ς = 0`, labelled `η± = (−ζ ± √(ζ² − 4ς))/2`.
pub fn characteristic_roots<T: Real>(zeta: Complex<T>, varsigma: Complex<T>) -> (Complex<T>, Complex<T>) {
    solve_monic_complex(zeta, varsigma)
}

/// Both roots of `v² − ((β+λ+σc)/σ) v + (λσc + βγ_bc)/σ² = 0`.
///
/// A negative discriminant gives a complex pair, which callers should treat
/// as leaving the slow-light regime.
pub fn group_velocity_roots<T: Real>(
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    sigma: T,
) -> Result<QuadraticRoots<T>> {
    if sigma == T::zero() {
        return Err(EitError::InvalidParameter {
            name: "sigma",
            reason: "the group-velocity quadratic divides by sigma".into(),
        });
    }
    let (b, c) = group_velocity_coefficients(rates, atom, sigma);
    Ok(solve_real(T::one(), b, c))
}

/// Linear and constant coefficients of the monic group-velocity quadratic.
pub fn group_velocity_coefficients<T: Real>(
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    sigma: T,
) -> (T, T) {
    let DerivedRates { lambda, beta } = *rates;
    let c = atom.c;
    let b = -(beta + lambda + sigma * c) / sigma;
    let k = (lambda * sigma * c + beta * atom.gamma_bc) / (sigma * sigma);
    (b, k)
}

/// Relative residual of `v` in the group-velocity quadratic.
pub fn group_velocity_residual<T: Real>(
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    sigma: T,
    v: Complex<T>,
) -> T {
    let (b, c) = group_velocity_coefficients(rates, atom, sigma);
    let value = v * v + v * b + c;
    let scale = v.norm_sqr() + (v * b).norm() + c.abs();
    if scale == T::zero() {
        T::zero()
    } else {
        value.norm() / scale
    }
}

/// The smallest real root strictly inside `(0, c)`.
pub fn select_group_velocity<T: Real>(roots: &QuadraticRoots<T>, c: T) -> Result<T> {
    match *roots {
        QuadraticRoots::Complex { plus, .. } => Err(EitError::NoPhysicalMode(format!(
            "group-velocity roots are complex ({} ± {}i)",
            plus.re,
            plus.im.abs()
        ))),
        QuadraticRoots::Real { plus, minus } => {
            let inside = |v: T| v > T::zero() && v < c;
            match (inside(minus), inside(plus)) {
                (true, true) => Ok(minus.min(plus)),
                (true, false) => Ok(minus),
                (false, true) => Ok(plus),
                (false, false) => Err(EitError::NoPhysicalMode(format!(
                    "no root in (0, c): roots are {} and {}",
                    plus, minus
                ))),
            }
        }
    }
}

/// Solves the full mode problem for the given medium and field; the field
/// must carry `sigma`.
pub fn solve_probe_mode<T: Real>(
    atom: &AtomParams<T>,
    field: &FieldParams<T>,
    rates: &DerivedRates<T>,
) -> Result<ProbeModeCoefficients<T>> {
    let sigma = field.sigma()?;
    let roots = group_velocity_roots(rates, atom, sigma)?;
    let v_g = select_group_velocity(&roots, atom.c)?;
    let (zeta, varsigma) = envelope_coefficients(rates, atom, v_g)?;
    let (eta_plus, eta_minus) = characteristic_roots(zeta, varsigma);

    let mismatch = |eta: Complex<T>| (-eta / sigma - re(v_g)).norm() / v_g;
    let (mp, mm) = (mismatch(eta_plus), mismatch(eta_minus));
    let tol = T::lit(1e-6);
    let (matched_branch, branch_mismatch) = if mm <= mp {
        (if mm <= tol { EtaBranch::Minus } else { EtaBranch::Neither }, mm)
    } else {
        (if mp <= tol { EtaBranch::Plus } else { EtaBranch::Neither }, mp)
    };
    let zeta_over_varsigma = if varsigma.norm() == T::zero() {
        T::infinity()
    } else {
        zeta.norm() / varsigma.norm()
    };
    let growing_mode = eta_plus.re > T::zero() || eta_minus.re > T::zero();

    Ok(ProbeModeCoefficients {
        zeta,
        varsigma,
        eta_plus,
        eta_minus,
        sigma,
        v_g,
        v_g_plus: roots.plus(),
        v_g_minus: roots.minus(),
        k_hat_p: field.k_hat_p,
        diagnostics: ModeDiagnostics {
            matched_branch,
            branch_mismatch,
            zeta_over_varsigma,
            growing_mode,
        },
    })
}

/// Slow-light estimates of the retained group velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowLightEstimate<T> {
    /// `(λσc + βγ_bc) / (σ(β + λ + σc))`; needs σ.
    pub intermediate: Option<T>,
    /// `|Ω_c|² c / (2ω_pκ + |Ω_c|²)`.
    pub final_form: T,
    /// `(β+λ+σc)² / (4(λσc + βγ_bc))`; needs σ.
    pub regime_ratio: Option<T>,
    /// Set when the regime ratio is below 25, where the expansion is poor.
    pub regime_warning: bool,
}

/// Below this dominance ratio the slow-light expansion is flagged.
pub const SLOW_LIGHT_REGIME_RATIO: f64 = 25.0;

pub fn slow_light_vg<T: Real>(
    rates: &DerivedRates<T>,
    atom: &AtomParams<T>,
    field: &FieldParams<T>,
) -> SlowLightEstimate<T> {
    let omega_c2 = field.omega_c_rabi.norm_sqr();
    let drive = T::lit(2.0) * atom.omega_p * atom.kappa;
    let final_form = if drive + omega_c2 == T::zero() {
        atom.c
    } else {
        omega_c2 * atom.c / (drive + omega_c2)
    };
    let DerivedRates { lambda, beta } = *rates;
    let c = atom.c;
    let (intermediate, regime_ratio) = match field.sigma {
        Some(s) if s != T::zero() => {
            let b = beta + lambda + s * c;
            let k = lambda * s * c + beta * atom.gamma_bc;
            let ratio = if k == T::zero() {
                T::infinity()
            } else {
                b * b / (T::lit(4.0) * k)
            };
            (Some(k / (s * b)), Some(ratio))
        }
        _ => (None, None),
    };
    let regime_warning = regime_ratio.is_some_and(|r| r < T::lit(SLOW_LIGHT_REGIME_RATIO));
    SlowLightEstimate {
        intermediate,
        final_form,
        regime_ratio,
        regime_warning,
    }
}

fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Probe envelope as a superposition of the two modes, evaluated in
/// travelling-wave form `Σ amp · exp(σ k̂·(r − k̂ (−η/σ) t))`.
pub fn mode_envelope<T: Real>(
    mode: &ProbeModeCoefficients<T>,
    amp_plus: Complex<T>,
    amp_minus: Complex<T>,
    position: [T; 3],
    t: T,
) -> Complex<T> {
    let k = mode.k_hat_p;
    let s = mode.sigma;
    let term = |amp: Complex<T>, eta: Complex<T>| {
        let v = -eta / s;
        // σ k̂·(r − k̂ v t), with the complex displacement written out per axis
        let mut arg = Complex::new(T::zero(), T::zero());
        for i in 0..3 {
            arg += (re(position[i]) - v * (k[i] * t)) * k[i];
        }
        amp * (arg * s).exp()
    };
    term(amp_plus, mode.eta_plus) + term(amp_minus, mode.eta_minus)
}

/// The same envelope as [`mode_envelope`] written as a spatial profile times
/// a temporal exponential, `Σ amp · e^{σ k̂·r} · e^{η t}`.
pub fn mode_envelope_separable<T: Real>(
    mode: &ProbeModeCoefficients<T>,
    amp_plus: Complex<T>,
    amp_minus: Complex<T>,
    position: [T; 3],
    t: T,
) -> Complex<T> {
    let spatial = (mode.sigma * dot(mode.k_hat_p, position)).exp();
    (amp_plus * (mode.eta_plus * t).exp() + amp_minus * (mode.eta_minus * t).exp()) * spatial
}

/// A field with the derivatives the transport identity needs.
pub trait Envelope<T: Real> {
    fn value(&self, r: [T; 3], t: T) -> Complex<T>;
    /// `k̂·∇Ω` at `(r, t)`.
    fn directional_derivative(&self, r: [T; 3], t: T, k_hat: [T; 3]) -> Complex<T>;
    /// `∂Ω/∂t` at `(r, t)`.
    fn time_derivative(&self, r: [T; 3], t: T) -> Complex<T>;
}

/// Wraps a plain closure, supplying derivatives by fourth-order central
/// differences with the given spatial and temporal steps.
pub struct FiniteDifferenceEnvelope<F, T> {
    pub f: F,
    pub dr: T,
    pub dt: T,
}

impl<T: Real, F: Fn([T; 3], T) -> Complex<T>> Envelope<T> for FiniteDifferenceEnvelope<F, T> {
    fn value(&self, r: [T; 3], t: T) -> Complex<T> {
        (self.f)(r, t)
    }

    fn directional_derivative(&self, r: [T; 3], t: T, k_hat: [T; 3]) -> Complex<T> {
        let along = |s: T| (self.f)([r[0] + s * k_hat[0], r[1] + s * k_hat[1], r[2] + s * k_hat[2]], t);
        central_diff4(along, T::zero(), self.dr)
    }

    fn time_derivative(&self, r: [T; 3], t: T) -> Complex<T> {
        central_diff4(|s| (self.f)(r, s), t, self.dt)
    }
}

/// Checks `k̂·∇Ω + (1/v_g) ∂Ω/∂t = 0` at the sample points.
///
/// Returns the largest violation divided by the largest of the two terms
/// over all samples, so a travelling envelope scores near zero and a static
/// one scores one.
pub fn transport_identity_check<T: Real, E: Envelope<T>>(
    envelope: &E,
    v_g: T,
    k_hat: [T; 3],
    samples: &[([T; 3], T)],
) -> T {
    let mut worst = T::zero();
    let mut scale = T::zero();
    for &(r, t) in samples {
        let grad = envelope.directional_derivative(r, t, k_hat);
        let dt = envelope.time_derivative(r, t) / v_g;
        worst = worst.max((grad + dt).norm());
        scale = scale.max(grad.norm()).max(dt.norm());
    }
    if scale == T::zero() {
        T::zero()
    } else {
        worst / scale
    }
}
