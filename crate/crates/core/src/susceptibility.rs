//! Steady-state linear response of the EIT medium: the probe
//! susceptibility, refractive index and dispersive group velocity, and the
//! electric/magnetic pair that arises when the |c⟩–|b⟩ transition carries a
//! magnetic dipole.
//!
//! Sign convention: `χ(ω)` is written in the probe offset `Δ = ω − ω_ab`,
//! while the atomic detuning `delta_ab` enters the Bloch equations as
//! `ω_ab − ω`. The two agree through `delta_ab = −Δ`.

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::numerics::central_diff4;
use crate::numerics::fixed_point::{self, FixedPointMethod};
use crate::numerics::quadratic::solve_monic_complex;
use crate::params::AtomParams;
use crate::scalar::{cplx, i_unit, re, Real};

const POLE_THRESHOLD: f64 = 1e-30;

/// `χ` at probe offset `Δ = ω − ω_ab`:
/// `−κ(Δ + iγ_bc) / [(Δ + iγ_bc)(Δ + iγ_ab) − |Ω_c|²/4]`.
pub fn chi_at_detuning<T: Real>(delta: T, atom: &AtomParams<T>, omega_c: Complex<T>) -> Result<Complex<T>> {
    let bc = cplx(delta, atom.gamma_bc);
    let ab = cplx(delta, atom.gamma_ab);
    let den = bc * ab - omega_c.norm_sqr() / T::lit(4.0);
    if den.norm() < T::lit(POLE_THRESHOLD) {
        return Err(EitError::Pole {
            what: "susceptibility",
            location: (atom.omega_ab + delta).as_f64(),
        });
    }
    Ok(-bc * atom.kappa / den)
}

/// `χ(ω)` in the steady state.
pub fn chi_steady<T: Real>(omega: T, atom: &AtomParams<T>, omega_c: Complex<T>) -> Result<Complex<T>> {
    chi_at_detuning(omega - atom.omega_ab, atom, omega_c)
}

/// Refractive index and group velocity at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion<T> {
    pub n: Complex<T>,
    pub dn_domega: Complex<T>,
    /// `c / Re(n + ω dn/dω)`.
    pub v_g: T,
    /// The finite-difference step that was used.
    pub d_omega: T,
}

/// Step used for `dn/dω` when none is given: a hundredth of the EIT
/// linewidth scale (γ_bc, or the power-broadened width when γ_bc = 0).
pub fn default_d_omega<T: Real>(atom: &AtomParams<T>, omega_c: Complex<T>) -> T {
    let width = if atom.gamma_bc > T::zero() {
        atom.gamma_bc
    } else if omega_c.norm() > T::zero() && atom.gamma_ab > T::zero() {
        omega_c.norm_sqr() / (T::lit(4.0) * atom.gamma_ab)
    } else {
        atom.gamma_ab
    };
    width / T::lit(100.0)
}

/// `n = √(1 + χ)` (principal branch) and `v_g = c / Re(n + ω dn/dω)`, with
/// `dn/dω` from a fourth-order central difference in the probe offset.
pub fn refractive_index_and_vg<T: Real>(
    omega: T,
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    d_omega: Option<T>,
) -> Result<Dispersion<T>> {
    let h = d_omega.unwrap_or_else(|| default_d_omega(atom, omega_c));
    if !(h > T::zero()) || !h.is_finite() {
        return Err(EitError::InvalidParameter {
            name: "d_omega",
            reason: format!("finite-difference step must be positive, got {}", h),
        });
    }
    let delta0 = omega - atom.omega_ab;
    let index = |d: T| chi_at_detuning(d, atom, omega_c).map(|chi| (re(T::one()) + chi).sqrt());
    let n = index(delta0)?;
    // poles of χ in the complex Δ plane; one closer than 2h to the stencil
    // segment invalidates the difference quotient
    let two = T::lit(2.0);
    let (p1, p2) = solve_monic_complex(
        cplx(T::zero(), atom.gamma_ab + atom.gamma_bc),
        re(-atom.gamma_ab * atom.gamma_bc - omega_c.norm_sqr() / T::lit(4.0)),
    );
    for pole in [p1, p2] {
        let along = (pole.re - delta0).abs() - two * h;
        let dist = along.max(T::zero()).hypot(pole.im);
        if dist < two * h {
            return Err(EitError::PoleInStencil { omega: omega.as_f64() });
        }
    }
    let dn = central_diff4(|d| index(d).expect("stencil checked"), delta0, h);
    let v_g = atom.c / (n + dn * omega).re;
    Ok(Dispersion {
        n,
        dn_domega: dn,
        v_g,
        d_omega: h,
    })
}

/// Steady probe and ground-state coherences of the two-coherence system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyCoherences<T> {
    pub rho_ab: Complex<T>,
    pub rho_cb: Complex<T>,
}

fn gammas<T: Real>(atom: &AtomParams<T>) -> (Complex<T>, Complex<T>) {
    (
        cplx(atom.gamma_ab, atom.delta_ab),
        cplx(atom.gamma_bc, atom.delta_ab - atom.delta_ac),
    )
}

fn two_coherence_denominator<T: Real>(atom: &AtomParams<T>, omega_c: Complex<T>) -> Result<Complex<T>> {
    let (g_ab, g_bc) = gammas(atom);
    let d = g_ab * g_bc + omega_c.norm_sqr() / T::lit(4.0);
    if d.norm() < T::lit(POLE_THRESHOLD) {
        return Err(EitError::Pole {
            what: "two-coherence steady state",
            location: atom.delta_ab.as_f64(),
        });
    }
    Ok(d)
}

/// Right-hand side of the probe-coherence pair with the atoms held in |b⟩:
///
/// ```text
/// dρ_ab/dt = −Γ_ab ρ_ab + (i/2)(Ω_c ρ_cb + Ω_p)
/// dρ_cb/dt = −Γ_bc ρ_cb + (i/2) Ω_c* ρ_ab
/// ```
///
/// with `Γ_ab = γ_ab + iΔ_ab`, `Γ_bc = γ_bc + i(Δ_ab − Δ_ac)`.
pub fn two_coherence_rhs<T: Real>(
    rho_ab: Complex<T>,
    rho_cb: Complex<T>,
    atom: &AtomParams<T>,
    omega_p: Complex<T>,
    omega_c: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let (g_ab, g_bc) = gammas(atom);
    let half_i = i_unit::<T>() * T::lit(0.5);
    (
        -g_ab * rho_ab + half_i * (omega_c * rho_cb + omega_p),
        -g_bc * rho_cb + half_i * omega_c.conj() * rho_ab,
    )
}

/// Stationary point of [`two_coherence_rhs`]:
/// `ρ_ab = iΩ_pΓ_bc/(2D)`, `ρ_cb = −Ω_pΩ_c*/(4D)`, `D = Γ_abΓ_bc + |Ω_c|²/4`.
pub fn steady_two_coherence<T: Real>(
    atom: &AtomParams<T>,
    omega_p: Complex<T>,
    omega_c: Complex<T>,
) -> Result<SteadyCoherences<T>> {
    let d = two_coherence_denominator(atom, omega_c)?;
    let (_, g_bc) = gammas(atom);
    Ok(SteadyCoherences {
        rho_ab: i_unit::<T>() * omega_p * g_bc / (d * T::lit(2.0)),
        rho_cb: -omega_p * omega_c.conj() / (d * T::lit(4.0)),
    })
}

/// `ρ_cb = (i/2) Ω_c* ρ_ab / Γ_bc`.
pub fn rho_cb_ab_relation<T: Real>(rho_ab: Complex<T>, atom: &AtomParams<T>, omega_c: Complex<T>) -> Result<Complex<T>> {
    let (_, g_bc) = gammas(atom);
    if g_bc.norm() == T::zero() {
        return Err(EitError::DivisionByZero {
            parameter: "gamma_bc",
            context: "rho_cb/rho_ab relation needs gamma_bc or a two-photon detuning",
        });
    }
    Ok(i_unit::<T>() * T::lit(0.5) * omega_c.conj() * rho_ab / g_bc)
}

/// Electric susceptibility `χ_e = iκΓ_bc/D`.
pub fn chi_e<T: Real>(atom: &AtomParams<T>, omega_c: Complex<T>) -> Result<Complex<T>> {
    let d = two_coherence_denominator(atom, omega_c)?;
    let (_, g_bc) = gammas(atom);
    Ok(i_unit::<T>() * g_bc * atom.kappa / d)
}

/// Converged magnetic susceptibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiM<T> {
    pub chi_m: Complex<T>,
    pub iterations: usize,
    pub residual: T,
    pub method: FixedPointMethod,
    /// `(1 + χ_m)/(1 + χ_e)` lies within 1e-9 of the negative real axis,
    /// where the principal square root jumps.
    pub branch_cut_warning: bool,
}

/// Right-hand side of the implicit magnetic-susceptibility equation,
/// `r e^{−iφ} √((1+χ_m)/(1+χ_e)) · (i/2)(Ω_c*/Γ_bc) · χ_e`.
pub fn chi_m_rhs<T: Real>(chi_m: Complex<T>, chi_e: Complex<T>, atom: &AtomParams<T>, omega_c: Complex<T>) -> Complex<T> {
    let (_, g_bc) = gammas(atom);
    let one = re(T::one());
    let dipole = Complex::from_polar(atom.dipole_ratio, -atom.dipole_phase);
    dipole * ((one + chi_m) / (one + chi_e)).sqrt() * i_unit::<T>() * T::lit(0.5) * omega_c.conj() / g_bc * chi_e
}

/// Solves for `χ_m` by damped iteration from zero with a secant fallback.
pub fn chi_m_fixed_point<T: Real>(
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    tol: T,
    max_iter: usize,
) -> Result<ChiM<T>> {
    if !(tol >= T::lit(1e-14) && tol <= T::lit(1e-6)) {
        return Err(EitError::InvalidParameter {
            name: "tol",
            reason: format!("must lie in [1e-14, 1e-6], got {}", tol),
        });
    }
    let e = chi_e(atom, omega_c)?;
    let (_, g_bc) = gammas(atom);
    if g_bc.norm() == T::zero() {
        return Err(EitError::DivisionByZero {
            parameter: "gamma_bc",
            context: "magnetic susceptibility divides by gamma_bc + i(delta_ab - delta_ac)",
        });
    }
    let out = fixed_point::solve(|x| chi_m_rhs(x, e, atom, omega_c), re(T::zero()), tol, max_iter)?;
    let ratio = (re(T::one()) + out.value) / (re(T::one()) + e);
    let branch_cut_warning = ratio.re < T::zero() && ratio.im.abs() <= T::lit(1e-9) * ratio.norm();
    Ok(ChiM {
        chi_m: out.value,
        iterations: out.iterations,
        residual: out.residual,
        method: out.method,
        branch_cut_warning,
    })
}

/// Full steady response at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityResult<T> {
    pub omega: T,
    pub chi: Complex<T>,
    pub n: Complex<T>,
    pub chi_e: Complex<T>,
    pub chi_m: Complex<T>,
    pub eps_r: Complex<T>,
    pub mu_r: Complex<T>,
    pub v_g_dispersive: T,
    pub chi_m_iterations: usize,
    pub branch_cut_warning: bool,
}

/// Evaluates every response quantity at `omega`. The electric/magnetic pair
/// is taken at the probe detuning `ω_ab − ω` with the coupling detuning of
/// `atom`.
pub fn evaluate<T: Real>(
    omega: T,
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    d_omega: Option<T>,
    chi_m_tol: T,
) -> Result<SusceptibilityResult<T>> {
    let chi = chi_steady(omega, atom, omega_c)?;
    let disp = refractive_index_and_vg(omega, atom, omega_c, d_omega)?;
    let at_omega = AtomParams {
        delta_ab: atom.omega_ab - omega,
        ..*atom
    };
    let e = chi_e(&at_omega, omega_c)?;
    let m = chi_m_fixed_point(&at_omega, omega_c, chi_m_tol, 200)?;
    let one = re(T::one());
    Ok(SusceptibilityResult {
        omega,
        chi,
        n: disp.n,
        chi_e: e,
        chi_m: m.chi_m,
        eps_r: one + e,
        mu_r: one + m.chi_m,
        v_g_dispersive: disp.v_g,
        chi_m_iterations: m.iterations,
        branch_cut_warning: m.branch_cut_warning,
    })
}
