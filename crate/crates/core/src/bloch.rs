//! Three-level Bloch equations with detunings and phenomenological decay,
//! their numerical integration, and the on-resonance reduced system used to
//! check adiabatic states.
//!
//! The decay model is the anticommutator form with a diagonal decay matrix
//! plus independent coherence decay rates. It has no repopulation terms, so
//! the trace decays whenever an excited population decays.

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::numerics::ode::{Dopri5, StepStats};
use crate::params::AtomParams;
use crate::scalar::{i_unit, Real};

/// Index of an atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    A,
    B,
    C,
}

/// Hermitian 3×3 density matrix over the levels (a, b, c).
///
/// Only the upper triangle is stored; ρ_ji = ρ_ij* by construction and the
/// diagonal is real. The same type doubles as a tangent (dρ/dt).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityMatrix3<T> {
    pub aa: T,
    pub bb: T,
    pub cc: T,
    pub ab: Complex<T>,
    pub ac: Complex<T>,
    pub bc: Complex<T>,
}

impl<T: Real> DensityMatrix3<T> {
    pub fn zero() -> Self {
        Self {
            aa: T::zero(),
            bb: T::zero(),
            cc: T::zero(),
            ab: Complex::new(T::zero(), T::zero()),
            ac: Complex::new(T::zero(), T::zero()),
            bc: Complex::new(T::zero(), T::zero()),
        }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(aa: T, bb: T, cc: T) -> Self {
        Self {
            aa,
            bb,
            cc,
            ..Self::zero()
        }
    }

    /// All population in |b⟩: the dark state with no probe.
    pub fn dark_state() -> Self {
        Self::diagonal(T::zero(), T::one(), T::zero())
    }

    pub fn ba(&self) -> Complex<T> {
        self.ab.conj()
    }
    pub fn ca(&self) -> Complex<T> {
        self.ac.conj()
    }
    pub fn cb(&self) -> Complex<T> {
        self.bc.conj()
    }

    pub fn element(&self, row: Level, col: Level) -> Complex<T> {
        use Level::*;
        let real = |x: T| Complex::new(x, T::zero());
        match (row, col) {
            (A, A) => real(self.aa),
            (B, B) => real(self.bb),
            (C, C) => real(self.cc),
            (A, B) => self.ab,
            (A, C) => self.ac,
            (B, C) => self.bc,
            (B, A) => self.ab.conj(),
            (C, A) => self.ac.conj(),
            (C, B) => self.bc.conj(),
        }
    }

    /// Full matrix, rows and columns ordered (a, b, c).
    pub fn to_matrix(&self) -> [[Complex<T>; 3]; 3] {
        use Level::*;
        let levels = [A, B, C];
        let mut m = [[Complex::new(T::zero(), T::zero()); 3]; 3];
        for (i, &r) in levels.iter().enumerate() {
            for (j, &c) in levels.iter().enumerate() {
                m[i][j] = self.element(r, c);
            }
        }
        m
    }

    pub fn trace(&self) -> T {
        self.aa + self.bb + self.cc
    }

    pub fn to_array(&self) -> [T; 9] {
        [
            self.aa, self.bb, self.cc, self.ab.re, self.ab.im, self.ac.re, self.ac.im, self.bc.re,
            self.bc.im,
        ]
    }

    pub fn from_array(y: &[T; 9]) -> Self {
        Self {
            aa: y[0],
            bb: y[1],
            cc: y[2],
            ab: Complex::new(y[3], y[4]),
            ac: Complex::new(y[5], y[6]),
            bc: Complex::new(y[7], y[8]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Time derivative of ρ under the full Bloch equations in the rotating
/// frame.
pub fn bloch_rhs<T: Real>(
    rho: &DensityMatrix3<T>,
    atom: &AtomParams<T>,
    omega_p: Complex<T>,
    omega_c: Complex<T>,
) -> DensityMatrix3<T> {
    let i = i_unit::<T>();
    let half_i = i * T::lit(0.5);
    let inv_pop_ab = rho.bb - rho.aa;
    let inv_pop_ac = rho.cc - rho.aa;

    let aa = (omega_p.conj() * rho.ab + omega_c.conj() * rho.ac).im - atom.gamma_aa * rho.aa;
    let ab = -i * atom.delta_ab * rho.ab + half_i * (omega_c * rho.cb() + omega_p * inv_pop_ab)
        - rho.ab * atom.gamma_ab;
    let ac = -i * atom.delta_ac * rho.ac + half_i * (omega_p * rho.bc + omega_c * inv_pop_ac)
        - rho.ac * atom.gamma_ac;
    let bb = (omega_p * rho.ba()).im - atom.gamma_bb * rho.bb;
    let bc = -i * atom.delta_bc() * rho.bc + half_i * (omega_p.conj() * rho.ac - omega_c * rho.ba())
        - rho.bc * atom.gamma_bc;
    let cc = (omega_c * rho.ca()).im - atom.gamma_cc * rho.cc;

    DensityMatrix3 {
        aa,
        bb,
        cc,
        ab,
        ac,
        bc,
    }
}

/// Sampled solution of the Bloch equations.
#[derive(Debug, Clone)]
pub struct BlochTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix3<T>>,
    pub stats: StepStats,
}

/// Integrates the Bloch equations with the adaptive Dormand-Prince 5(4)
/// pair, returning dense output at `sample_times`.
///
/// `tol` is the accuracy asked of the state; steps are controlled to a
/// local error of `tol/10` (relative and absolute) so that the error
/// accumulated over many oscillation periods stays near `tol`. The state is checked after every accepted step;
/// populations outside `[-1e-6, 1 + 1e-6]` or a trace above its initial
/// value by more than `1e-6` abort with [`EitError::InvariantViolation`].
pub fn integrate_bloch<T, P, C>(
    rho0: DensityMatrix3<T>,
    atom: &AtomParams<T>,
    omega_p: P,
    omega_c: C,
    t_span: (T, T),
    tol: T,
    sample_times: &[T],
) -> Result<BlochTrajectory<T>>
where
    T: Real,
    P: Fn(T) -> Complex<T>,
    C: Fn(T) -> Complex<T>,
{
    let (t0, t1) = t_span;
    if !(t0 < t1) {
        return Err(EitError::Precondition(format!(
            "t_span must satisfy start < end, got ({}, {})",
            t0, t1
        )));
    }
    if !(tol >= T::lit(1e-12) && tol <= T::lit(1e-3)) {
        return Err(EitError::InvalidParameter {
            name: "tol",
            reason: format!("must lie in [1e-12, 1e-3], got {}", tol),
        });
    }
    if sample_times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(EitError::Precondition("sample times must be strictly increasing".into()));
    }
    if let (Some(&first), Some(&last)) = (sample_times.first(), sample_times.last()) {
        if first < t0 || last > t1 {
            return Err(EitError::Precondition("sample times must lie inside t_span".into()));
        }
    }
    atom.validate()?;

    let slack = T::lit(1e-6);
    let trace0 = rho0.trace();
    let check = |t: T, y: &[T; 9]| -> Result<()> {
        let rho = DensityMatrix3::from_array(y);
        if !rho.is_finite() {
            return Err(EitError::InvariantViolation {
                t: t.as_f64(),
                detail: "non-finite state".into(),
            });
        }
        for (name, p) in [("rho_aa", rho.aa), ("rho_bb", rho.bb), ("rho_cc", rho.cc)] {
            if p < -slack || p > T::one() + slack {
                return Err(EitError::InvariantViolation {
                    t: t.as_f64(),
                    detail: format!("{} = {} outside [0, 1]", name, p),
                });
            }
        }
        if rho.trace() > trace0 + slack {
            return Err(EitError::InvariantViolation {
                t: t.as_f64(),
                detail: format!("trace grew from {} to {}", trace0, rho.trace()),
            });
        }
        Ok(())
    };

    let rhs = |t: T, y: &[T; 9]| {
        let rho = DensityMatrix3::from_array(y);
        bloch_rhs(&rho, atom, omega_p(t), omega_c(t)).to_array()
    };

    let local = tol * T::lit(0.1);
    let solver = Dopri5::new(local, local);
    let out = solver.integrate(rhs, t0, rho0.to_array(), t1, sample_times, check)?;
    Ok(BlochTrajectory {
        times: out.times,
        states: out.states.iter().map(DensityMatrix3::from_array).collect(),
        stats: out.stats,
    })
}

/// Residuals of the on-resonance adiabatic system.
///
/// The rows whose left-hand side vanishes under the adiabatic
/// approximation are reported as residuals (`aa`, `ab`, `ac`, `cc`); the
/// two rows that keep a time derivative are reported as derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedResiduals<T> {
    pub aa: T,
    pub ab: Complex<T>,
    pub ac: Complex<T>,
    pub cc: T,
    pub d_bb: T,
    pub d_bc: Complex<T>,
}

impl<T: Real> ReducedResiduals<T> {
    /// Largest magnitude among the four algebraic residuals.
    pub fn max_algebraic(&self) -> T {
        self.aa
            .abs()
            .max(self.ab.norm())
            .max(self.ac.norm())
            .max(self.cc.abs())
    }
}

/// Evaluates the reduced resonant system for `rho`. Requires zero
/// detunings.
pub fn reduced_resonant_rhs<T: Real>(
    rho: &DensityMatrix3<T>,
    atom: &AtomParams<T>,
    omega_p: Complex<T>,
    omega_c: Complex<T>,
) -> Result<ReducedResiduals<T>> {
    if !atom.has_zero_detuning() {
        return Err(EitError::Precondition(format!(
            "reduced resonant system needs zero detunings, got delta_ab = {}, delta_ac = {}",
            atom.delta_ab, atom.delta_ac
        )));
    }
    // at zero detuning the full right-hand side is exactly the reduced one
    let full = bloch_rhs(rho, atom, omega_p, omega_c);
    Ok(ReducedResiduals {
        aa: full.aa,
        ab: full.ab,
        ac: full.ac,
        cc: full.cc,
        d_bb: full.bb,
        d_bc: full.bc,
    })
}

/// Diagnostic for γ_aa ρ_aa + γ_cc ρ_cc ≈ 0 over the second half of a
/// trajectory: the maximum of
/// |γ_aa ρ_aa + γ_cc ρ_cc| / (γ_aa |ρ_aa| + γ_cc |ρ_cc| + ε).
///
/// With non-negative populations the relation can only hold when both
/// terms are small, so values near one are the expected honest outcome for
/// any populated run; the number is a diagnostic, not a pass/fail check.
pub fn population_ratio_check<T: Real>(traj: &BlochTrajectory<T>, atom: &AtomParams<T>) -> T {
    let (Some(&first), Some(&last)) = (traj.times.first(), traj.times.last()) else {
        return T::zero();
    };
    let mid = first + (last - first) * T::lit(0.5);
    let eps = T::min_positive_value();
    traj.times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= mid)
        .map(|(_, rho)| {
            let num = (atom.gamma_aa * rho.aa + atom.gamma_cc * rho.cc).abs();
            let den = atom.gamma_aa * rho.aa.abs() + atom.gamma_cc * rho.cc.abs() + eps;
            num / den
        })
        .fold(T::zero(), T::max)
}
