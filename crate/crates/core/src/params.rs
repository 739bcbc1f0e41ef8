//! Physical parameters of the three-level Λ medium and the derived rates
//! every other module builds on.
//!
//! Rates and frequencies are in s⁻¹ / rad s⁻¹ (SI). Because every formula
//! is homogeneous in the rates, the same types also serve a dimensionless
//! mode with `gamma_ab = 1` and `c = 1`; see [`canonical_dimensionless`].

use num_complex::Complex;

use crate::error::{EitError, Result};
use crate::scalar::Real;

/// Decay rates, detunings and coupling constants of the atomic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams<T> {
    /// Population decay rate of the excited level |a⟩.
    pub gamma_aa: T,
    /// Population decay rate of the ground level |b⟩.
    pub gamma_bb: T,
    /// Population decay rate of the ground level |c⟩.
    pub gamma_cc: T,
    /// Decay rate of the probe coherence ρ_ab.
    pub gamma_ab: T,
    /// Decay rate of the coupling coherence ρ_ac.
    pub gamma_ac: T,
    /// Dephasing rate of the ground-state coherence ρ_bc.
    pub gamma_bc: T,
    /// Probe detuning Δ_ab.
    pub delta_ab: T,
    /// Coupling detuning Δ_ac.
    pub delta_ac: T,
    /// |a⟩-|b⟩ transition angular frequency.
    pub omega_ab: T,
    /// Probe carrier angular frequency.
    pub omega_p: T,
    /// Composite coupling constant κ = N|p_ab|²/(ε₀ħ), s⁻¹.
    pub kappa: T,
    /// |m_cb / (p_ab c)|, the magnetic-to-electric dipole ratio.
    pub dipole_ratio: T,
    /// Phase of m_cb in radians (p_ab taken real).
    pub dipole_phase: T,
    /// Vacuum light speed.
    pub c: T,
    /// Atomic number density, m⁻³. Carried for reporting only; all physics
    /// goes through `kappa`.
    pub number_density: Option<T>,
}

impl<T: Real> AtomParams<T> {
    /// Two-photon detuning Δ_bc = Δ_ac − Δ_ab.
    #[inline]
    pub fn delta_bc(&self) -> T {
        self.delta_ac - self.delta_ab
    }

    pub fn has_zero_detuning(&self) -> bool {
        self.delta_ab == T::zero() && self.delta_ac == T::zero()
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma_aa", self.gamma_aa),
            ("gamma_bb", self.gamma_bb),
            ("gamma_cc", self.gamma_cc),
            ("gamma_ab", self.gamma_ab),
            ("gamma_ac", self.gamma_ac),
            ("gamma_bc", self.gamma_bc),
            ("kappa", self.kappa),
            ("dipole_ratio", self.dipole_ratio),
        ];
        for (name, v) in rates {
            non_negative(name, v)?;
        }
        for (name, v) in [
            ("delta_ab", self.delta_ab),
            ("delta_ac", self.delta_ac),
            ("omega_ab", self.omega_ab),
            ("omega_p", self.omega_p),
            ("dipole_phase", self.dipole_phase),
        ] {
            finite(name, v)?;
        }
        finite("c", self.c)?;
        if self.c <= T::zero() {
            return Err(EitError::InvalidParameter {
                name: "c",
                reason: format!("light speed must be positive, got {}", self.c),
            });
        }
        if let Some(n) = self.number_density {
            non_negative("number_density", n)?;
        }
        Ok(())
    }
}

/// Laser-field description: Rabi frequencies, mode shape and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams<T> {
    /// Coupling Rabi frequency Ω_c.
    pub omega_c_rabi: Complex<T>,
    /// Probe Rabi frequency amplitude Ω_p.
    pub omega_p_rabi: Complex<T>,
    /// Spatial shape parameter σ (m⁻¹) of the exponential probe modes. No
    /// default; a natural scale is the inverse pulse length.
    pub sigma: Option<T>,
    /// Unit propagation direction of the probe.
    pub k_hat_p: [T; 3],
}

impl<T: Real> FieldParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c_rabi", self.omega_c_rabi),
            ("omega_p_rabi", self.omega_p_rabi),
        ] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(EitError::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        if let Some(s) = self.sigma {
            finite("sigma", s)?;
        }
        let norm = self.k_hat_p.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b).sqrt();
        let tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
        if !((norm - T::one()).abs() <= tol) {
            return Err(EitError::InvalidParameter {
                name: "k_hat_p",
                reason: format!("propagation direction must be a unit vector, |k| = {}", norm),
            });
        }
        Ok(())
    }

    /// Whether the coupling dominates the probe, |Ω_c| ≥ 10 |Ω_p|. The
    /// adiabatic formulas assume this; callers warn when it fails.
    pub fn is_eit_regime(&self) -> bool {
        self.omega_c_rabi.norm() >= T::lit(10.0) * self.omega_p_rabi.norm()
    }

    pub fn sigma(&self) -> Result<T> {
        self.sigma.ok_or(EitError::MissingParameter("sigma"))
    }
}

/// Rates derived from the atom and coupling field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates<T> {
    /// λ = γ_bc + |Ω_c|²/(4γ_ab), the relaxation rate of the dark-state
    /// coherence.
    pub lambda: T,
    /// β = ω_p κ/(2γ_ab).
    pub beta: T,
}

/// Computes λ and β.
pub fn derive_rates<T: Real>(atom: &AtomParams<T>, field: &FieldParams<T>) -> Result<DerivedRates<T>> {
    derive_rates_with_coupling(atom, field.omega_c_rabi)
}

/// [`derive_rates`] for an explicit coupling Rabi frequency.
pub fn derive_rates_with_coupling<T: Real>(
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
) -> Result<DerivedRates<T>> {
    if atom.gamma_ab == T::zero() {
        return Err(EitError::DivisionByZero {
            parameter: "gamma_ab",
            context: "lambda and beta divide by the probe coherence decay rate",
        });
    }
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    Ok(DerivedRates {
        lambda: atom.gamma_bc + omega_c.norm_sqr() / (four * atom.gamma_ab),
        beta: atom.omega_p * atom.kappa / (two * atom.gamma_ab),
    })
}

/// Typical EIT experiment in SI units: γ_ab = Ω_c = 10⁸ s⁻¹,
/// γ_bc = 10⁶ s⁻¹, ω_p = 10¹⁵ s⁻¹, all detunings zero, κ = 10⁸ s⁻¹,
/// dipole ratio 10⁻².
///
/// Population decay: γ_aa = 2γ_ab with stable ground levels; γ_ac = γ_ab.
/// The probe is 0.1 Ω_c along +z and σ is left unset.
pub fn canonical_params<T: Real>() -> (AtomParams<T>, FieldParams<T>) {
    let g = T::lit(1e8);
    let atom = AtomParams {
        gamma_aa: T::lit(2e8),
        gamma_bb: T::zero(),
        gamma_cc: T::zero(),
        gamma_ab: g,
        gamma_ac: g,
        gamma_bc: T::lit(1e6),
        delta_ab: T::zero(),
        delta_ac: T::zero(),
        omega_ab: T::lit(1e15),
        omega_p: T::lit(1e15),
        kappa: T::lit(1e8),
        dipole_ratio: T::lit(1e-2),
        dipole_phase: T::zero(),
        c: T::lit(299_792_458.0),
        number_density: None,
    };
    let field = FieldParams {
        omega_c_rabi: Complex::new(g, T::zero()),
        omega_p_rabi: Complex::new(T::lit(1e7), T::zero()),
        sigma: None,
        k_hat_p: [T::zero(), T::zero(), T::one()],
    };
    (atom, field)
}

/// The canonical point in units of γ_ab with c = 1: Ω_c = 1, γ_bc = 0.01,
/// β = 1 (ω_p = 10⁶, κ = 2×10⁻⁶), σ = 1, probe 0.1.
pub fn canonical_dimensionless<T: Real>() -> (AtomParams<T>, FieldParams<T>) {
    let atom = AtomParams {
        gamma_aa: T::lit(2.0),
        gamma_bb: T::zero(),
        gamma_cc: T::zero(),
        gamma_ab: T::one(),
        gamma_ac: T::one(),
        gamma_bc: T::lit(0.01),
        delta_ab: T::zero(),
        delta_ac: T::zero(),
        omega_ab: T::lit(1e6),
        omega_p: T::lit(1e6),
        kappa: T::lit(2e-6),
        dipole_ratio: T::lit(1e-2),
        dipole_phase: T::zero(),
        c: T::one(),
        number_density: None,
    };
    let field = FieldParams {
        omega_c_rabi: Complex::new(T::one(), T::zero()),
        omega_p_rabi: Complex::new(T::lit(0.1), T::zero()),
        sigma: Some(T::one()),
        k_hat_p: [T::zero(), T::zero(), T::one()],
    };
    (atom, field)
}

fn finite<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(EitError::InvalidParameter {
            name,
            reason: format!("must be finite, got {}", v),
        })
    }
}

fn non_negative<T: Real>(name: &'static str, v: T) -> Result<()> {
    finite(name, v)?;
    if v < T::zero() {
        return Err(EitError::InvalidParameter {
            name,
            reason: format!("must be non-negative, got {}", v),
        });
    }
    Ok(())
}
