//! Cross-module consistency checks, run as one report.
//!
//! Every check compares two independently coded routes to the same
//! quantity. Negative controls run a check outside its regime and are
//! expected to fail.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adiabatic::{chi_resonant, rho_ab_quadrature, rho_bc_quadrature, DriveDerivative};
use crate::bloch::{integrate_bloch, DensityMatrix3};
use crate::error::Result;
use crate::maxwell::{measure_group_velocity, propagate, CouplingModel, Grid1D, PropagationRecord, PropagationSettings, VelocityFit};
use crate::modes::slow_light_vg;
use crate::params::{canonical_dimensionless, derive_rates_with_coupling, AtomParams, FieldParams};
use crate::scalar::{cplx, re, rel_diff};
use crate::susceptibility::{chi_e, chi_steady, refractive_index_and_vg};

/// Seed for the random parameter draws.
pub const DRAW_SEED: u64 = 0x5EED_E17;

/// Whether a check is meant to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    /// Negative control: run outside the regime, should exceed tolerance.
    ExpectedFail,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub claim: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    /// `residual <= tolerance`.
    pub passed: bool,
    pub expectation: Expectation,
    pub runtime_s: f64,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(
        name: &'static str,
        claim: &'static str,
        residual: f64,
        tolerance: f64,
        expectation: Expectation,
        started: Instant,
        notes: Vec<String>,
    ) -> Self {
        Self {
            name,
            claim,
            residual,
            tolerance,
            passed: residual <= tolerance,
            expectation,
            runtime_s: started.elapsed().as_secs_f64(),
            notes,
        }
    }

    fn errored(name: &'static str, claim: &'static str, tolerance: f64, expectation: Expectation, started: Instant, err: String) -> Self {
        Self::new(name, claim, f64::INFINITY, tolerance, expectation, started, vec![err])
    }

    /// The outcome matches the expectation.
    pub fn as_expected(&self) -> bool {
        self.passed == (self.expectation == Expectation::Pass)
    }
}

/// Adiabatic and full Bloch coherences under a constant probe.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticComparison {
    pub times: Vec<f64>,
    pub bloch_bc: Vec<Complex<f64>>,
    pub bloch_ab: Vec<Complex<f64>>,
    pub adiabatic_bc: Vec<Complex<f64>>,
    pub adiabatic_ab: Vec<Complex<f64>>,
    /// Largest `|Δρ_bc|` in the comparison window over the peak `|ρ_bc|`.
    pub bc_error: f64,
    pub ab_error: f64,
}

impl AdiabaticComparison {
    pub fn residual(&self) -> f64 {
        self.bc_error.max(self.ab_error)
    }
}

/// Runs both descriptions from the dark state with the probe switched on
/// at `t = 0` and compares them over `[5/λ, 50/λ]`.
///
/// The step switch-on is carried into the adiabatic ρ_ab as its initial
/// value `iΩ_p/(2γ_ab)`. Peaks are taken over the whole run.
pub fn compare_adiabatic_with_bloch(
    atom: &AtomParams<f64>,
    omega_c: Complex<f64>,
    omega_p: Complex<f64>,
    samples: usize,
) -> Result<AdiabaticComparison> {
    let rates = derive_rates_with_coupling(atom, omega_c)?;
    let t_end = 50.0 / rates.lambda;
    let window_start = 5.0 / rates.lambda;
    let times: Vec<f64> = (0..=samples).map(|k| t_end * k as f64 / samples as f64).collect();

    let traj = integrate_bloch(
        DensityMatrix3::dark_state(),
        atom,
        |_| omega_p,
        |_| omega_c,
        (0.0, t_end),
        1e-10,
        &times,
    )?;
    let bloch_bc: Vec<_> = traj.states.iter().map(|r| r.bc).collect();
    let bloch_ab: Vec<_> = traj.states.iter().map(|r| r.ab).collect();

    let zero_derivative = |_t: f64| re(0.0);
    let derivative = DriveDerivative::Analytic(&zero_derivative);
    let ab0 = cplx(0.0, 0.5 / atom.gamma_ab) * omega_p;
    let mut adiabatic_bc = Vec::with_capacity(times.len());
    let mut adiabatic_ab = Vec::with_capacity(times.len());
    for &t in &times {
        adiabatic_bc.push(rho_bc_quadrature(|_| omega_p, &rates, omega_c, atom.gamma_ab, re(0.0), t)?);
        adiabatic_ab.push(rho_ab_quadrature(
            |_| omega_p,
            &derivative,
            &rates,
            atom.gamma_ab,
            atom.gamma_bc,
            ab0,
            t,
        )?);
    }

    let error = |reference: &[Complex<f64>], model: &[Complex<f64>]| {
        let peak = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let worst = times
            .iter()
            .zip(reference.iter().zip(model))
            .filter(|(t, _)| **t >= window_start)
            .map(|(_, (a, b))| (a - b).norm())
            .fold(0.0, f64::max);
        if peak > 0.0 {
            worst / peak
        } else {
            worst
        }
    };
    let bc_error = error(&bloch_bc, &adiabatic_bc);
    let ab_error = error(&bloch_ab, &adiabatic_ab);
    Ok(AdiabaticComparison {
        times,
        bloch_bc,
        bloch_ab,
        adiabatic_bc,
        adiabatic_ab,
        bc_error,
        ab_error,
    })
}

const ADIABATIC_CLAIM: &str = "adiabatic coherences track the full Bloch solution within 5% of peak for |Omega_p| <= 0.1 |Omega_c|";

fn adiabatic_check(name: &'static str, probe_ratio: f64, expectation: Expectation) -> CheckReport {
    let started = Instant::now();
    let (atom, field) = canonical_dimensionless::<f64>();
    let omega_p = field.omega_c_rabi * probe_ratio;
    match compare_adiabatic_with_bloch(&atom, field.omega_c_rabi, omega_p, 2000) {
        Ok(cmp) => CheckReport::new(
            name,
            ADIABATIC_CLAIM,
            cmp.residual(),
            0.05,
            expectation,
            started,
            vec![format!(
                "rho_bc error {:.4} of peak, rho_ab error {:.4} of peak",
                cmp.bc_error, cmp.ab_error
            )],
        ),
        Err(e) => CheckReport::errored(name, ADIABATIC_CLAIM, 0.05, expectation, started, e.to_string()),
    }
}

/// Canonical point, `Ω_p = 0.1 Ω_c`.
pub fn check_adiabatic_vs_numeric() -> CheckReport {
    adiabatic_check("adiabatic_vs_numeric", 0.1, Expectation::Pass)
}

/// `Ω_p = Ω_c`, outside the adiabatic regime.
pub fn check_adiabatic_negative_control() -> CheckReport {
    adiabatic_check("adiabatic_vs_numeric_negative_control", 1.0, Expectation::ExpectedFail)
}

/// A random valid medium for the resonance chain; one draw in five has
/// γ_bc = 0.
pub fn random_resonant_draw(rng: &mut ChaCha8Rng) -> (AtomParams<f64>, FieldParams<f64>) {
    let (atom, field) = canonical_dimensionless::<f64>();
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.gen_range(lo.ln()..hi.ln())).exp();
    let gamma_bc = if rng.gen_bool(0.2) {
        0.0
    } else {
        log_uniform(rng, 1e-4, 1.0)
    };
    let atom = AtomParams {
        gamma_ab: log_uniform(rng, 0.1, 10.0),
        gamma_bc,
        kappa: log_uniform(rng, 1e-3, 10.0),
        omega_ab: log_uniform(rng, 1.0, 1e6),
        ..atom
    };
    let omega_c = Complex::from_polar(log_uniform(rng, 0.05, 20.0), rng.gen_range(-3.1..3.1));
    (atom, FieldParams { omega_c_rabi: omega_c, ..field })
}

/// Largest pairwise relative difference among the three resonant
/// susceptibility routes.
pub fn resonance_chain_residual(atom: &AtomParams<f64>, field: &FieldParams<f64>) -> Result<f64> {
    let a = chi_resonant(atom, field);
    let b = chi_steady(atom.omega_ab, atom, field.omega_c_rabi)?;
    let c = chi_e(atom, field.omega_c_rabi)?;
    Ok(rel_diff(a, b).max(rel_diff(b, c)).max(rel_diff(a, c)))
}

const RESONANCE_CLAIM: &str = "resonant susceptibility from the adiabatic limit, the frequency-dependent formula and the electric part agree";

pub fn check_resonance_chain() -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DRAW_SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (atom, field) = random_resonant_draw(&mut rng);
        match resonance_chain_residual(&atom, &field) {
            Ok(r) => worst = worst.max(r),
            Err(e) => {
                return CheckReport::errored("resonance_chain", RESONANCE_CLAIM, 1e-12, Expectation::Pass, started, e.to_string())
            }
        }
    }
    CheckReport::new(
        "resonance_chain",
        RESONANCE_CLAIM,
        worst,
        1e-12,
        Expectation::Pass,
        started,
        vec![format!("100 draws, seed {:#x}", DRAW_SEED)],
    )
}

/// Slow-light final form and the dispersive group velocity at line centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgComparison {
    pub final_form: f64,
    pub dispersive: f64,
    pub relative: f64,
}

pub fn vg_consistency(atom: &AtomParams<f64>, field: &FieldParams<f64>) -> Result<VgComparison> {
    let rates = derive_rates_with_coupling(atom, field.omega_c_rabi)?;
    let final_form = slow_light_vg(&rates, atom, field).final_form;
    let dispersive = refractive_index_and_vg(atom.omega_ab, atom, field.omega_c_rabi, None)?.v_g;
    Ok(VgComparison {
        final_form,
        dispersive,
        relative: (dispersive - final_form).abs() / final_form,
    })
}

/// Unit medium (γ_ab = Ω_c = c = 1, ω_p = ω_ab = 10⁶) with
/// `2ω_pκ = ratio · |Ω_c|²`.
pub fn vg_medium(ratio: f64, gamma_bc: f64) -> (AtomParams<f64>, FieldParams<f64>) {
    let (atom, field) = canonical_dimensionless::<f64>();
    let atom = AtomParams {
        gamma_bc,
        kappa: ratio / (2.0 * atom.omega_p),
        ..atom
    };
    (atom, FieldParams { sigma: None, ..field })
}

/// Dominance ratios and dephasing rates over which the dispersive check
/// is asserted: the final form neglects γ_bc against |Ω_c|²/(4γ_ab).
pub const VG_RATIOS: [f64; 4] = [10.0, 100.0, 1e4, 1e6];
pub const VG_GAMMA_BC: [f64; 2] = [0.0, 1e-3];

const VG_CLAIM: &str = "slow-light group velocity agrees with c / (n + omega dn/domega) from the susceptibility when 2 omega_p kappa >= 10 |Omega_c|^2";

pub fn check_vg_consistency() -> CheckReport {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for &g in &VG_GAMMA_BC {
        for &ratio in &VG_RATIOS {
            let (atom, field) = vg_medium(ratio, g);
            match vg_consistency(&atom, &field) {
                Ok(cmp) => worst = worst.max(cmp.relative),
                Err(e) => return CheckReport::errored("vg_consistency", VG_CLAIM, 0.05, Expectation::Pass, started, e.to_string()),
            }
        }
    }
    for (label, ratio, g) in [
        ("marginal 2 omega_p kappa = 3 |Omega_c|^2", 3.0, 0.0),
        ("gamma_bc = 0.01 gamma_ab at ratio 1e4", 1e4, 0.01),
        ("vacuum", 0.0, 0.01),
    ] {
        if let Ok(cmp) = vg_consistency(&vg_medium(ratio, g).0, &vg_medium(ratio, g).1) {
            notes.push(format!(
                "{}: final form {:.6e}, dispersive {:.6e}, relative {:.4}",
                label, cmp.final_form, cmp.dispersive, cmp.relative
            ));
        }
    }
    CheckReport::new("vg_consistency", VG_CLAIM, worst, 0.05, Expectation::Pass, started, notes)
}

/// Desk-scale slow-light propagation: unit medium with `γ_bc = 0`,
/// `2ω_pκ = ratio·|Ω_c|²`, a Gaussian probe of width 20 centred at t = 100
/// entering a column of length 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowLightSetup {
    pub ratio: f64,
    pub n_cells: usize,
    pub coupling: CouplingModel,
    pub probe_amplitude: f64,
}

impl SlowLightSetup {
    pub const LENGTH: f64 = 100.0;
    pub const PULSE_CENTER: f64 = 100.0;
    pub const PULSE_WIDTH: f64 = 20.0;

    pub fn new(ratio: f64, n_cells: usize, coupling: CouplingModel) -> Self {
        Self {
            ratio,
            n_cells,
            coupling,
            probe_amplitude: 0.01,
        }
    }

    pub fn medium(&self) -> (AtomParams<f64>, FieldParams<f64>) {
        vg_medium(self.ratio, 0.0)
    }

    /// The final-form group velocity `c/(1 + ratio)`.
    pub fn expected_velocity(&self) -> f64 {
        let (atom, field) = self.medium();
        let rates = derive_rates_with_coupling(&atom, field.omega_c_rabi).expect("unit medium is valid");
        slow_light_vg(&rates, &atom, &field).final_form
    }

    pub fn run(&self) -> Result<(PropagationRecord<f64>, VelocityFit<f64>)> {
        let (atom, field) = self.medium();
        let v = self.expected_velocity();
        let t_end = Self::PULSE_CENTER + Self::LENGTH / v + 5.0 * Self::PULSE_WIDTH;
        let grid = Grid1D::new(Self::LENGTH, self.n_cells, 1.0, atom.c)?;
        let settings = PropagationSettings {
            grid,
            t_end,
            coupling: self.coupling,
            snapshot_every: usize::MAX,
            source_substeps: 1,
        };
        let amp = self.probe_amplitude;
        let inflow = |t: f64| re(amp * (-((t - Self::PULSE_CENTER) / Self::PULSE_WIDTH).powi(2)).exp());
        let record = propagate(&settings, &atom, field.omega_c_rabi, inflow)?;
        let fit = measure_group_velocity(&record, (0.2 * Self::LENGTH, 0.8 * Self::LENGTH))?;
        Ok((record, fit))
    }
}

const PULSE_CLAIM: &str = "pulse peak travels at the slow-light group velocity";

fn pulse_check(name: &'static str, setup: SlowLightSetup, tolerance: f64) -> CheckReport {
    let started = Instant::now();
    let expected = setup.expected_velocity();
    match setup.run() {
        Ok((_, fit)) => CheckReport::new(
            name,
            PULSE_CLAIM,
            (fit.velocity - expected).abs() / expected,
            tolerance,
            Expectation::Pass,
            started,
            vec![format!(
                "fitted {:.6} +/- {:.2e} over {} samples, expected {:.6}",
                fit.velocity, fit.stderr, fit.samples, expected
            )],
        ),
        Err(e) => CheckReport::errored(name, PULSE_CLAIM, tolerance, Expectation::Pass, started, e.to_string()),
    }
}

/// The `v_g = c/4` setup.
pub fn check_pulse_delay() -> CheckReport {
    pulse_check("pulse_delay", SlowLightSetup::new(3.0, 400, CouplingModel::FullBloch), 0.05)
}

/// The `v_g = c/10` setup.
pub fn check_pulse_delay_tenth() -> CheckReport {
    pulse_check("pulse_delay_tenth", SlowLightSetup::new(9.0, 400, CouplingModel::FullBloch), 0.05)
}

/// No atoms: the peak moves at c.
pub fn check_pulse_delay_vacuum() -> CheckReport {
    pulse_check("pulse_delay_vacuum", SlowLightSetup::new(0.0, 200, CouplingModel::FullBloch), 1e-3)
}

/// Every check, run in parallel and sorted by name.
pub fn run_all() -> Vec<CheckReport> {
    let checks: Vec<fn() -> CheckReport> = vec![
        check_adiabatic_vs_numeric,
        check_adiabatic_negative_control,
        check_resonance_chain,
        check_vg_consistency,
        check_pulse_delay,
        check_pulse_delay_tenth,
        check_pulse_delay_vacuum,
    ];
    let mut reports: Vec<CheckReport> = checks.par_iter().map(|f| f()).collect();
    reports.sort_by(|a, b| a.name.cmp(b.name));
    reports
}
