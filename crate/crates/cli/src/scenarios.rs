//! One function per scenario kind. Each returns tables and summary blocks;
//! nothing here touches the filesystem.

use eit_core::adiabatic::{
    chi_resonant, explicit_coherences, quadrature_coherences, rho_ba_longtime, CoherenceSolution, DriveDerivative,
};
use eit_core::maxwell::{coupling_field_checker, measure_group_velocity, propagate, CouplingModel, Grid1D, PropagationSettings};
use eit_core::modes::{group_velocity_residual, mode_envelope_separable, slow_light_vg, solve_probe_mode, ProbeModeCoefficients};
use eit_core::susceptibility::{chi_e, chi_steady, evaluate, refractive_index_and_vg, steady_two_coherence};
use eit_core::{derive_rates, integrate_bloch, population_ratio_check, AtomParamsF64, DensityMatrix3, DerivedRatesF64, FieldParamsF64};
use num_complex::Complex64 as C;
use serde_json::{json, Map, Value};

use crate::config::{complex, Coupling, ProbeEnvelope, ScenarioConfig, ScenarioKind};
use crate::error::CliError;
use crate::output::{cjson, RunOutput, Table};

struct Setup {
    atom: AtomParamsF64,
    field: FieldParamsF64,
    rates: DerivedRatesF64,
    mode: Option<ProbeModeCoefficients<f64>>,
}

/// Runs a single (non-sweep) scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let atom = config.atom_params();
    let field = config.field_params();
    let rates = derive_rates(&atom, &field)?;
    let mut out = RunOutput {
        tables: Vec::new(),
        derived: Map::new(),
        results: Map::new(),
        warnings: Vec::new(),
    };
    if !field.is_eit_regime() {
        out.warnings
            .push("|omega_c| < 10 |omega_p|: outside the regime the adiabatic formulas assume".into());
    }
    let mode = derived_block(&atom, &field, &rates, &mut out);
    let setup = Setup { atom, field, rates, mode };
    match config.scenario {
        ScenarioKind::Bloch => bloch(config, &setup, &mut out)?,
        ScenarioKind::Adiabatic => adiabatic(config, &setup, &mut out)?,
        ScenarioKind::Modes => modes(&setup, &mut out)?,
        ScenarioKind::ChiSweep => chi_sweep(config, &setup, &mut out)?,
        ScenarioKind::Propagate => propagation(config, &setup, &mut out)?,
        ScenarioKind::Sweep => {
            return Err(CliError::Config("a sweep config is run through the sweep driver".into()))
        }
    }
    Ok(out)
}

/// λ, β, the resonant susceptibilities and, when σ is set, the mode
/// coefficients. Failures here become warnings; the scenario decides what
/// it actually needs.
fn derived_block(
    atom: &AtomParamsF64,
    field: &FieldParamsF64,
    rates: &DerivedRatesF64,
    out: &mut RunOutput,
) -> Option<ProbeModeCoefficients<f64>> {
    let d = &mut out.derived;
    d.insert("lambda".into(), json!(rates.lambda));
    d.insert("beta".into(), json!(rates.beta));
    d.insert("chi_resonant".into(), cjson(chi_resonant(atom, field)));
    match chi_steady(atom.omega_ab, atom, field.omega_c_rabi) {
        Ok(chi) => d.insert("chi_steady_center".into(), cjson(chi)),
        Err(e) => d.insert("chi_steady_center".into(), Value::String(e.to_string())),
    };
    match chi_e(atom, field.omega_c_rabi) {
        Ok(chi) => d.insert("chi_e".into(), cjson(chi)),
        Err(e) => d.insert("chi_e".into(), Value::String(e.to_string())),
    };
    let slow = slow_light_vg(rates, atom, field);
    d.insert("v_g_final_form".into(), json!(slow.final_form));
    d.insert("v_g_intermediate".into(), json!(slow.intermediate));
    d.insert("slow_light_regime_ratio".into(), json!(slow.regime_ratio));
    if slow.regime_warning {
        out.warnings.push("slow-light dominance ratio below 25: the final form is a poor estimate".into());
    }
    field.sigma?;
    match solve_probe_mode(atom, field, rates) {
        Ok(mode) => {
            let d = &mut out.derived;
            d.insert("zeta".into(), cjson(mode.zeta));
            d.insert("varsigma".into(), cjson(mode.varsigma));
            d.insert("eta_plus".into(), cjson(mode.eta_plus));
            d.insert("eta_minus".into(), cjson(mode.eta_minus));
            d.insert("v_g".into(), json!(mode.v_g));
            d.insert("v_g_plus".into(), cjson(mode.v_g_plus));
            d.insert("v_g_minus".into(), cjson(mode.v_g_minus));
            if mode.diagnostics.growing_mode {
                out.warnings.push("a probe mode grows in time".into());
            }
            Some(mode)
        }
        Err(e) => {
            out.warnings.push(format!("probe modes: {e}"));
            None
        }
    }
}

fn default_t_end(config: &ScenarioConfig, setup: &Setup) -> f64 {
    config.numerics.t_end.unwrap_or_else(|| {
        if setup.rates.lambda > 0.0 {
            50.0 / setup.rates.lambda
        } else {
            50.0 / setup.atom.gamma_ab.max(f64::MIN_POSITIVE)
        }
    })
}

fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|k| t_end * k as f64 / (samples - 1) as f64).collect()
}

/// The probe Rabi frequency and its time derivative at `t`.
type Drive = Box<dyn Fn(f64) -> (C, C) + Sync>;

fn drive(config: &ScenarioConfig, setup: &Setup) -> Result<Drive, CliError> {
    let amp = setup.field.omega_p_rabi;
    Ok(match config.field.probe_envelope {
        ProbeEnvelope::Constant => Box::new(move |_| (amp, C::new(0.0, 0.0))),
        ProbeEnvelope::Gaussian { center, width } => Box::new(move |t| {
            let x = (t - center) / width;
            let g = amp * (-x * x).exp();
            (g, g * (-2.0 * x / width))
        }),
        ProbeEnvelope::Modes { amp_plus, amp_minus, position } => {
            let mode = setup.mode.ok_or_else(|| {
                CliError::Config("probe_envelope kind `modes` needs field.sigma and a physical probe mode".into())
            })?;
            let (ap, am) = (complex(amp_plus) * amp, complex(amp_minus) * amp);
            Box::new(move |t| {
                let v = mode_envelope_separable(&mode, ap, am, position, t);
                let dv = mode_envelope_separable(&mode, ap * mode.eta_plus, am * mode.eta_minus, position, t);
                (v, dv)
            })
        }
    })
}

fn bloch(config: &ScenarioConfig, setup: &Setup, out: &mut RunOutput) -> Result<(), CliError> {
    let n = &config.numerics;
    let t_end = default_t_end(config, setup);
    let times = sample_times(t_end, n.samples);
    let drive = drive(config, setup)?;
    let [aa, bb, cc] = n.initial_populations;
    let omega_c = setup.field.omega_c_rabi;
    let traj = integrate_bloch(
        DensityMatrix3::diagonal(aa, bb, cc),
        &setup.atom,
        |t| drive(t).0,
        |_| omega_c,
        (0.0, t_end),
        n.tolerance,
        &times,
    )?;
    let mut table = Table::new(
        "bloch.csv",
        &[
            "t", "rho_aa", "rho_bb", "rho_cc", "re_rho_ab", "im_rho_ab", "re_rho_ac", "im_rho_ac", "re_rho_bc", "im_rho_bc",
            "trace",
        ],
    );
    for (t, r) in traj.times.iter().zip(&traj.states) {
        table.push_numbers(&[*t, r.aa, r.bb, r.cc, r.ab.re, r.ab.im, r.ac.re, r.ac.im, r.bc.re, r.bc.im, r.trace()]);
    }
    let last = traj.states.last().expect("at least two samples");
    let res = &mut out.results;
    res.insert("t_end".into(), json!(t_end));
    res.insert("final_populations".into(), json!([last.aa, last.bb, last.cc]));
    res.insert("final_rho_ab".into(), cjson(last.ab));
    res.insert("final_rho_bc".into(), cjson(last.bc));
    res.insert("final_trace".into(), json!(last.trace()));
    res.insert("steps_accepted".into(), json!(traj.stats.accepted));
    res.insert("steps_rejected".into(), json!(traj.stats.rejected));
    res.insert("population_ratio_residual".into(), json!(population_ratio_check(&traj, &setup.atom)));
    out.tables.push(table);
    Ok(())
}

fn adiabatic(config: &ScenarioConfig, setup: &Setup, out: &mut RunOutput) -> Result<(), CliError> {
    let n = &config.numerics;
    let t_end = default_t_end(config, setup);
    let times = sample_times(t_end, n.samples);
    let omega_c = setup.field.omega_c_rabi;
    let (bc0, ba0) = (complex(n.initial_rho_bc), complex(n.initial_rho_ba));
    let drive = drive(config, setup)?;
    let sol: CoherenceSolution<f64> = match (&config.field.probe_envelope, setup.mode) {
        (ProbeEnvelope::Modes { amp_plus, amp_minus, position }, Some(mode)) => {
            let amp = setup.field.omega_p_rabi;
            explicit_coherences(
                &mode,
                complex(*amp_plus) * amp,
                complex(*amp_minus) * amp,
                *position,
                &setup.rates,
                &setup.atom,
                omega_c,
                bc0,
                ba0,
                &times,
            )?
        }
        _ => {
            let derivative = |t: f64| drive(t).1;
            let d = DriveDerivative::Analytic(&derivative);
            quadrature_coherences(|t| drive(t).0, &d, &setup.rates, &setup.atom, omega_c, bc0, ba0, &times)?
        }
    };
    let mut table = Table::new(
        "adiabatic.csv",
        &["t", "re_omega_p", "im_omega_p", "re_rho_bc", "im_rho_bc", "re_rho_ba", "im_rho_ba", "re_rho_ab", "im_rho_ab"],
    );
    for (k, &t) in sol.times.iter().enumerate() {
        let p = drive(t).0;
        let (bc, ba, ab) = (sol.rho_bc[k], sol.rho_ba[k], sol.rho_ab[k]);
        table.push_numbers(&[t, p.re, p.im, bc.re, bc.im, ba.re, ba.im, ab.re, ab.im]);
    }
    let last = sol.times.len() - 1;
    let res = &mut out.results;
    res.insert("method".into(), json!(format!("{:?}", sol.method)));
    res.insert("t_end".into(), json!(t_end));
    res.insert("final_rho_bc".into(), cjson(sol.rho_bc[last]));
    res.insert("final_rho_ba".into(), cjson(sol.rho_ba[last]));
    res.insert("final_rho_ab".into(), cjson(sol.rho_ab[last]));
    let amp = setup.field.omega_p_rabi;
    let lt = rho_ba_longtime(amp, &setup.rates, setup.atom.gamma_ab, setup.atom.gamma_bc);
    res.insert("rho_ba_longtime".into(), cjson(lt));
    if let Ok(s) = steady_two_coherence(&setup.atom, amp, omega_c) {
        res.insert("steady_rho_ab".into(), cjson(s.rho_ab));
        res.insert("steady_rho_cb".into(), cjson(s.rho_cb));
    }
    out.tables.push(table);
    Ok(())
}

fn modes(setup: &Setup, out: &mut RunOutput) -> Result<(), CliError> {
    let mode = match setup.mode {
        Some(m) => m,
        // surface the library error itself
        None => solve_probe_mode(&setup.atom, &setup.field, &setup.rates)?,
    };
    let sigma = mode.sigma;
    let mut table = Table::new(
        "modes.csv",
        &["branch", "re_eta", "im_eta", "re_v_g_root", "im_v_g_root", "quadratic_residual"],
    );
    for (label, eta, v) in [("plus", mode.eta_plus, mode.v_g_plus), ("minus", mode.eta_minus, mode.v_g_minus)] {
        let r = group_velocity_residual(&setup.rates, &setup.atom, sigma, v);
        let mut row = vec![label.to_string()];
        row.extend([eta.re, eta.im, v.re, v.im, r].iter().map(|&x| crate::output::num(x)));
        table.rows.push(row);
    }
    let res = &mut out.results;
    res.insert("v_g".into(), json!(mode.v_g));
    res.insert("v_g_plus".into(), cjson(mode.v_g_plus));
    res.insert("v_g_minus".into(), cjson(mode.v_g_minus));
    res.insert("eta_plus".into(), cjson(mode.eta_plus));
    res.insert("eta_minus".into(), cjson(mode.eta_minus));
    res.insert("zeta".into(), cjson(mode.zeta));
    res.insert("varsigma".into(), cjson(mode.varsigma));
    res.insert("matched_branch".into(), json!(format!("{:?}", mode.diagnostics.matched_branch)));
    res.insert("branch_mismatch".into(), json!(mode.diagnostics.branch_mismatch));
    res.insert("zeta_over_varsigma".into(), json!(mode.diagnostics.zeta_over_varsigma));
    res.insert("growing_mode".into(), json!(mode.diagnostics.growing_mode));
    out.tables.push(table);
    Ok(())
}

fn chi_sweep(config: &ScenarioConfig, setup: &Setup, out: &mut RunOutput) -> Result<(), CliError> {
    let n = &config.numerics;
    let atom = &setup.atom;
    let omega_c = setup.field.omega_c_rabi;
    let half = n.omega_span * atom.gamma_ab;
    let mut table = Table::new("chi.csv", &["omega", "re_chi", "im_chi", "re_n", "im_n"]);
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for k in 0..n.points {
        let offset = -half + 2.0 * half * k as f64 / (n.points - 1) as f64;
        let omega = atom.omega_ab + offset;
        let chi = chi_steady(omega, atom, omega_c)?;
        let index = (C::new(1.0, 0.0) + chi).sqrt();
        if chi.im > peak.0 {
            peak = (chi.im, omega);
        }
        table.push_numbers(&[omega, chi.re, chi.im, index.re, index.im]);
    }
    let res = &mut out.results;
    let center = chi_steady(atom.omega_ab, atom, omega_c)?;
    res.insert("chi_center".into(), cjson(center));
    res.insert("im_chi_center".into(), json!(center.im));
    res.insert("im_chi_max".into(), json!(peak.0));
    res.insert("omega_at_im_chi_max".into(), json!(peak.1));
    match refractive_index_and_vg(atom.omega_ab, atom, omega_c, n.d_omega) {
        Ok(d) => {
            res.insert("n_center".into(), cjson(d.n));
            res.insert("dn_domega_center".into(), cjson(d.dn_domega));
            res.insert("v_g_dispersive".into(), json!(d.v_g));
            res.insert("d_omega".into(), json!(d.d_omega));
        }
        Err(e) => out.warnings.push(format!("dispersive group velocity: {e}")),
    }
    match evaluate(atom.omega_ab, atom, omega_c, n.d_omega, n.chi_m_tol) {
        Ok(r) => {
            res.insert("chi_m".into(), cjson(r.chi_m));
            res.insert("eps_r".into(), cjson(r.eps_r));
            res.insert("mu_r".into(), cjson(r.mu_r));
            res.insert("chi_m_iterations".into(), json!(r.chi_m_iterations));
            if r.branch_cut_warning {
                out.warnings.push("(1 + chi_m)/(1 + chi_e) sits on the square-root branch cut".into());
            }
        }
        Err(e) => out.warnings.push(format!("electric/magnetic pair: {e}")),
    }
    out.tables.push(table);
    Ok(())
}

fn propagation(config: &ScenarioConfig, setup: &Setup, out: &mut RunOutput) -> Result<(), CliError> {
    let n = &config.numerics;
    let atom = &setup.atom;
    if let ProbeEnvelope::Modes { .. } = config.field.probe_envelope {
        return Err(CliError::Config("propagate needs a constant or gaussian probe_envelope".into()));
    }
    let grid = Grid1D::new(n.length, n.cells, n.courant, atom.c)?;
    let expected = slow_light_vg(&setup.rates, atom, &setup.field).final_form;
    let t_end = n.t_end.unwrap_or_else(|| {
        let transit = n.length / expected;
        match config.field.probe_envelope {
            ProbeEnvelope::Gaussian { center, width } => center + transit + 5.0 * width,
            _ => 2.0 * transit,
        }
    });
    let steps = (t_end / grid.dt).ceil() as usize;
    let settings = PropagationSettings {
        grid,
        t_end,
        coupling: match n.coupling {
            Coupling::FullBloch => CouplingModel::FullBloch,
            Coupling::Adiabatic => CouplingModel::AdiabaticRhoAb,
        },
        snapshot_every: n.snapshot_every.unwrap_or(steps.div_ceil(20).max(1)),
        source_substeps: n.substeps,
    };
    let drive = drive(config, setup)?;
    let record = propagate(&settings, atom, setup.field.omega_c_rabi, |t| drive(t).0)?;

    let mut peaks = Table::new("peak.csv", &["t", "z_peak", "amplitude"]);
    for k in 0..record.peak_times.len() {
        peaks.push_numbers(&[record.peak_times[k], record.peak_positions[k], record.peak_amplitudes[k]]);
    }
    out.tables.push(peaks);
    if config.output.snapshots {
        let mut snaps = Table::new("snapshots.csv", &["t", "z", "abs_omega_p", "re_rho_ab", "im_rho_ab"]);
        for (k, &t) in record.snapshot_times.iter().enumerate() {
            for (i, &z) in record.z.iter().enumerate() {
                let rho = record.rho_ab[k][i];
                snaps.push_numbers(&[t, z, record.snapshots[k][i], rho.re, rho.im]);
            }
        }
        out.tables.push(snaps);
    }

    let res = &mut out.results;
    res.insert("t_end".into(), json!(t_end));
    res.insert("dt".into(), json!(settings.grid.dt));
    res.insert("steps".into(), json!(record.steps));
    res.insert("v_g_expected".into(), json!(expected));
    let window = (n.fit_window[0] * n.length, n.fit_window[1] * n.length);
    match measure_group_velocity(&record, window) {
        Ok(fit) => {
            res.insert("v_fit".into(), json!(fit.velocity));
            res.insert("v_fit_stderr".into(), json!(fit.stderr));
            res.insert("v_fit_samples".into(), json!(fit.samples));
            res.insert("v_fit_relative_error".into(), json!((fit.velocity - expected).abs() / expected));
        }
        Err(e) => out.warnings.push(format!("velocity fit: {e}")),
    }
    res.insert("energy_in".into(), json!(record.energy_in));
    res.insert("energy_out".into(), json!(record.energy_out));
    let transmission = if record.energy_in > 0.0 { record.energy_out / record.energy_in } else { 0.0 };
    res.insert("transmission".into(), json!(transmission));
    res.insert("max_rho_ab".into(), json!(record.max_rho_ab));
    let check = coupling_field_checker(&record);
    if check.applicable {
        res.insert("max_rho_ac".into(), json!(check.max_rho_ac));
        res.insert("rho_ac_over_rho_ab".into(), json!(check.ratio));
    }
    if let Some(w) = &record.svea_warning {
        out.warnings.push(w.clone());
    }
    Ok(())
}
