//! Propagation runs on the desk-scale column.

use eit_core::maxwell::*;
use eit_core::validation::{vg_medium, SlowLightSetup};
use eit_core::*;
use num_complex::Complex64 as C;

fn gaussian(t: f64) -> C {
    C::new(0.01 * (-((t - 100.0) / 20.0).powi(2)).exp(), 0.0)
}

fn settings(length: f64, n_cells: usize, t_end: f64, coupling: CouplingModel) -> PropagationSettings<f64> {
    PropagationSettings {
        grid: Grid1D::new(length, n_cells, 1.0, 1.0).unwrap(),
        t_end,
        coupling,
        snapshot_every: usize::MAX,
        source_substeps: 1,
    }
}

#[test]
fn vacuum_transport_is_a_pure_shift() {
    let (atom, field) = vg_medium(0.0, 0.01);
    for coupling in [CouplingModel::FullBloch, CouplingModel::AdiabaticRhoAb] {
        let s = PropagationSettings {
            snapshot_every: 37,
            ..settings(100.0, 200, 250.0, coupling)
        };
        let rec = propagate(&s, &atom, field.omega_c_rabi, gaussian).unwrap();
        let dt = s.grid.dt;
        for (k, snap) in rec.snapshot_times.iter().zip(&rec.snapshots) {
            let step = (k / dt).round() as usize;
            for (i, v) in snap.iter().enumerate() {
                let expected = if i <= step { gaussian(dt * (step - i) as f64).norm() } else { 0.0 };
                assert_eq!(*v, expected, "node {i} at t = {k}");
            }
        }
    }
}

#[test]
fn vacuum_pulse_arrives_after_transit_time() {
    let (atom, field) = vg_medium(0.0, 0.0);
    let s = settings(100.0, 200, 260.0, CouplingModel::AdiabaticRhoAb);
    let rec = propagate(&s, &atom, field.omega_c_rabi, gaussian).unwrap();
    // the outflow node sees the peak when the peak trajectory reaches L
    let arrival = rec
        .peak_times
        .iter()
        .zip(&rec.peak_positions)
        .find(|(_, &z)| z >= 100.0)
        .map(|(t, _)| *t)
        .unwrap();
    assert!((arrival - 200.0).abs() <= s.grid.dt, "{arrival}");
    let fit = measure_group_velocity(&rec, (20.0, 80.0)).unwrap();
    assert!((fit.velocity - 1.0).abs() < 1e-3);
    assert!((rec.energy_out / rec.energy_in - 1.0).abs() < 1e-9);
}

#[test]
fn strong_coupling_makes_the_column_transparent() {
    // the c/4 medium, with the coupling raised tenfold
    let (atom, field) = vg_medium(3.0, 0.0);
    let s = settings(100.0, 200, 400.0, CouplingModel::FullBloch);
    let rec = propagate(&s, &atom, C::new(10.0, 0.0), gaussian).unwrap();
    let transmitted = rec.energy_out / rec.energy_in;
    assert!((0.99..=1.0).contains(&transmitted), "{transmitted}");
    // λ dt = 12.75 here; the adiabatic source is stiff but advanced exactly
    let s = settings(100.0, 200, 400.0, CouplingModel::AdiabaticRhoAb);
    let rec = propagate(&s, &atom, C::new(10.0, 0.0), gaussian).unwrap();
    let adiabatic = rec.energy_out / rec.energy_in;
    assert!((0.99..=1.0).contains(&adiabatic), "{adiabatic}");
    // at the original coupling the transparency window is narrower than the pulse
    let s = settings(100.0, 200, 700.0, CouplingModel::FullBloch);
    let rec = propagate(&s, &atom, field.omega_c_rabi, gaussian).unwrap();
    assert!(rec.energy_out / rec.energy_in < 0.5);
}

#[test]
fn quarter_light_speed_pulse() {
    let setup = SlowLightSetup::new(3.0, 200, CouplingModel::FullBloch);
    let expected = setup.expected_velocity();
    assert!((expected - 0.25).abs() < 1e-15);
    let (rec, fit) = setup.run().unwrap();
    assert!((fit.velocity - expected).abs() / expected < 0.05, "{fit:?}");
    let report = coupling_field_checker(&rec);
    assert!(report.applicable);
    assert!(report.ratio < 0.05, "{report:?}");
}

#[test]
fn peak_trajectory_is_monotone_after_entry() {
    let setup = SlowLightSetup::new(3.0, 200, CouplingModel::AdiabaticRhoAb);
    let (rec, _) = setup.run().unwrap();
    let entered = rec.peak_positions.iter().position(|&z| z > 5.0).unwrap();
    let left = rec.peak_positions.iter().position(|&z| z >= 95.0).unwrap();
    for w in rec.peak_positions[entered..left].windows(2) {
        assert!(w[1] >= w[0], "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn grid_halving_moves_velocity_less_than_fit_error() {
    let (_, coarse) = SlowLightSetup::new(3.0, 400, CouplingModel::AdiabaticRhoAb).run().unwrap();
    let (_, fine) = SlowLightSetup::new(3.0, 800, CouplingModel::AdiabaticRhoAb).run().unwrap();
    let change = (coarse.velocity - fine.velocity).abs();
    assert!(change < fine.stderr.min(coarse.stderr), "{change} vs {}", fine.stderr);
}

#[test]
fn full_and_adiabatic_coupling_agree() {
    let (_, full) = SlowLightSetup::new(3.0, 200, CouplingModel::FullBloch).run().unwrap();
    let (_, adiabatic) = SlowLightSetup::new(3.0, 200, CouplingModel::AdiabaticRhoAb).run().unwrap();
    assert!((full.velocity - adiabatic.velocity).abs() / adiabatic.velocity < 0.05);
}

#[test]
fn dephasing_never_amplifies() {
    let (atom, field) = vg_medium(3.0, 0.01);
    for coupling in [CouplingModel::FullBloch, CouplingModel::AdiabaticRhoAb] {
        let rec = propagate(&settings(100.0, 100, 700.0, coupling), &atom, field.omega_c_rabi, gaussian).unwrap();
        assert!(rec.energy_out <= rec.energy_in, "{coupling:?}");
        assert!(rec.energy_out > 0.0);
    }
}

#[test]
fn coupling_checker_cases() {
    let run = |amplitude: f64| {
        let (atom, field) = vg_medium(3.0, 0.0);
        let s = settings(50.0, 100, 200.0, CouplingModel::FullBloch);
        let inflow = move |t: f64| gaussian(t) * (amplitude / 0.01);
        coupling_field_checker(&propagate(&s, &atom, field.omega_c_rabi, inflow).unwrap())
    };
    let off = run(0.0);
    assert_eq!((off.max_rho_ac, off.max_rho_ab, off.ratio), (0.0, 0.0, 0.0));
    let weak = run(0.01);
    assert!(weak.max_rho_ac < 0.01 * weak.max_rho_ab, "{weak:?}");
    // |Ω_p| = |Ω_c|: reported only
    let strong = run(1.0);
    assert!(strong.ratio.is_finite() && strong.ratio > weak.ratio);
}

#[test]
fn adiabatic_runs_are_not_checkable() {
    let (atom, field) = vg_medium(3.0, 0.0);
    let rec = propagate(&settings(50.0, 32, 60.0, CouplingModel::AdiabaticRhoAb), &atom, field.omega_c_rabi, gaussian).unwrap();
    let report = coupling_field_checker(&rec);
    assert!(!report.applicable);
    assert_eq!(report.max_rho_ac, 0.0);
}

#[test]
fn rejected_grids_and_blowups() {
    assert!(matches!(Grid1D::new(100.0, 200, 1.5, 1.0), Err(EitError::Cfl { .. })));
    assert!(matches!(Grid1D::new(100.0, 10, 1.0, 1.0), Err(EitError::GridTooSmall { .. })));
    let (atom, field) = vg_medium(3.0, 0.0);
    let s = settings(50.0, 32, 60.0, CouplingModel::FullBloch);
    let bad = |t: f64| if t > 10.0 { C::new(f64::NAN, 0.0) } else { C::new(0.0, 0.0) };
    match propagate(&s, &atom, field.omega_c_rabi, bad) {
        Err(EitError::NumericalBlowup { step }) => assert_eq!(step, 7),
        other => panic!("{other:?}"),
    }
}

#[test]
fn fractional_courant_still_tracks_the_slow_pulse() {
    let setup = SlowLightSetup::new(3.0, 200, CouplingModel::AdiabaticRhoAb);
    let (atom, field) = setup.medium();
    let s = PropagationSettings {
        grid: Grid1D::new(100.0, 200, 0.5, 1.0).unwrap(),
        t_end: 600.0,
        coupling: CouplingModel::AdiabaticRhoAb,
        snapshot_every: usize::MAX,
        source_substeps: 2,
    };
    let rec = propagate(&s, &atom, field.omega_c_rabi, gaussian).unwrap();
    let fit = measure_group_velocity(&rec, (20.0, 80.0)).unwrap();
    assert!((fit.velocity - 0.25).abs() / 0.25 < 0.05, "{fit:?}");
}

#[test]
fn sharp_inflow_raises_envelope_warning() {
    let (atom, field) = vg_medium(0.0, 0.0);
    // with ω_p = 10⁶ nothing on this grid can violate the envelope condition
    let s = settings(50.0, 32, 60.0, CouplingModel::AdiabaticRhoAb);
    assert!(propagate(&s, &atom, field.omega_c_rabi, gaussian).unwrap().svea_warning.is_none());
    let slow_carrier = AtomParams { omega_p: 10.0, omega_ab: 10.0, ..atom };
    let rec = propagate(&s, &slow_carrier, field.omega_c_rabi, |t: f64| C::new((3.0 * t).sin(), 0.0)).unwrap();
    assert!(rec.svea_warning.is_some());
}
