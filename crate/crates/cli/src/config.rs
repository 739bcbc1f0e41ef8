//! Scenario configuration files.
//!
//! A config is a JSON object with exactly the keys `scenario`, `atom`,
//! `field`, `numerics` and `output`; unknown keys anywhere are rejected.
//! Complex numbers are written `[re, im]`.

use std::path::Path;

use eit_core::{AtomParamsF64, FieldParamsF64};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Bloch,
    Adiabatic,
    Modes,
    ChiSweep,
    Propagate,
    Sweep,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Bloch => "bloch",
            ScenarioKind::Adiabatic => "adiabatic",
            ScenarioKind::Modes => "modes",
            ScenarioKind::ChiSweep => "chi-sweep",
            ScenarioKind::Propagate => "propagate",
            ScenarioKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub atom: AtomConfig,
    pub field: FieldConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub gamma_aa: f64,
    pub gamma_bb: f64,
    pub gamma_cc: f64,
    pub gamma_ab: f64,
    pub gamma_ac: f64,
    pub gamma_bc: f64,
    #[serde(default)]
    pub delta_ab: f64,
    #[serde(default)]
    pub delta_ac: f64,
    pub omega_ab: f64,
    pub omega_p: f64,
    pub kappa: f64,
    #[serde(default)]
    pub dipole_ratio: f64,
    #[serde(default)]
    pub dipole_phase: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number_density: Option<f64>,
}

/// Time profile of the probe Rabi frequency, scaled by `field.omega_p`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbeEnvelope {
    #[default]
    Constant,
    Gaussian { center: f64, width: f64 },
    /// Superposition of the two probe modes at `position`; the amplitudes
    /// multiply `field.omega_p`. Needs `field.sigma`.
    Modes {
        amp_plus: [f64; 2],
        amp_minus: [f64; 2],
        #[serde(default)]
        position: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub omega_c: [f64; 2],
    pub omega_p: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_k_hat")]
    pub k_hat_p: [f64; 3],
    #[serde(default)]
    pub probe_envelope: ProbeEnvelope,
}

fn default_k_hat() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    FullBloch,
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub scenario: ScenarioKind,
    pub param: String,
    pub values: Vec<f64>,
}

/// Numeric controls. Each scenario reads the fields it needs; the rest
/// keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// End of the time window; defaults to `50/λ` for the atomic
    /// scenarios and to transit plus five pulse widths for `propagate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub samples: usize,
    pub tolerance: f64,
    /// Initial populations of (a, b, c).
    pub initial_populations: [f64; 3],
    /// Initial ρ_bc and ρ_ba for `adiabatic`.
    pub initial_rho_bc: [f64; 2],
    pub initial_rho_ba: [f64; 2],
    /// Half-width of the `chi-sweep` window in units of γ_ab.
    pub omega_span: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_omega: Option<f64>,
    pub chi_m_tol: f64,
    pub length: f64,
    pub cells: usize,
    pub courant: f64,
    pub coupling: Coupling,
    pub substeps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    /// Fit window for the peak trajectory, as fractions of `length`.
    pub fit_window: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            t_end: None,
            samples: 501,
            tolerance: 1e-10,
            initial_populations: [0.0, 1.0, 0.0],
            initial_rho_bc: [0.0, 0.0],
            initial_rho_ba: [0.0, 0.0],
            omega_span: 10.0,
            points: 401,
            d_omega: None,
            chi_m_tol: 1e-12,
            length: 100.0,
            cells: 200,
            courant: 1.0,
            coupling: Coupling::FullBloch,
            substeps: 1,
            snapshot_every: None,
            fit_window: [0.2, 0.8],
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; `--out-dir` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Also write the field snapshots of a `propagate` run.
    pub snapshots: bool,
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl ScenarioConfig {
    pub fn atom_params(&self) -> AtomParamsF64 {
        let a = &self.atom;
        AtomParamsF64 {
            gamma_aa: a.gamma_aa,
            gamma_bb: a.gamma_bb,
            gamma_cc: a.gamma_cc,
            gamma_ab: a.gamma_ab,
            gamma_ac: a.gamma_ac,
            gamma_bc: a.gamma_bc,
            delta_ab: a.delta_ab,
            delta_ac: a.delta_ac,
            omega_ab: a.omega_ab,
            omega_p: a.omega_p,
            kappa: a.kappa,
            dipole_ratio: a.dipole_ratio,
            dipole_phase: a.dipole_phase,
            c: a.c,
            number_density: a.number_density,
        }
    }

    pub fn field_params(&self) -> FieldParamsF64 {
        FieldParamsF64 {
            omega_c_rabi: complex(self.field.omega_c),
            omega_p_rabi: complex(self.field.omega_p),
            sigma: self.field.sigma,
            k_hat_p: self.field.k_hat_p,
        }
    }

    pub fn from_params(scenario: ScenarioKind, atom: &AtomParamsF64, field: &FieldParamsF64) -> Self {
        Self {
            scenario,
            atom: AtomConfig {
                gamma_aa: atom.gamma_aa,
                gamma_bb: atom.gamma_bb,
                gamma_cc: atom.gamma_cc,
                gamma_ab: atom.gamma_ab,
                gamma_ac: atom.gamma_ac,
                gamma_bc: atom.gamma_bc,
                delta_ab: atom.delta_ab,
                delta_ac: atom.delta_ac,
                omega_ab: atom.omega_ab,
                omega_p: atom.omega_p,
                kappa: atom.kappa,
                dipole_ratio: atom.dipole_ratio,
                dipole_phase: atom.dipole_phase,
                c: atom.c,
                number_density: atom.number_density,
            },
            field: FieldConfig {
                omega_c: [field.omega_c_rabi.re, field.omega_c_rabi.im],
                omega_p: [field.omega_p_rabi.re, field.omega_p_rabi.im],
                sigma: field.sigma,
                k_hat_p: field.k_hat_p,
                probe_envelope: ProbeEnvelope::Constant,
            },
            numerics: Numerics::default(),
            output: OutputConfig::default(),
        }
    }

    /// Physical and numeric checks that serde cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        self.atom_params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.field_params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        let n = &self.numerics;
        let bad = |what: &str| Err(CliError::Config(format!("numerics.{what}")));
        if let Some(t) = n.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return bad("t_end must be positive and finite");
            }
        }
        if n.samples < 2 {
            return bad("samples must be at least 2");
        }
        if n.points < 2 {
            return bad("points must be at least 2");
        }
        if !(n.omega_span > 0.0 && n.omega_span.is_finite()) {
            return bad("omega_span must be positive and finite");
        }
        if !(n.length > 0.0 && n.length.is_finite()) {
            return bad("length must be positive and finite");
        }
        if n.substeps == 0 {
            return bad("substeps must be at least 1");
        }
        if n.snapshot_every == Some(0) {
            return bad("snapshot_every must be at least 1");
        }
        if !(0.0 <= n.fit_window[0] && n.fit_window[0] < n.fit_window[1] && n.fit_window[1] <= 1.0) {
            return bad("fit_window must satisfy 0 <= lo < hi <= 1");
        }
        if let ProbeEnvelope::Gaussian { width, center } = self.field.probe_envelope {
            if !(width > 0.0 && width.is_finite() && center.is_finite()) {
                return Err(CliError::Config("field.probe_envelope: width must be positive and finite".into()));
            }
        }
        match (&self.scenario, &n.sweep) {
            (ScenarioKind::Sweep, None) => return bad("sweep is required by the sweep scenario"),
            (ScenarioKind::Sweep, Some(s)) if s.scenario == ScenarioKind::Sweep => {
                return bad("sweep.scenario cannot itself be sweep")
            }
            (ScenarioKind::Sweep, Some(s)) if s.values.is_empty() => return bad("sweep.values must not be empty"),
            _ => {}
        }
        Ok(())
    }
}

/// Parses and validates a config document. Syntax and schema errors carry
/// the line and column reported by the JSON parser.
pub fn parse_config(text: &str, origin: &str) -> Result<ScenarioConfig, CliError> {
    let config: ScenarioConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{}:{}:{}: {}", origin, e.line(), e.column(), e)))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {}", path.display(), e)))?;
    if text.trim().is_empty() {
        return Err(CliError::Config(format!("{} is empty", path.display())));
    }
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_text() -> String {
        let (atom, field) = eit_core::canonical_dimensionless::<f64>();
        serde_json::to_string_pretty(&ScenarioConfig::from_params(ScenarioKind::Modes, &atom, &field)).unwrap()
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config(&canonical_text(), "x").unwrap();
        let again = parse_config(&serde_json::to_string(&c).unwrap(), "y").unwrap();
        assert_eq!(c, again);
        assert_eq!(c.atom_params(), eit_core::canonical_dimensionless::<f64>().0);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let text = canonical_text().replacen("\"gamma_aa\"", "\"gamma_zz\": 1.0,\n    \"gamma_aa\"", 1);
        match parse_config(&text, "cfg.json") {
            Err(CliError::Config(msg)) => {
                assert!(msg.starts_with("cfg.json:"), "{msg}");
                assert!(msg.contains("gamma_zz"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let text = canonical_text().replacen('{', "{\"extra\": 0,", 1);
        assert!(matches!(parse_config(&text, "x"), Err(CliError::Config(_))));
    }

    #[test]
    fn physical_invariants_rechecked() {
        let text = canonical_text().replace("\"gamma_ab\": 1.0", "\"gamma_ab\": -1.0");
        assert!(matches!(parse_config(&text, "x"), Err(CliError::Config(_))));
    }
}
