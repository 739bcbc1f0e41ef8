//! Commands: writing run directories, sweeps, the canonical config and the
//! validation report.

use std::fs;
use std::path::{Path, PathBuf};

use eit_core::validation::{run_all, CheckReport, Expectation};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ScenarioConfig, ScenarioKind, SweepSpec};
use crate::error::CliError;
use crate::output::{flatten, num, write_json, RunOutput, Table};
use crate::scenarios::run_scenario;

fn echo(config: &ScenarioConfig) -> Value {
    serde_json::to_value(config).expect("config serializes")
}

fn write_run(dir: &Path, config: &ScenarioConfig, out: &RunOutput) -> Result<Value, CliError> {
    fs::create_dir_all(dir)?;
    for table in &out.tables {
        table.write(dir)?;
    }
    let summary = out.summary(config.scenario.name(), echo(config));
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Runs `config` into `dir`; a `sweep` scenario is dispatched to [`sweep`].
pub fn run(config: &ScenarioConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    if config.scenario == ScenarioKind::Sweep {
        let spec = config.numerics.sweep.clone().expect("validated");
        let mut base = config.clone();
        base.scenario = spec.scenario;
        base.numerics.sweep = None;
        return sweep(&base, &spec.param, &spec.values, dir);
    }
    let out = run_scenario(config)?;
    write_run(dir, config, &out)?;
    Ok(out.warnings)
}

/// Replaces the number at a dotted path (`atom.gamma_bc`, `field.omega_c.0`)
/// in the config's JSON form.
pub fn set_param(config: &ScenarioConfig, path: &str, value: f64) -> Result<ScenarioConfig, CliError> {
    let mut doc = echo(config);
    let mut node = &mut doc;
    for segment in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(segment),
            Value::Array(items) => segment.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| CliError::Config(format!("parameter path `{path}` does not resolve (at `{segment}`)")))?;
    }
    if !node.is_number() {
        return Err(CliError::Config(format!("parameter path `{path}` does not name a number")));
    }
    *node = json!(value);
    let updated: ScenarioConfig = serde_json::from_value(doc)
        .map_err(|e| CliError::Config(format!("parameter `{path}` = {}: {e}", num(value))))?;
    updated.validate()?;
    Ok(updated)
}

/// Runs the base scenario once per value, each into `dir/run_NNN`, and
/// writes `dir/sweep.csv` with one row per value.
pub fn sweep(base: &ScenarioConfig, param: &str, values: &[f64], dir: &Path) -> Result<Vec<String>, CliError> {
    if base.scenario == ScenarioKind::Sweep {
        return Err(CliError::Config("the base scenario of a sweep cannot be sweep".into()));
    }
    if values.is_empty() {
        return Err(CliError::Config("--values must list at least one number".into()));
    }
    // resolve the path once up front so a bad path fails before any work
    set_param(base, param, values[0])?;
    fs::create_dir_all(dir)?;

    let outcomes: Vec<Result<Value, CliError>> = values
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let config = set_param(base, param, v)?;
            let out = run_scenario(&config)?;
            write_run(&dir.join(format!("run_{k:03}")), &config, &out)
        })
        .collect();

    let mut flat: Vec<Vec<(String, String)>> = Vec::with_capacity(values.len());
    let mut columns: Vec<String> = Vec::new();
    for outcome in &outcomes {
        let mut row = Vec::new();
        if let Ok(summary) = outcome {
            flatten("derived", &summary["derived"], &mut row);
            flatten("results", &summary["results"], &mut row);
        }
        for (k, _) in &row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
        flat.push(row);
    }
    columns.sort();
    let mut header = vec!["run".to_string(), param.to_string(), "status".to_string()];
    header.extend(columns.iter().cloned());
    let mut table = Table {
        file: "sweep.csv".into(),
        header,
        rows: Vec::new(),
    };
    let mut warnings = Vec::new();
    let mut first_error = None;
    for (k, (outcome, row)) in outcomes.into_iter().zip(flat).enumerate() {
        let status = match outcome {
            Ok(_) => "ok".to_string(),
            Err(e) => {
                warnings.push(format!("run_{k:03}: {e}"));
                let text = e.to_string();
                first_error.get_or_insert(e);
                text
            }
        };
        let mut cells = vec![format!("run_{k:03}"), num(values[k]), status];
        for col in &columns {
            cells.push(row.iter().find(|(key, _)| key == col).map(|(_, v)| v.clone()).unwrap_or_default());
        }
        table.rows.push(cells);
    }
    table.write(dir)?;
    let spec = SweepSpec {
        scenario: base.scenario,
        param: param.to_string(),
        values: values.to_vec(),
    };
    write_json(
        &dir.join("sweep.json"),
        &json!({ "tool": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION"), "sweep": spec, "base": echo(base) }),
    )?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(warnings),
    }
}

/// The canonical parameter set as a runnable config: the SI point as a
/// `chi-sweep`, or the dimensionless point as a `modes` run.
pub fn canonical(dimensionless: bool) -> ScenarioConfig {
    if dimensionless {
        let (atom, field) = eit_core::canonical_dimensionless::<f64>();
        ScenarioConfig::from_params(ScenarioKind::Modes, &atom, &field)
    } else {
        let (atom, field) = eit_core::canonical_params::<f64>();
        ScenarioConfig::from_params(ScenarioKind::ChiSweep, &atom, &field)
    }
}

pub fn report_json(reports: &[CheckReport]) -> Value {
    let checks: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "claim": r.claim,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "passed": r.passed,
                "expectation": match r.expectation {
                    Expectation::Pass => "pass",
                    Expectation::ExpectedFail => "expected-fail",
                },
                "as_expected": r.as_expected(),
                "runtime_s": r.runtime_s,
                "notes": r.notes,
            })
        })
        .collect();
    json!({ "all_as_expected": reports.iter().all(CheckReport::as_expected), "checks": checks })
}

pub fn report_table(reports: &[CheckReport]) -> String {
    let mut s = format!(
        "{:<40} {:>12} {:>10} {:>6} {:>14} {:>8}\n",
        "check", "residual", "tolerance", "pass", "expected", "time/s"
    );
    for r in reports {
        let expected = match r.expectation {
            Expectation::Pass => "pass",
            Expectation::ExpectedFail => "expected-fail",
        };
        s.push_str(&format!(
            "{:<40} {:>12.4e} {:>10.1e} {:>6} {:>14} {:>8.2}\n",
            r.name,
            r.residual,
            r.tolerance,
            if r.passed { "yes" } else { "no" },
            expected,
            r.runtime_s
        ));
        for note in &r.notes {
            s.push_str(&format!("    {note}\n"));
        }
    }
    s
}

/// Runs the harness and writes `validation.json` into `dir`. Returns the
/// reports and whether every check that is meant to pass did.
pub fn validate(dir: &Path) -> Result<(Vec<CheckReport>, bool), CliError> {
    let reports = run_all();
    fs::create_dir_all(dir)?;
    write_json(&dir.join("validation.json"), &report_json(&reports))?;
    let ok = reports
        .iter()
        .filter(|r| r.expectation == Expectation::Pass)
        .all(|r| r.passed);
    Ok((reports, ok))
}

pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&ScenarioConfig>, fallback: &str) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.and_then(|c| c.output.dir.as_ref().map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from(fallback))
}
