//! Acceptance ranges for the canonical scenarios.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use qcsm_core::analysis::{
    chattering_index, lyapunov_monitor_with, mean_alpha, step_metrics, LyapunovOptions, StepMetrics,
};
use qcsm_core::control::Axis;
use qcsm_core::sim::flags;
use qcsm_core::{run_scenario, Scenario, SimTrace};

use crate::config::Document;
use crate::error::{CliError, ConfigError};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub nominal: NominalRange,
    pub disturbance: DisturbanceRange,
    pub variation: VariationRange,
    pub adaptive_gain: GainRange,
    pub chattering: ChatteringRange,
    pub lyapunov: LyapunovRange,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalRange {
    pub scenario: PathBuf,
    /// s after each step event.
    pub settling_time_max: f64,
    pub overshoot_max_percent: f64,
    /// Wall-clock seconds for the run.
    pub runtime_max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceRange {
    pub scenario: PathBuf,
    pub steady_state_error_max_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationRange {
    pub scenario: PathBuf,
    /// Relative to the nominal settling time.
    pub settling_time_rel_max: f64,
    pub overshoot_diff_max_percent: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainRange {
    pub axis: Axis,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatteringRange {
    pub scenario: PathBuf,
    pub window: [f64; 2],
    /// Run names inside the batch.
    pub adaptive: String,
    pub baseline: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovRange {
    pub tol_v: f64,
    pub max_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} criterion {} ({}): {}", self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub criteria: Vec<CriterionResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_expected(path: &Path) -> Result<Expected, ConfigError> {
    toml::from_str(&read(path)?).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn scenarios(dir: &Path, file: &Path) -> Result<Vec<Scenario>, ConfigError> {
    let path = dir.join(file);
    Ok(match crate::load_document(&path)? {
        Document::Scenario(s) => vec![*s],
        Document::Batch(b) => b.runs,
    })
}

fn single(dir: &Path, file: &Path) -> Result<Scenario, CliError> {
    let mut runs = scenarios(dir, file)?;
    if runs.len() != 1 {
        return Err(CliError::Usage(format!("{} must hold a single scenario", file.display())));
    }
    Ok(runs.remove(0))
}

fn simulate(s: &Scenario) -> Result<(SimTrace, f64), CliError> {
    let start = Instant::now();
    let trace = run_scenario(s).map_err(|source| CliError::Scenario {
        name: s.name.clone(),
        source,
    })?;
    Ok((trace, start.elapsed().as_secs_f64()))
}

fn steps(trace: &SimTrace) -> Vec<StepMetrics> {
    trace
        .meta
        .events
        .iter()
        .filter_map(|e| step_metrics(trace, e).ok())
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "unsettled".into(), |t| format!("{t:.3}"))
}

/// Runs the canonical scenarios listed in `dir/expected.toml` and evaluates
/// criteria 1 to 6.
pub fn run_check(dir: &Path) -> Result<CheckReport, CliError> {
    let exp = load_expected(&dir.join("expected.toml"))?;
    let nominal_s = single(dir, &exp.nominal.scenario)?;
    let disturbance_s = single(dir, &exp.disturbance.scenario)?;
    let variation_s = single(dir, &exp.variation.scenario)?;
    let comparison = scenarios(dir, &exp.chattering.scenario)?;

    let mut all: Vec<&Scenario> = vec![&nominal_s, &disturbance_s, &variation_s];
    all.extend(comparison.iter());
    let results: Vec<Result<(SimTrace, f64), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = all.iter().map(|s| scope.spawn(move || simulate(s))).collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut runs = Vec::with_capacity(results.len());
    for r in results {
        runs.push(r?);
    }
    let (nominal, runtime) = &runs[0];
    let (disturbance, _) = &runs[1];
    let (variation, _) = &runs[2];
    let compare = &runs[3..];
    let mut out = Vec::new();

    let nominal_steps = steps(nominal);
    {
        let r = &exp.nominal;
        let mut pass = !nominal.aborted() && !nominal_steps.is_empty() && *runtime < r.runtime_max;
        let mut parts = Vec::new();
        for m in &nominal_steps {
            pass &= m.settling_time.is_some_and(|t| t <= r.settling_time_max)
                && m.overshoot <= r.overshoot_max_percent;
            parts.push(format!(
                "{} ts={} s os={:.2}%",
                m.axis.name(),
                fmt_opt(m.settling_time),
                m.overshoot
            ));
        }
        parts.push(format!("runtime={runtime:.2} s"));
        out.push(CriterionResult {
            id: 1,
            name: "nominal tracking",
            pass,
            detail: parts.join(", "),
        });
    }

    {
        let r = &exp.disturbance;
        let rate_fault = disturbance.records.iter().any(|x| x.fault & flags::RATE_CAP != 0);
        let mut pass = !disturbance.aborted() && !rate_fault;
        let mut parts = Vec::new();
        let ds = steps(disturbance);
        pass &= !ds.is_empty();
        for m in &ds {
            let e = m.steady_state_error.to_degrees();
            pass &= e < r.steady_state_error_max_deg;
            parts.push(format!("{} ess={e:.3} deg", m.axis.name()));
        }
        parts.push(format!("rate-cap fault={rate_fault}"));
        out.push(CriterionResult {
            id: 2,
            name: "disturbance rejection",
            pass,
            detail: parts.join(", "),
        });
    }

    {
        let r = &exp.variation;
        let vs = steps(variation);
        let mut pass = !variation.aborted() && vs.len() == nominal_steps.len() && !vs.is_empty();
        let mut parts = Vec::new();
        for (n, v) in nominal_steps.iter().zip(&vs) {
            let rel = match (n.settling_time, v.settling_time) {
                (Some(a), Some(b)) if a > 0.0 => Some((b - a).abs() / a),
                _ => None,
            };
            let dov = (v.overshoot - n.overshoot).abs();
            pass &= rel.is_some_and(|x| x <= r.settling_time_rel_max) && dov <= r.overshoot_diff_max_percent;
            parts.push(format!(
                "{} dts={} dos={dov:.2} pp",
                n.axis.name(),
                rel.map_or_else(|| "n/a".into(), |x| format!("{:.1}%", 100.0 * x))
            ));
        }
        out.push(CriterionResult {
            id: 3,
            name: "parametric robustness",
            pass,
            detail: parts.join(", "),
        });
    }

    {
        let i = exp.adaptive_gain.axis.index();
        let a_n = mean_alpha(nominal)[i];
        let a_d = mean_alpha(disturbance)[i];
        out.push(CriterionResult {
            id: 4,
            name: "adaptive gain",
            pass: a_d > a_n,
            detail: format!("mean alpha {}: disturbance {a_d:.4} vs nominal {a_n:.4}", exp.adaptive_gain.axis.name()),
        });
    }

    {
        let r = &exp.chattering;
        let find = |name: &str| comparison.iter().position(|s| s.name == name).map(|k| &compare[k].0);
        let [t0, t1] = r.window;
        let tv = |t: Option<&SimTrace>| t.and_then(|t| chattering_index(t, t0, t1).ok());
        let (a, b) = (tv(find(&r.adaptive)), tv(find(&r.baseline)));
        let (pass, detail) = match (a, b) {
            (Some(a), Some(b)) => (
                (0..3).all(|i| a[i] < b[i]),
                format!(
                    "TV [{t0}, {t1}] s {}=({:.3e}, {:.3e}, {:.3e}) {}=({:.1}, {:.1}, {:.1})",
                    r.adaptive, a[0], a[1], a[2], r.baseline, b[0], b[1], b[2]
                ),
            ),
            _ => (false, format!("runs `{}` and `{}` not found or window empty", r.adaptive, r.baseline)),
        };
        out.push(CriterionResult {
            id: 5,
            name: "chattering contrast",
            pass,
            detail,
        });
    }

    {
        let r = &exp.lyapunov;
        let opts = LyapunovOptions {
            tol_v: r.tol_v,
            ..LyapunovOptions::default()
        };
        let mut pass = true;
        let mut parts = Vec::new();
        for (trace, _) in &runs {
            if trace.meta.epsilon.is_none() {
                continue;
            }
            let rep = lyapunov_monitor_with(trace, &opts);
            pass &= rep.violations.len() <= r.max_violations;
            parts.push(format!(
                "{}: {} of {} steps",
                trace.meta.scenario,
                rep.violations.len(),
                rep.checked_steps
            ));
        }
        pass &= !parts.is_empty();
        out.push(CriterionResult {
            id: 6,
            name: "Lyapunov descent",
            pass,
            detail: format!("violations {}", parts.join(", ")),
        });
    }

    Ok(CheckReport { criteria: out })
}
