//! TOML scenario and batch documents.

use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use qcsm_core::control::{
    AdaptationParams, AqcsmConfig, Axis, ControllerConfig, ControllerKinematics, PidConfig,
    PidGains, PidTuning, ReferenceShaping, SigmaDotSource, SlidingUnits, SmcConfig, StepEvent,
    SurfaceGains,
};
use qcsm_core::dynamics::{
    AttitudeState, BodyRates, EulerAngles, InertiaMatrix, PlantMode, QuadParams, TorqueVector,
};
use qcsm_core::sim::{DisturbanceSegment, FaultPolicy, Scenario, Variation};

use crate::error::ConfigError;

/// A number applied to every axis, or one per axis.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerAxis {
    All(f64),
    Each([f64; 3]),
}

impl PerAxis {
    pub fn vector(self) -> Vector3<f64> {
        match self {
            PerAxis::All(x) => Vector3::repeat(x),
            PerAxis::Each(v) => Vector3::from(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnits {
    #[default]
    Degrees,
    Radians,
}

impl AngleUnits {
    fn to_rad(self, x: f64) -> f64 {
        match self {
            AngleUnits::Degrees => x.to_radians(),
            AngleUnits::Radians => x,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: Option<String>,
    pub duration: Option<f64>,
    pub dt_plant: Option<f64>,
    pub dt_control: Option<f64>,
    #[serde(default)]
    pub units: AngleUnits,
    pub plant_mode: Option<PlantMode>,
    pub fault_policy: Option<FaultPolicy>,
    #[serde(default)]
    pub reference: ReferenceDoc,
    #[serde(default)]
    pub disturbance: Vec<DisturbanceDoc>,
    #[serde(default)]
    pub params: ParamsDoc,
    pub variation: Option<VariationDoc>,
    #[serde(default)]
    pub initial: InitialDoc,
    pub controller: ControllerDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapingKind {
    Step,
    FirstOrder,
    SecondOrder,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceDoc {
    pub shaping: Option<ShapingKind>,
    /// s, first-order shaping only.
    pub tau: Option<f64>,
    /// rad/s, second-order shaping only.
    pub omega_n: Option<f64>,
    #[serde(default)]
    pub step: Vec<StepDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub time: f64,
    pub axis: Axis,
    pub target: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceDoc {
    #[serde(default)]
    pub start: f64,
    pub end: Option<f64>,
    pub torque: PerAxis,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub m: Option<f64>,
    pub l: Option<f64>,
    pub g: Option<f64>,
    /// Diagonal of the nominal inertia, kg·m².
    pub inertia: Option<[f64; 3]>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub k_a: Option<PerAxis>,
    pub i_r: Option<f64>,
    pub k_f: Option<f64>,
    /// rad/s
    pub rate_cap: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationDoc {
    #[serde(default)]
    pub payload: f64,
    pub delta_inertia: Option<[[f64; 3]; 3]>,
    #[serde(default = "default_true")]
    pub scale_inertia_with_mass: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    pub angles: Option<[f64; 3]>,
    /// Angle units per second.
    pub rates: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaDotKind {
    ModelResidual,
    Model,
    FilteredDifference,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptationDoc {
    pub alpha_0: Option<PerAxis>,
    pub omega_bar: Option<PerAxis>,
    pub epsilon: Option<PerAxis>,
    pub eta: Option<PerAxis>,
    pub alpha_m: Option<PerAxis>,
    pub alpha_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlidingDoc {
    pub lambda: Option<PerAxis>,
    pub u_max: Option<f64>,
    pub sliding_units: Option<SlidingUnits>,
    pub kinematics: Option<ControllerKinematics>,
    pub sigma_dot: Option<SigmaDotKind>,
    /// Filter time constant in control periods.
    pub sigma_dot_filter: Option<f64>,
    #[serde(default)]
    pub adaptation: AdaptationDoc,
    pub sweeps: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcDoc {
    pub lambda: Option<PerAxis>,
    pub alpha: Option<PerAxis>,
    pub u_max: Option<f64>,
    pub sliding_units: Option<SlidingUnits>,
    pub kinematics: Option<ControllerKinematics>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidDoc {
    pub kp: Option<PerAxis>,
    pub ki: Option<PerAxis>,
    pub kd: Option<PerAxis>,
    pub omega_n: Option<f64>,
    pub zeta: Option<f64>,
    pub integral_ratio: Option<f64>,
    pub integral_limit: Option<PerAxis>,
    pub u_max: Option<f64>,
    pub kinematics: Option<ControllerKinematics>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ControllerDoc {
    Aqcsm(SlidingDoc),
    /// The same law with adaptation switched off.
    Qcsm(SlidingDoc),
    Smc(SmcDoc),
    Pid(PidDoc),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchDoc {
    pub name: Option<String>,
    pub workers: Option<usize>,
    /// Default scenario file for runs that do not name one.
    pub scenario: Option<PathBuf>,
    pub run: Vec<RunDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    pub name: Option<String>,
    pub scenario: Option<PathBuf>,
    pub controller: Option<ControllerDoc>,
}

/// A parsed document: one scenario or a batch of them.
#[derive(Debug, Clone)]
pub enum Document {
    Scenario(Box<Scenario>),
    Batch(Batch),
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub name: String,
    pub workers: usize,
    pub runs: Vec<Scenario>,
}

fn parse_err(path: &Path, e: toml::de::Error) -> ConfigError {
    ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Parses and validates a scenario document. `path` is only used in
/// diagnostics and for the default scenario name.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario, ConfigError> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| parse_err(path, e))?;
    build_scenario(&doc, None, path)
}

/// Parses either kind of document. Batch entries name scenario files
/// relative to the batch file.
pub fn parse_document(text: &str, path: &Path) -> Result<Document, ConfigError> {
    let value: toml::Table = text.parse().map_err(|e| parse_err(path, e))?;
    if !value.contains_key("run") {
        return parse_scenario(text, path).map(|s| Document::Scenario(Box::new(s)));
    }
    let doc: BatchDoc = toml::from_str(text).map_err(|e| parse_err(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut runs = Vec::with_capacity(doc.run.len());
    for (i, r) in doc.run.iter().enumerate() {
        let file = r
            .scenario
            .as_ref()
            .or(doc.scenario.as_ref())
            .ok_or_else(|| invalid(path, format!("run {i} names no scenario file")))?;
        let file = base.join(file);
        let text = std::fs::read_to_string(&file).map_err(|e| ConfigError::Io {
            path: file.clone(),
            message: e.to_string(),
        })?;
        let sdoc: ScenarioDoc = toml::from_str(&text).map_err(|e| parse_err(&file, e))?;
        let mut scn = build_scenario(&sdoc, r.controller.as_ref(), &file)?;
        scn.name = match &r.name {
            Some(n) => n.clone(),
            None => format!("{}-{}", scn.name, scn.controller.name()),
        };
        runs.push(scn);
    }
    if runs.is_empty() {
        return Err(invalid(path, "batch has no runs"));
    }
    let mut names: Vec<_> = runs.iter().map(|r| r.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid(path, "batch run names must be unique"));
    }
    Ok(Document::Batch(Batch {
        name: doc.name.unwrap_or_else(|| stem(path)),
        workers: doc.workers.unwrap_or(1).max(1),
        runs,
    }))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn build_params(doc: &ParamsDoc, path: &Path) -> Result<QuadParams, ConfigError> {
    let mut p = QuadParams::solo();
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut p.m, doc.m);
    set(&mut p.l, doc.l);
    set(&mut p.g, doc.g);
    set(&mut p.b, doc.b);
    set(&mut p.c, doc.c);
    set(&mut p.i_r, doc.i_r);
    set(&mut p.k_f, doc.k_f);
    set(&mut p.rate_cap, doc.rate_cap);
    if let Some(k) = doc.k_a {
        p.k_a = k.vector();
    }
    if let Some([x, y, z]) = doc.inertia {
        p.inertia = InertiaMatrix::diagonal(x, y, z).map_err(|e| invalid(path, e.to_string()))?;
    }
    p.validate().map_err(|e| invalid(path, e.to_string()))?;
    Ok(p)
}

fn build_controller(doc: &ControllerDoc, params: &QuadParams) -> ControllerConfig {
    let nominal = *params.inertia.nominal();
    let lambda = |l: Option<PerAxis>| {
        l.map(|v| {
            let v = v.vector();
            SurfaceGains {
                lambda_phi: v[0],
                lambda_theta: v[1],
                lambda_psi: v[2],
            }
        })
    };
    match doc {
        ControllerDoc::Aqcsm(d) | ControllerDoc::Qcsm(d) => {
            let mut c = AqcsmConfig::new(nominal);
            c.adaptive = matches!(doc, ControllerDoc::Aqcsm(_));
            if let Some(g) = lambda(d.lambda) {
                c.gains = g;
            }
            if let Some(u) = d.u_max {
                c.u_max = u;
            }
            if let Some(u) = d.sliding_units {
                c.units = u;
            }
            if let Some(k) = d.kinematics {
                c.kinematics = k;
            }
            if let Some(s) = d.sweeps {
                c.sweeps = s;
            }
            c.sigma_dot = match (d.sigma_dot.unwrap_or(SigmaDotKind::ModelResidual), d.sigma_dot_filter) {
                (SigmaDotKind::ModelResidual, f) => SigmaDotSource::ModelResidual { filter: f.unwrap_or(1.0) },
                (SigmaDotKind::Model, _) => SigmaDotSource::Model,
                (SigmaDotKind::FilteredDifference, f) => SigmaDotSource::FilteredDifference { tau: f.unwrap_or(5.0) },
            };
            let a = &d.adaptation;
            let mut ad = AdaptationParams {
                alpha_max: c.u_max,
                ..AdaptationParams::default()
            };
            let vec = |dst: &mut Vector3<f64>, v: Option<PerAxis>| {
                if let Some(v) = v {
                    *dst = v.vector();
                }
            };
            vec(&mut ad.alpha_0, a.alpha_0);
            vec(&mut ad.omega_bar, a.omega_bar);
            vec(&mut ad.epsilon, a.epsilon);
            vec(&mut ad.eta, a.eta);
            vec(&mut ad.alpha_m, a.alpha_m);
            if let Some(m) = a.alpha_max {
                ad.alpha_max = m;
            }
            c.adaptation = ad;
            ControllerConfig::Aqcsm(c)
        }
        ControllerDoc::Smc(d) => {
            let mut c = SmcConfig::default();
            if let Some(g) = lambda(d.lambda) {
                c.gains = g;
            }
            if let Some(a) = d.alpha {
                c.alpha = a.vector();
            }
            if let Some(u) = d.u_max {
                c.u_max = u;
            }
            if let Some(u) = d.sliding_units {
                c.units = u;
            }
            if let Some(k) = d.kinematics {
                c.kinematics = k;
            }
            ControllerConfig::Smc(c)
        }
        ControllerDoc::Pid(d) => {
            let defaults = PidTuning::default();
            let tuning = PidTuning {
                omega_n: d.omega_n.unwrap_or(defaults.omega_n),
                zeta: d.zeta.unwrap_or(defaults.zeta),
                integral_ratio: d.integral_ratio.unwrap_or(defaults.integral_ratio),
            };
            let mut g = PidGains::tuned(&nominal.diagonal(), &tuning);
            if let Some(k) = d.kp {
                g.kp = k.vector();
            }
            if let Some(k) = d.ki {
                g.ki = k.vector();
            }
            if let Some(k) = d.kd {
                g.kd = k.vector();
            }
            if let Some(l) = d.integral_limit {
                g.integral_limit = l.vector();
            }
            let mut c = PidConfig::new(g);
            if let Some(u) = d.u_max {
                c.u_max = u;
            }
            if let Some(k) = d.kinematics {
                c.kinematics = k;
            }
            ControllerConfig::Pid(c)
        }
    }
}

fn build_shaping(doc: &ReferenceDoc, path: &Path) -> Result<ReferenceShaping, ConfigError> {
    let kind = doc.shaping.unwrap_or(ShapingKind::SecondOrder);
    match (kind, doc.tau, doc.omega_n) {
        (ShapingKind::Step, None, None) => Ok(ReferenceShaping::Step),
        (ShapingKind::FirstOrder, tau, None) => Ok(ReferenceShaping::FirstOrder { tau: tau.unwrap_or(0.05) }),
        (ShapingKind::SecondOrder, None, w) => Ok(ReferenceShaping::SecondOrder { omega_n: w.unwrap_or(5.0) }),
        _ => Err(invalid(
            path,
            "reference: `tau` belongs to first-order shaping and `omega_n` to second-order",
        )),
    }
}

fn build_scenario(
    doc: &ScenarioDoc,
    controller_override: Option<&ControllerDoc>,
    path: &Path,
) -> Result<Scenario, ConfigError> {
    let params = build_params(&doc.params, path)?;
    let controller = build_controller(controller_override.unwrap_or(&doc.controller), &params);
    let mut scn = Scenario::new(doc.name.clone().unwrap_or_else(|| stem(path)), controller);
    scn.params = params;
    if let Some(v) = doc.duration {
        scn.duration = v;
    }
    if let Some(v) = doc.dt_plant {
        scn.dt_plant = v;
    }
    if let Some(v) = doc.dt_control {
        scn.dt_control = v;
    }
    if let Some(m) = doc.plant_mode {
        scn.plant_mode = m;
    }
    if let Some(f) = doc.fault_policy {
        scn.fault_policy = f;
    }
    let u = doc.units;
    scn.reference_shaping = build_shaping(&doc.reference, path)?;
    scn.reference_schedule = doc
        .reference
        .step
        .iter()
        .map(|s| StepEvent {
            time: s.time,
            axis: s.axis,
            target: u.to_rad(s.target),
        })
        .collect();
    scn.disturbance_schedule = doc
        .disturbance
        .iter()
        .map(|d| DisturbanceSegment {
            start: d.start,
            end: d.end,
            torque: TorqueVector::from_vector(&d.torque.vector()),
        })
        .collect();
    scn.variation = doc.variation.as_ref().map(|v| Variation {
        payload: v.payload,
        delta_inertia: v
            .delta_inertia
            .map(|rows| Matrix3::from_fn(|i, j| rows[i][j]))
            .unwrap_or_else(Matrix3::zeros),
        scale_inertia_with_mass: v.scale_inertia_with_mass,
    });
    let a = doc.initial.angles.unwrap_or([0.0; 3]).map(|x| u.to_rad(x));
    let w = doc.initial.rates.unwrap_or([0.0; 3]).map(|x| u.to_rad(x));
    scn.initial_state = AttitudeState::new(
        EulerAngles::new(a[0], a[1], a[2]),
        BodyRates::new(w[0], w[1], w[2]),
    );
    scn.validate().map_err(|e| invalid(path, e.to_string()))?;
    Ok(scn)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[controller]\ntype = \"aqcsm\"\n";

    #[test]
    fn minimal_document_uses_defaults() {
        let s = parse_scenario(MINIMAL, Path::new("x.cfg")).unwrap();
        assert_eq!(s.name, "x");
        assert!(s.reference_schedule.is_empty());
        assert_eq!(s.steps(), 5000);
        assert_eq!(s.controller.name(), "aqcsm");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}bogus = 1\n");
        let err = parse_scenario(&text, Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        let text = "[controller]\ntype = \"pid\"\nepsilon = 3\n";
        assert!(parse_scenario(text, Path::new("x.cfg")).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_scenario("duration = \n[controller]\n", Path::new("x.cfg")).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn control_period_must_divide() {
        let text = format!("dt_plant = 0.001\ndt_control = 0.0015\n{MINIMAL}");
        let err = parse_scenario(&text, Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { .. }));
    }

    #[test]
    fn negative_step_is_invalid() {
        let text = format!("dt_plant = -0.001\n{MINIMAL}");
        assert!(matches!(
            parse_scenario(&text, Path::new("x.cfg")).unwrap_err(),
            ConfigError::Validation { .. }
        ));
    }

    #[test]
    fn degrees_are_converted() {
        let text = format!(
            "{MINIMAL}[[reference.step]]\ntime = 0.5\naxis = \"roll\"\ntarget = -10.0\n"
        );
        let s = parse_scenario(&text, Path::new("x.cfg")).unwrap();
        assert!((s.reference_schedule[0].target + 10f64.to_radians()).abs() < 1e-15);
        let text = format!("units = \"radians\"\n{text}");
        let s = parse_scenario(&text, Path::new("x.cfg")).unwrap();
        assert_eq!(s.reference_schedule[0].target, -10.0);
    }

    #[test]
    fn shaping_keys_must_match_kind() {
        let text = format!("{MINIMAL}[reference]\nshaping = \"step\"\ntau = 0.1\n");
        assert!(parse_scenario(&text, Path::new("x.cfg")).is_err());
    }

    #[test]
    fn per_axis_values_accept_scalars() {
        let text = "[controller]\ntype = \"aqcsm\"\n[controller.adaptation]\nalpha_m = 0.5\nepsilon = [1, 2, 3]\n";
        let s = parse_scenario(text, Path::new("x.cfg")).unwrap();
        let ControllerConfig::Aqcsm(c) = s.controller else { panic!() };
        assert_eq!(c.adaptation.alpha_m, Vector3::repeat(0.5));
        assert_eq!(c.adaptation.epsilon, Vector3::new(1.0, 2.0, 3.0));
    }
}
