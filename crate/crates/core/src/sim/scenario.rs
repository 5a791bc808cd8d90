//! Scenario description and validation.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::control::{ControllerConfig, ReferenceShaping, StepEvent};
use crate::dynamics::{AttitudeState, InertiaMatrix, PlantMode, QuadParams, TorqueVector};
use crate::error::{DynamicsError, ScenarioError};

/// Constant torque applied over `[start, end)`; `end = None` lasts to the end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSegment {
    pub start: f64,
    pub end: Option<f64>,
    pub torque: TorqueVector,
}

impl DisturbanceSegment {
    pub fn active(&self, t: f64) -> bool {
        t >= self.start && self.end.is_none_or(|e| t < e)
    }
}

/// Sum of all segments active at `t`.
pub fn disturbance_at(schedule: &[DisturbanceSegment], t: f64) -> TorqueVector {
    schedule
        .iter()
        .filter(|s| s.active(t))
        .fold(TorqueVector::ZERO, |acc, s| acc + s.torque)
}

/// Payload and inertia uncertainty applied to the plant only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Variation {
    /// Added mass, kg.
    pub payload: f64,
    /// Symmetric inertia uncertainty, kg·m².
    pub delta_inertia: Matrix3<f64>,
    /// Grow the nominal inertia with the mass ratio `(m + payload) / m`
    /// before adding `delta_inertia`.
    pub scale_inertia_with_mass: bool,
}

impl Variation {
    pub fn apply(&self, params: &QuadParams) -> Result<QuadParams, DynamicsError> {
        let delta = if self.scale_inertia_with_mass {
            params.inertia.nominal() * (self.payload / params.m) + self.delta_inertia
        } else {
            self.delta_inertia
        };
        apply_variation(params, self.payload, &delta)
    }
}

/// Returns `params` with `m += payload_kg` and the inertia uncertainty set to
/// `delta_i`. The nominal inertia, and so any controller built from it, is
/// unchanged.
pub fn apply_variation(
    params: &QuadParams,
    payload_kg: f64,
    delta_i: &Matrix3<f64>,
) -> Result<QuadParams, DynamicsError> {
    if !(payload_kg >= 0.0) {
        return Err(DynamicsError::InvalidParameter {
            name: "payload",
            reason: "must be non-negative".into(),
        });
    }
    let inertia: InertiaMatrix = params.inertia.with_delta(*delta_i)?;
    Ok(QuadParams {
        m: params.m + payload_kg,
        inertia,
        ..*params
    })
}

/// What happens when the plant leaves its envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultPolicy {
    /// Stop and keep the partial trace.
    #[default]
    Abort,
    /// Record the fault and keep integrating while the state is computable.
    FlagAndContinue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// s
    pub duration: f64,
    pub dt_plant: f64,
    /// Integer multiple of `dt_plant`.
    pub dt_control: f64,
    pub reference_schedule: Vec<StepEvent>,
    pub reference_shaping: ReferenceShaping,
    pub disturbance_schedule: Vec<DisturbanceSegment>,
    /// Nominal airframe; the controller is built from these.
    pub params: QuadParams,
    pub variation: Option<Variation>,
    pub controller: ControllerConfig,
    pub initial_state: AttitudeState,
    pub plant_mode: PlantMode,
    pub fault_policy: FaultPolicy,
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

impl Scenario {
    /// Defaults for everything but the schedules and the controller.
    pub fn new(name: impl Into<String>, controller: ControllerConfig) -> Self {
        Self {
            name: name.into(),
            duration: 5.0,
            dt_plant: 1e-3,
            dt_control: 1e-3,
            reference_schedule: Vec::new(),
            reference_shaping: ReferenceShaping::default(),
            disturbance_schedule: Vec::new(),
            params: QuadParams::solo(),
            variation: None,
            controller,
            initial_state: AttitudeState::default(),
            plant_mode: PlantMode::default(),
            fault_policy: FaultPolicy::default(),
        }
    }

    /// Number of plant steps; the trace holds one more record.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt_plant).round() as usize
    }

    /// Plant steps per control period.
    pub fn control_ratio(&self) -> usize {
        (self.dt_control / self.dt_plant).round() as usize
    }

    /// Airframe the plant integrates, with any variation applied.
    pub fn plant_params(&self) -> Result<QuadParams, ScenarioError> {
        match &self.variation {
            Some(v) => Ok(v.apply(&self.params)?),
            None => Ok(self.params),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = [
            ("duration", self.duration),
            ("dt_plant", self.dt_plant),
            ("dt_control", self.dt_control),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let ratio = self.dt_control / self.dt_plant;
        if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(invalid(format!(
                "dt_control = {} is not an integer multiple of dt_plant = {}",
                self.dt_control, self.dt_plant
            )));
        }
        let steps = self.duration / self.dt_plant;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(invalid("duration must be a whole number of plant steps"));
        }
        for pair in self.reference_schedule.windows(2) {
            if pair[1].time < pair[0].time {
                return Err(invalid("reference schedule is not time-sorted"));
            }
        }
        for (i, ev) in self.reference_schedule.iter().enumerate() {
            if !(ev.time >= 0.0) || !ev.target.is_finite() {
                return Err(invalid(format!("reference event {i} has a bad time or target")));
            }
        }
        for pair in self.disturbance_schedule.windows(2) {
            if pair[1].start < pair[0].start {
                return Err(invalid("disturbance schedule is not time-sorted"));
            }
        }
        for (i, seg) in self.disturbance_schedule.iter().enumerate() {
            if !(seg.start >= 0.0) || seg.end.is_some_and(|e| !(e > seg.start)) {
                return Err(invalid(format!("disturbance segment {i} has a bad interval")));
            }
            if !seg.torque.to_vector().iter().all(|x| x.is_finite()) {
                return Err(invalid(format!("disturbance segment {i} is not finite")));
            }
        }
        self.reference_shaping.validate().map_err(invalid)?;
        self.params.validate()?;
        self.plant_params()?.validate()?;
        self.controller.validate()?;
        if !self.initial_state.is_finite() || !self.initial_state.angles.within_envelope() {
            return Err(invalid("initial state is outside the attitude envelope"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{AqcsmConfig, Axis};

    fn scenario() -> Scenario {
        let p = QuadParams::solo();
        Scenario::new("t", ControllerConfig::Aqcsm(AqcsmConfig::new(*p.inertia.nominal())))
    }

    fn paper_delta() -> Matrix3<f64> {
        Matrix3::new(0.0, 0.0044, -0.0077, 0.0044, 0.0, 0.0115, -0.0077, 0.0115, 0.0)
    }

    #[test]
    fn default_scenario_is_valid() {
        scenario().validate().unwrap();
        assert_eq!(scenario().steps(), 5000);
    }

    #[test]
    fn control_period_must_be_multiple() {
        let mut s = scenario();
        s.dt_control = 1.5e-3;
        assert!(s.validate().is_err());
        s.dt_control = 2e-3;
        s.validate().unwrap();
        assert_eq!(s.control_ratio(), 2);
    }

    #[test]
    fn unsorted_schedule_rejected() {
        let mut s = scenario();
        s.reference_schedule = vec![
            StepEvent { time: 2.0, axis: Axis::Yaw, target: 0.1 },
            StepEvent { time: 1.0, axis: Axis::Roll, target: 0.1 },
        ];
        assert!(s.validate().is_err());
    }

    #[test]
    fn zero_variation_is_identity() {
        let p = QuadParams::solo();
        assert_eq!(apply_variation(&p, 0.0, &Matrix3::zeros()).unwrap(), p);
    }

    #[test]
    fn cancelling_variation_is_indefinite() {
        let p = QuadParams::solo();
        let err = apply_variation(&p, 0.0, &-p.inertia.nominal()).unwrap_err();
        assert!(matches!(err, DynamicsError::IndefiniteInertia { .. }));
    }

    #[test]
    fn tabulated_uncertainty_alone_is_indefinite() {
        let p = QuadParams::solo();
        let err = apply_variation(&p, 0.8, &paper_delta()).unwrap_err();
        assert!(matches!(err, DynamicsError::IndefiniteInertia { .. }));
    }

    #[test]
    fn mass_scaled_variation_is_positive_definite() {
        let p = QuadParams::solo();
        let v = Variation {
            payload: 0.8,
            delta_inertia: paper_delta(),
            scale_inertia_with_mass: true,
        };
        let varied = v.apply(&p).unwrap();
        assert!((varied.m - 2.3).abs() < 1e-12);
        assert!(varied.inertia.min_eigenvalue() > 0.0);
        assert_eq!(varied.inertia.nominal(), p.inertia.nominal());
        let eff = varied.inertia.effective();
        assert!((eff - eff.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn disturbance_segments_sum() {
        let sched = [
            DisturbanceSegment { start: 0.0, end: None, torque: TorqueVector::new(0.5, 0.5, 0.5) },
            DisturbanceSegment { start: 1.0, end: Some(2.0), torque: TorqueVector::new(1.0, 0.0, 0.0) },
        ];
        assert_eq!(disturbance_at(&sched, 0.5).u_phi, 0.5);
        assert_eq!(disturbance_at(&sched, 1.5).u_phi, 1.5);
        assert_eq!(disturbance_at(&sched, 2.0).u_phi, 0.5);
    }
}
