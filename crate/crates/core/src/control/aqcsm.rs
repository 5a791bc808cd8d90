//! Adaptive quasi-continuous sliding-mode attitude controller.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::adaptive::{adapt_gain, AdaptationParams, AdaptiveGainState};
use super::qcsm::{qcsm_control, solve_coupled};
use super::reference::ReferenceSignal;
use super::sliding::{
    sigma_model, sliding_surface, tracking_error, ControllerKinematics, SigmaModel, SlidingState,
    SlidingUnits, SurfaceGains,
};
use super::ControlOutput;
use crate::dynamics::{AttitudeState, TorqueVector};
use crate::error::ControlError;

/// Where the controller gets the `sigma_dot` it feeds into the law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SigmaDotSource {
    /// Nominal model plus a low-passed residual between the measured change
    /// of `sigma` and the model's prediction over the previous period. The
    /// law is solved with `sigma_dot` depending on the torque being chosen.
    /// `filter` is the residual time constant in control periods.
    ModelResidual { filter: f64 },
    /// Nominal model with the previous control and `d = 0`.
    Model,
    /// Finite difference of `sigma`, low-passed with time constant `tau`
    /// control periods.
    FilteredDifference { tau: f64 },
}

impl Default for SigmaDotSource {
    fn default() -> Self {
        Self::ModelResidual { filter: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AqcsmConfig {
    pub gains: SurfaceGains,
    pub adaptation: AdaptationParams,
    /// With adaptation off the gains stay at `alpha_0`.
    pub adaptive: bool,
    /// Actuator limit per axis, N·m.
    pub u_max: f64,
    pub units: SlidingUnits,
    pub kinematics: ControllerKinematics,
    pub sigma_dot: SigmaDotSource,
    /// Diagonal inertia the controller believes in.
    pub nominal_inertia: Matrix3<f64>,
    pub sweeps: u32,
    pub bisection_iterations: u32,
}

impl AqcsmConfig {
    pub fn new(nominal_inertia: Matrix3<f64>) -> Self {
        Self {
            gains: SurfaceGains::default(),
            adaptation: AdaptationParams::default(),
            adaptive: true,
            u_max: 5.0,
            units: SlidingUnits::default(),
            kinematics: ControllerKinematics::default(),
            sigma_dot: SigmaDotSource::default(),
            nominal_inertia,
            sweeps: 8,
            bisection_iterations: 64,
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        self.gains.validate()?;
        self.adaptation.validate()?;
        if !(self.u_max > 0.0) {
            return Err(ControlError::InvalidParameter {
                name: "u_max",
                reason: "must be positive".into(),
            });
        }
        let filter = match self.sigma_dot {
            SigmaDotSource::ModelResidual { filter } => filter,
            SigmaDotSource::FilteredDifference { tau } => tau,
            SigmaDotSource::Model => 0.0,
        };
        if !(filter >= 0.0) || !filter.is_finite() {
            return Err(ControlError::InvalidParameter {
                name: "sigma_dot",
                reason: "filter time constant must be non-negative".into(),
            });
        }
        if self.nominal_inertia.try_inverse().is_none() {
            return Err(ControlError::InvalidParameter {
                name: "nominal_inertia",
                reason: "must be invertible".into(),
            });
        }
        Ok(())
    }

    pub fn initial_state(&self) -> AqcsmState {
        AqcsmState {
            sliding: SlidingState::default(),
            gains: AdaptiveGainState::new(self.adaptation),
            u: Vector3::zeros(),
            memory: None,
            residual: None,
            filtered_rate: Vector3::zeros(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Memory {
    sigma: Vector3<f64>,
    model: SigmaModel,
}

/// Everything the controller carries between periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AqcsmState {
    pub sliding: SlidingState,
    pub gains: AdaptiveGainState,
    /// Last applied torque.
    pub u: Vector3<f64>,
    memory: Option<Memory>,
    residual: Option<Vector3<f64>>,
    filtered_rate: Vector3<f64>,
}

fn low_pass(prev: Option<Vector3<f64>>, raw: Vector3<f64>, periods: f64) -> Vector3<f64> {
    match prev {
        Some(p) => p + (raw - p) / (periods + 1.0),
        None => raw,
    }
}

fn finite(v: &Vector3<f64>, what: &'static str) -> Result<(), ControlError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(ControlError::NonFinite { what })
    }
}

/// One control period: surface, `sigma_dot`, law, clamp, then gain update.
pub fn aqcsm_step(
    meas: &AttitudeState,
    reference: &ReferenceSignal,
    state: &AqcsmState,
    cfg: &AqcsmConfig,
    dt: f64,
) -> Result<(ControlOutput, AqcsmState), ControlError> {
    let scale = cfg.units.scale();
    let (e, e_dot) = tracking_error(meas, reference, cfg.kinematics)?;
    let (e, e_dot) = (e * scale, e_dot * scale);
    let sigma = sliding_surface(&e, &e_dot, &cfg.gains);
    finite(&sigma, "sigma")?;
    let model = sigma_model(
        meas,
        reference,
        &e_dot,
        &cfg.nominal_inertia,
        &cfg.gains,
        cfg.kinematics,
        scale,
    )?;
    finite(&model.c, "sigma model")?;

    let alpha = state.gains.alpha;
    let mut next = *state;
    let (u, sigma_dot) = match cfg.sigma_dot {
        SigmaDotSource::ModelResidual { filter } => {
            if let Some(mem) = state.memory {
                let raw = (sigma - mem.sigma) / dt - mem.model.predict(&state.u);
                next.residual = Some(low_pass(state.residual, raw, filter));
            }
            let c = model.c + next.residual.unwrap_or_else(Vector3::zeros);
            let u = solve_coupled(
                &sigma,
                &c,
                &model.b,
                &alpha,
                &state.u,
                cfg.sweeps,
                cfg.bisection_iterations,
            );
            (u, c + model.b * u)
        }
        SigmaDotSource::Model => {
            let sd = model.predict(&state.u);
            (Vector3::from_fn(|i, _| qcsm_control(sigma[i], sd[i], alpha[i])), sd)
        }
        SigmaDotSource::FilteredDifference { tau } => {
            let sd = match state.memory {
                Some(mem) => low_pass(Some(state.filtered_rate), (sigma - mem.sigma) / dt, tau),
                None => Vector3::zeros(),
            };
            next.filtered_rate = sd;
            (Vector3::from_fn(|i, _| qcsm_control(sigma[i], sd[i], alpha[i])), sd)
        }
    };
    finite(&sigma_dot, "sigma_dot")?;
    let u = u.map(|x| x.clamp(-cfg.u_max, cfg.u_max));
    finite(&u, "control")?;

    if cfg.adaptive {
        next.gains = adapt_gain(&state.gains, &sigma, dt);
    }
    next.sliding = SlidingState { sigma, sigma_dot };
    next.u = u;
    next.memory = Some(Memory { sigma, model });
    let out = ControlOutput {
        torque: TorqueVector::from_vector(&u),
        sliding: next.sliding,
        alpha,
    };
    Ok((out, next))
}
