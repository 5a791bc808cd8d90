//! Attitude controllers: the adaptive quasi-continuous sliding-mode law and
//! its baselines.

mod adaptive;
mod aqcsm;
mod baseline;
mod qcsm;
mod reference;
mod sliding;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub use adaptive::{adapt_gain, AdaptationParams, AdaptiveGainState};
pub use aqcsm::{aqcsm_step, AqcsmConfig, AqcsmState, SigmaDotSource};
pub use baseline::{
    pid_step, smc_step, PidConfig, PidGains, PidState, PidTuning, SmcConfig, SmcState,
};
pub use qcsm::{qcsm_control, qcsm_shape, sign, solve_axis, solve_coupled, ORIGIN_TOL};
pub use reference::{Axis, ReferenceGenerator, ReferenceShaping, ReferenceSignal, StepEvent};
pub use sliding::{
    sigma_derivative, sigma_model, sliding_surface, tracking_error, ControllerKinematics,
    SigmaModel, SlidingState, SlidingUnits, SurfaceGains,
};

use crate::dynamics::{AttitudeState, TorqueVector};
use crate::error::ControlError;

/// What a controller produced in one period, for actuation and logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub torque: TorqueVector,
    pub sliding: SlidingState,
    /// Gains in force during the period.
    pub alpha: Vector3<f64>,
}

/// Controller selection with its parameter block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ControllerConfig {
    Aqcsm(AqcsmConfig),
    Smc(SmcConfig),
    Pid(PidConfig),
}

impl ControllerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Aqcsm(c) if !c.adaptive => "qcsm",
            Self::Aqcsm(_) => "aqcsm",
            Self::Smc(_) => "smc",
            Self::Pid(_) => "pid",
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        match self {
            Self::Aqcsm(c) => c.validate(),
            Self::Smc(c) => c.validate(),
            Self::Pid(c) => c.gains.validate(),
        }
    }

    pub fn u_max(&self) -> f64 {
        match self {
            Self::Aqcsm(c) => c.u_max,
            Self::Smc(c) => c.u_max,
            Self::Pid(c) => c.u_max,
        }
    }

    /// Multiplier from radians to the units of the recorded `sigma`.
    pub fn sliding_scale(&self) -> f64 {
        match self {
            Self::Aqcsm(c) => c.units.scale(),
            Self::Smc(c) => c.units.scale(),
            Self::Pid(_) => 1.0,
        }
    }

    pub fn surface_gains(&self) -> SurfaceGains {
        match self {
            Self::Aqcsm(c) => c.gains,
            Self::Smc(c) => c.gains,
            Self::Pid(c) => c.report_gains,
        }
    }

    /// Dead band of the gain law, if the controller adapts.
    pub fn epsilon(&self) -> Option<Vector3<f64>> {
        match self {
            Self::Aqcsm(c) if c.adaptive => Some(c.adaptation.epsilon),
            _ => None,
        }
    }

    pub fn start(&self) -> Controller {
        match *self {
            Self::Aqcsm(cfg) => Controller::Aqcsm {
                state: cfg.initial_state(),
                cfg,
            },
            Self::Smc(cfg) => Controller::Smc {
                cfg,
                state: SmcState::default(),
            },
            Self::Pid(cfg) => Controller::Pid {
                cfg,
                state: PidState::default(),
            },
        }
    }
}

/// A running controller.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Controller {
    Aqcsm { cfg: AqcsmConfig, state: AqcsmState },
    Smc { cfg: SmcConfig, state: SmcState },
    Pid { cfg: PidConfig, state: PidState },
}

impl Controller {
    pub fn step(
        &mut self,
        meas: &AttitudeState,
        reference: &ReferenceSignal,
        dt: f64,
    ) -> Result<ControlOutput, ControlError> {
        match self {
            Self::Aqcsm { cfg, state } => {
                let (out, next) = aqcsm_step(meas, reference, state, cfg, dt)?;
                *state = next;
                Ok(out)
            }
            Self::Smc { cfg, state } => {
                let (out, next) = smc_step(meas, reference, state, cfg, dt)?;
                *state = next;
                Ok(out)
            }
            Self::Pid { cfg, state } => {
                let (out, next) = pid_step(meas, reference, state, cfg, dt)?;
                *state = next;
                Ok(out)
            }
        }
    }
}
