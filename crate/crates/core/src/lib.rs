//! Quadrotor attitude simulation with an adaptive quasi-continuous
//! second-order sliding-mode controller, first-order SMC and PID baselines,
//! a fixed-step closed-loop runner and trace analysis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod sim;

pub use control::{Axis, ControllerConfig, StepEvent};
pub use dynamics::{
    AttitudeState, BodyRates, EulerAngles, InertiaMatrix, MotorForces, QuadParams, TorqueVector,
};
pub use error::{ControlError, DynamicsError, ScenarioError};
pub use sim::{run_scenario, Scenario, SimTrace, TraceRecord};
