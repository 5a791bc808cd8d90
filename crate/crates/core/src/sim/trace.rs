//! Time-indexed simulation records.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::control::{StepEvent, SurfaceGains};
use crate::dynamics::{BodyRates, EulerAngles, MotorForces, TorqueVector};
use crate::error::DynamicsError;

/// Bit flags carried by every record.
pub mod flags {
    /// A rotor force would have been negative and was clamped.
    pub const MOTOR_SATURATION: u32 = 1;
    /// The commanded torque hit `u_max` on some axis.
    pub const CONTROL_CLAMP: u32 = 1 << 1;
    /// An adaptive gain sits at its upper clamp.
    pub const GAIN_CLAMP: u32 = 1 << 2;
    /// A body rate exceeded the cap after this record.
    pub const RATE_CAP: u32 = 1 << 3;
    /// Roll or pitch left the envelope after this record.
    pub const ATTITUDE: u32 = 1 << 4;
    /// The Euler-rate transform became singular.
    pub const DEGENERATE: u32 = 1 << 5;
    /// The state or the controller went non-finite.
    pub const NON_FINITE: u32 = 1 << 6;

    /// Flags that mean the run itself failed rather than an actuator limit.
    pub const FAULTS: u32 = RATE_CAP | ATTITUDE | DEGENERATE | NON_FINITE;
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub angles: EulerAngles,
    pub rates: BodyRates,
    pub reference: EulerAngles,
    /// `theta - theta_d` with yaw wrapped, radians.
    pub error: Vector3<f64>,
    /// In the controller's sliding units.
    pub sigma: Vector3<f64>,
    pub sigma_dot: Vector3<f64>,
    pub alpha: Vector3<f64>,
    pub u: TorqueVector,
    /// Total disturbance the plant saw: schedule plus internal torques.
    pub d: TorqueVector,
    pub motors: MotorForces,
    pub v0: f64,
    pub v: f64,
    pub fault: u32,
}

/// Fault that stopped or marked the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultRecord {
    pub time: f64,
    pub message: String,
    #[serde(skip)]
    pub error: Option<DynamicsError>,
    pub aborted: bool,
}

/// Everything needed to interpret the records without the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub scenario: String,
    pub controller: String,
    pub duration: f64,
    pub dt_plant: f64,
    pub dt_control: f64,
    pub events: Vec<StepEvent>,
    /// Radians to sliding units.
    pub sliding_scale: f64,
    pub surface_gains: SurfaceGains,
    /// Dead band of the gain law, if the controller adapts.
    pub epsilon: Option<Vector3<f64>>,
    pub effective_inertia: Matrix3<f64>,
    pub nominal_inertia: Matrix3<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
    pub faults: Vec<FaultRecord>,
}

impl SimTrace {
    pub fn aborted(&self) -> bool {
        self.faults.iter().any(|f| f.aborted)
    }

    /// Index of the first record at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let dt = self.meta.dt_plant;
        let k = ((t / dt) - 1e-9).ceil().max(0.0) as usize;
        k.min(self.records.len())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.time)
    }
}
