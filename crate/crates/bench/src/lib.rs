//! Fixtures shared by the benchmarks.

use qcsm_core::control::AqcsmConfig;
use qcsm_core::{Axis, ControllerConfig, QuadParams, Scenario, StepEvent};

/// The roll/pitch/yaw step scenario under `controller`.
pub fn step_scenario(controller: ControllerConfig) -> Scenario {
    let mut s = Scenario::new("bench", controller);
    s.reference_schedule = vec![
        StepEvent { time: 0.5, axis: Axis::Roll, target: (-10f64).to_radians() },
        StepEvent { time: 0.5, axis: Axis::Pitch, target: 10f64.to_radians() },
        StepEvent { time: 2.0, axis: Axis::Yaw, target: 45f64.to_radians() },
    ];
    s
}

pub fn aqcsm() -> ControllerConfig {
    ControllerConfig::Aqcsm(AqcsmConfig::new(*QuadParams::solo().inertia.nominal()))
}
