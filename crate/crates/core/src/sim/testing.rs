//! Hand-built traces for exercising the analysis functions.

use nalgebra::Matrix3;

use super::trace::{SimTrace, TraceMeta, TraceRecord};
use crate::control::{StepEvent, SurfaceGains};
use crate::dynamics::{EulerAngles, QuadParams};

/// A trace on a uniform grid whose three angles all follow `angle(t)`, with
/// zero control, rates and surface. Metadata uses the default airframe and
/// radian sliding units.
pub fn synthetic_trace(
    duration: f64,
    dt: f64,
    events: Vec<StepEvent>,
    angle: impl Fn(f64) -> f64,
) -> SimTrace {
    let n = (duration / dt).round() as usize;
    let inertia: Matrix3<f64> = QuadParams::solo().inertia.effective();
    let records = (0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            let a = angle(t);
            TraceRecord {
                time: t,
                angles: EulerAngles::new(a, a, a),
                ..Default::default()
            }
        })
        .collect();
    SimTrace {
        meta: TraceMeta {
            scenario: "synthetic".into(),
            controller: "none".into(),
            duration,
            dt_plant: dt,
            dt_control: dt,
            events,
            sliding_scale: 1.0,
            surface_gains: SurfaceGains::default(),
            epsilon: None,
            effective_inertia: inertia,
            nominal_inertia: inertia,
        },
        records,
        faults: Vec::new(),
    }
}
