//! Fixed-step closed-loop simulation.

mod integrator;
mod runner;
mod scenario;
mod trace;

pub use integrator::{check_envelope, integrate, rk4, rk4_step};
pub use runner::run_scenario;
pub use scenario::{
    apply_variation, disturbance_at, DisturbanceSegment, FaultPolicy, Scenario, Variation,
};
pub use trace::{flags, FaultRecord, SimTrace, TraceMeta, TraceRecord};
pub mod testing;
