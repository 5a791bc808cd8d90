//! Post-processing of simulation traces.

mod gain;
mod lyapunov;
mod metrics;

pub use gain::{gain_bound_check, lumped_uncertainty, AxisGainBound, GainBoundReport};
pub use lyapunov::{
    lyapunov_monitor, lyapunov_monitor_with, LyapunovOptions, LyapunovRecord, LyapunovReport,
    Violation, DEFAULT_TOL_V,
};
pub use metrics::{
    chattering_index, mean_alpha, step_metrics, summarize, AnalysisError, AxisSummary, RunSummary,
    StepMetrics, SETTLING_BAND,
};
