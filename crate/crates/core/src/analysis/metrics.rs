//! Step-response metrics, chattering and run summaries.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use super::gain::gain_bound_check;
use super::lyapunov::lyapunov_monitor;
use crate::control::{Axis, StepEvent};
use crate::dynamics::wrap_angle;
use crate::sim::SimTrace;

/// Settling band as a fraction of the step magnitude.
pub const SETTLING_BAND: f64 = 0.02;

/// Length of the tail over which steady-state error is measured, s.
const STEADY_WINDOW: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("event at t = {time} s is outside the trace")]
    EventOutsideTrace { time: f64 },
    #[error("step on {axis} has zero magnitude")]
    ZeroStep { axis: &'static str },
    #[error("window [{t0}, {t1}] is empty or outside the trace")]
    BadWindow { t0: f64, t1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    pub axis: Axis,
    pub event_time: f64,
    /// rad
    pub target: f64,
    /// rad, signed.
    pub magnitude: f64,
    /// Seconds from the event; `None` if the band is not held to the end
    /// of the evaluation window.
    pub settling_time: Option<f64>,
    /// Percent of the step magnitude.
    pub overshoot: f64,
    /// Largest `|error|` over the last half second of the window, rad.
    pub steady_state_error: f64,
    /// N·m
    pub peak_control: f64,
}

fn angle(r: &crate::sim::TraceRecord, axis: Axis) -> f64 {
    r.angles.to_vector()[axis.index()]
}

fn previous_target(trace: &SimTrace, event: &StepEvent) -> f64 {
    let initial = trace.records.first().map_or(0.0, |r| r.reference.to_vector()[event.axis.index()]);
    trace
        .meta
        .events
        .iter()
        .rfind(|e| e.axis == event.axis && e.time < event.time)
        .map_or(initial, |e| e.target)
}

/// Metrics of one step, evaluated until the next step on the same axis or
/// the end of the trace.
pub fn step_metrics(trace: &SimTrace, event: &StepEvent) -> Result<StepMetrics, AnalysisError> {
    let last_time = trace.records.last().map_or(f64::NEG_INFINITY, |r| r.time);
    if event.time > last_time || event.time < 0.0 {
        return Err(AnalysisError::EventOutsideTrace { time: event.time });
    }
    let magnitude = event.target - previous_target(trace, event);
    if magnitude == 0.0 {
        return Err(AnalysisError::ZeroStep { axis: event.axis.name() });
    }
    let end = trace
        .meta
        .events
        .iter()
        .filter(|e| e.axis == event.axis && e.time > event.time)
        .map(|e| e.time)
        .fold(f64::INFINITY, f64::min);
    let i0 = trace.index_at(event.time);
    let window: Vec<_> = trace.records[i0..]
        .iter()
        .take_while(|r| r.time < end)
        .collect();

    let band = SETTLING_BAND * magnitude.abs();
    let dir = magnitude.signum();
    let mut settled_at = Some(event.time);
    let mut overshoot: f64 = 0.0;
    let mut peak_control: f64 = 0.0;
    for r in &window {
        let err = wrap_angle(angle(r, event.axis) - event.target);
        if err.abs() > band {
            settled_at = None;
        } else if settled_at.is_none() {
            settled_at = Some(r.time);
        }
        overshoot = overshoot.max(err * dir);
        peak_control = peak_control.max(r.u.to_vector()[event.axis.index()].abs());
    }
    let t_end = window.last().map_or(event.time, |r| r.time);
    let steady_state_error = window
        .iter()
        .filter(|r| r.time >= t_end - STEADY_WINDOW)
        .map(|r| wrap_angle(angle(r, event.axis) - event.target).abs())
        .fold(0.0, f64::max);
    Ok(StepMetrics {
        axis: event.axis,
        event_time: event.time,
        target: event.target,
        magnitude,
        settling_time: settled_at.map(|t| t - event.time),
        overshoot: 100.0 * overshoot / magnitude.abs(),
        steady_state_error,
        peak_control,
    })
}

/// Per-axis total variation of the control over `[t0, t1]`, N·m.
pub fn chattering_index(trace: &SimTrace, t0: f64, t1: f64) -> Result<Vector3<f64>, AnalysisError> {
    let samples: Vec<_> = trace
        .records
        .iter()
        .filter(|r| r.time >= t0 - 1e-12 && r.time <= t1 + 1e-12)
        .collect();
    if samples.is_empty() || t1 < t0 {
        return Err(AnalysisError::BadWindow { t0, t1 });
    }
    Ok(samples.windows(2).fold(Vector3::zeros(), |acc, w| {
        acc + (w[1].u.to_vector() - w[0].u.to_vector()).abs()
    }))
}

/// Time-averaged gains over the whole trace.
pub fn mean_alpha(trace: &SimTrace) -> Vector3<f64> {
    let n = trace.records.len().max(1) as f64;
    trace.records.iter().fold(Vector3::zeros(), |acc, r| acc + r.alpha) / n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisSummary {
    pub axis: Axis,
    pub steps: Vec<StepMetrics>,
    /// Total variation of the control over the final second.
    pub chattering: f64,
    pub mean_alpha: f64,
    /// Fraction of dead-band samples with `alpha >= |Xi|`.
    pub gain_coverage: f64,
    pub xi_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub controller: String,
    pub records: usize,
    pub aborted: bool,
    pub faults: Vec<String>,
    pub axes: Vec<AxisSummary>,
    pub lyapunov_violations: usize,
    pub max_delta_v_outside_band: f64,
}

/// Everything the reports need. The chattering window is the final second.
pub fn summarize(trace: &SimTrace) -> RunSummary {
    let t_end = trace.records.last().map_or(0.0, |r| r.time);
    let tv = chattering_index(trace, (t_end - 1.0).max(0.0), t_end).unwrap_or_else(|_| Vector3::zeros());
    let alpha = mean_alpha(trace);
    let gains = gain_bound_check(trace);
    let lyap = lyapunov_monitor(trace);
    let axes = Axis::ALL
        .iter()
        .map(|&axis| {
            let i = axis.index();
            let steps = trace
                .meta
                .events
                .iter()
                .filter(|e| e.axis == axis)
                .filter_map(|e| step_metrics(trace, e).ok())
                .collect();
            AxisSummary {
                axis,
                steps,
                chattering: tv[i],
                mean_alpha: alpha[i],
                gain_coverage: gains.axes[i].coverage,
                xi_max: gains.axes[i].xi_max,
            }
        })
        .collect();
    RunSummary {
        scenario: trace.meta.scenario.clone(),
        controller: trace.meta.controller.clone(),
        records: trace.records.len(),
        aborted: trace.aborted(),
        faults: trace.faults.iter().map(|f| format!("t={}: {}", f.time, f.message)).collect(),
        axes,
        lyapunov_violations: lyap.violations.len(),
        max_delta_v_outside_band: lyap.max_delta_v_outside_band,
    }
}
