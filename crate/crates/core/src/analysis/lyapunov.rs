//! Numerical descent monitor for the sliding-mode Lyapunov functions.

use nalgebra::Vector3;
use serde::Serialize;

use crate::sim::SimTrace;

/// Largest per-step increase of `V` tolerated outside the dead band.
pub const DEFAULT_TOL_V: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    /// Weights of the gain-error terms.
    pub gamma: Vector3<f64>,
    pub tol_v: f64,
    /// Dead band in the trace's sliding units; falls back to the trace
    /// metadata, then to 0.7 on every axis.
    pub epsilon: Option<Vector3<f64>>,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            gamma: Vector3::repeat(1.0),
            tol_v: DEFAULT_TOL_V,
            epsilon: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovRecord {
    pub time: f64,
    /// `1/2 sigma^T I sigma` with `sigma` in rad/s and the plant inertia.
    pub v0: f64,
    /// `v0 + sum (alpha_i - alpha_M,i)^2 / (2 gamma_i)`, `alpha_M` the running max.
    pub v: f64,
    /// `v` minus the previous record's `v`; zero for the first record.
    pub delta_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub time: f64,
    pub delta_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub records: Vec<LyapunovRecord>,
    /// Steps with `delta_v > tol_v` while every `|sigma_i| > epsilon_i` at
    /// both ends of the step.
    pub violations: Vec<Violation>,
    /// Largest `delta_v` among the checked steps, or `-inf` if none.
    pub max_delta_v_outside_band: f64,
    pub checked_steps: usize,
}

pub fn lyapunov_monitor(trace: &SimTrace) -> LyapunovReport {
    lyapunov_monitor_with(trace, &LyapunovOptions::default())
}

pub fn lyapunov_monitor_with(trace: &SimTrace, opts: &LyapunovOptions) -> LyapunovReport {
    let inertia = trace.meta.effective_inertia;
    let scale = trace.meta.sliding_scale;
    let eps = opts
        .epsilon
        .or(trace.meta.epsilon)
        .unwrap_or_else(|| Vector3::repeat(0.7));
    let outside = |s: &Vector3<f64>| (0..3).all(|i| s[i].abs() > eps[i]);

    let mut peak = Vector3::repeat(f64::NEG_INFINITY);
    let mut records = Vec::with_capacity(trace.records.len());
    let mut violations = Vec::new();
    let mut max_dv = f64::NEG_INFINITY;
    let mut checked = 0;
    let mut prev: Option<(f64, bool)> = None;
    for r in &trace.records {
        let s = r.sigma / scale;
        let v0 = 0.5 * s.dot(&(inertia * s));
        peak = peak.sup(&r.alpha);
        let gain_term: f64 = (0..3)
            .map(|i| (r.alpha[i] - peak[i]).powi(2) / (2.0 * opts.gamma[i]))
            .sum();
        let v = v0 + gain_term;
        let out_now = outside(&r.sigma);
        let delta_v = prev.map_or(0.0, |(pv, _)| v - pv);
        if let Some((_, out_prev)) = prev {
            if out_prev && out_now {
                checked += 1;
                max_dv = max_dv.max(delta_v);
                if delta_v > opts.tol_v {
                    violations.push(Violation { time: r.time, delta_v });
                }
            }
        }
        records.push(LyapunovRecord {
            time: r.time,
            v0,
            v,
            delta_v,
        });
        prev = Some((v, out_now));
    }
    LyapunovReport {
        records,
        violations,
        max_delta_v_outside_band: max_dv,
        checked_steps: checked,
    }
}
