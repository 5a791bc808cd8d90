//! Adaptive gain law with a dead band, a floor and a recovery rate.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::qcsm::sign;
use crate::error::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationParams {
    /// Initial gain, N·m.
    pub alpha_0: Vector3<f64>,
    /// Adaptation rate.
    pub omega_bar: Vector3<f64>,
    /// Dead-band half width on `|sigma|`.
    pub epsilon: Vector3<f64>,
    /// Recovery rate below the floor, N·m/s.
    pub eta: Vector3<f64>,
    /// Gain floor, N·m.
    pub alpha_m: Vector3<f64>,
    /// Upper clamp, N·m.
    pub alpha_max: f64,
}

impl Default for AdaptationParams {
    fn default() -> Self {
        Self {
            alpha_0: Vector3::repeat(1.24),
            omega_bar: Vector3::repeat(200.0),
            epsilon: Vector3::repeat(0.7),
            eta: Vector3::repeat(0.01),
            alpha_m: Vector3::new(0.01, 0.02, 0.03),
            alpha_max: 5.0,
        }
    }
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<(), ControlError> {
        let fields = [
            ("alpha_0", &self.alpha_0),
            ("omega_bar", &self.omega_bar),
            ("epsilon", &self.epsilon),
            ("eta", &self.eta),
            ("alpha_m", &self.alpha_m),
        ];
        for (name, v) in fields {
            if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                return Err(ControlError::InvalidParameter {
                    name,
                    reason: "every component must be positive".into(),
                });
            }
        }
        if !(self.alpha_max > 0.0) {
            return Err(ControlError::InvalidParameter {
                name: "alpha_max",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Current per-axis gains together with the law that moves them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveGainState {
    pub alpha: Vector3<f64>,
    pub params: AdaptationParams,
}

impl AdaptiveGainState {
    pub fn new(params: AdaptationParams) -> Self {
        Self {
            alpha: params.alpha_0.map(|a| a.min(params.alpha_max)),
            params,
        }
    }

    /// Per-axis `alpha_dot` at the current gains.
    pub fn rate(&self, sigma: &Vector3<f64>) -> Vector3<f64> {
        let p = &self.params;
        Vector3::from_fn(|i, _| {
            if self.alpha[i] > p.alpha_m[i] {
                let s = sigma[i].abs();
                p.omega_bar[i] * s * sign(s - p.epsilon[i])
            } else {
                p.eta[i]
            }
        })
    }
}

/// One forward-Euler step of the gain law. A gain above its floor never
/// decays past the floor, and every gain is clamped at `alpha_max`.
pub fn adapt_gain(state: &AdaptiveGainState, sigma: &Vector3<f64>, dt: f64) -> AdaptiveGainState {
    let p = &state.params;
    let rate = state.rate(sigma);
    let alpha = Vector3::from_fn(|i, _| {
        let a = state.alpha[i];
        let next = a + rate[i] * dt;
        let next = if a > p.alpha_m[i] { next.max(p.alpha_m[i]) } else { next };
        next.min(p.alpha_max)
    });
    AdaptiveGainState { alpha, params: *p }
}
