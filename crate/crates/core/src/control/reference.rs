//! Attitude references built from step events, with analytic first and
//! second derivatives.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::EulerAngles;

/// Desired attitude and its time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReferenceSignal {
    pub theta_d: EulerAngles,
    pub theta_d_dot: Vector3<f64>,
    pub theta_d_ddot: Vector3<f64>,
}

/// Body axis addressed by a step event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Roll,
    Pitch,
    Yaw,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Roll, Axis::Pitch, Axis::Yaw];

    pub fn index(self) -> usize {
        match self {
            Axis::Roll => 0,
            Axis::Pitch => 1,
            Axis::Yaw => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Roll => "roll",
            Axis::Pitch => "pitch",
            Axis::Yaw => "yaw",
        }
    }
}

/// Step of one axis to `target` radians at `time` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    pub time: f64,
    pub axis: Axis,
    pub target: f64,
}

/// How a step is smoothed before it reaches the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReferenceShaping {
    /// Raw step; derivatives are zero.
    Step,
    /// `1 - exp(-t/tau)`.
    FirstOrder { tau: f64 },
    /// Critically damped `1 - (1 + w t) exp(-w t)`.
    SecondOrder { omega_n: f64 },
}

impl Default for ReferenceShaping {
    fn default() -> Self {
        Self::SecondOrder { omega_n: 5.0 }
    }
}

impl ReferenceShaping {
    /// Unit-step response and its first two derivatives, `t` since the step.
    pub fn unit_response(&self, t: f64) -> (f64, f64, f64) {
        if t < 0.0 {
            return (0.0, 0.0, 0.0);
        }
        match *self {
            Self::Step => (1.0, 0.0, 0.0),
            Self::FirstOrder { tau } => {
                let z = (-t / tau).exp();
                (1.0 - z, z / tau, -z / (tau * tau))
            }
            Self::SecondOrder { omega_n: w } => {
                let z = (-w * t).exp();
                (
                    1.0 - (1.0 + w * t) * z,
                    w * w * t * z,
                    w * w * (1.0 - w * t) * z,
                )
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Self::Step => Ok(()),
            Self::FirstOrder { tau } if tau > 0.0 && tau.is_finite() => Ok(()),
            Self::SecondOrder { omega_n } if omega_n > 0.0 && omega_n.is_finite() => Ok(()),
            _ => Err("reference shaping constant must be positive".into()),
        }
    }
}

/// Evaluates the shaped reference for a time-sorted step schedule, starting
/// from `initial`. Each event moves its axis from the previous target to the
/// new one; the shaped responses superpose.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceGenerator {
    initial: Vector3<f64>,
    /// `(time, axis index, increment)`.
    increments: Vec<(f64, usize, f64)>,
    shaping: ReferenceShaping,
}

impl ReferenceGenerator {
    pub fn new(initial: EulerAngles, schedule: &[StepEvent], shaping: ReferenceShaping) -> Self {
        let initial = initial.to_vector();
        let mut last = initial;
        let mut increments = Vec::with_capacity(schedule.len());
        for ev in schedule {
            let i = ev.axis.index();
            increments.push((ev.time, i, ev.target - last[i]));
            last[i] = ev.target;
        }
        Self {
            initial,
            increments,
            shaping,
        }
    }

    pub fn at(&self, t: f64) -> ReferenceSignal {
        let mut v = self.initial;
        let mut vd = Vector3::zeros();
        let mut vdd = Vector3::zeros();
        for &(ts, i, delta) in &self.increments {
            if t >= ts {
                let (y, yd, ydd) = self.shaping.unit_response(t - ts);
                v[i] += delta * y;
                vd[i] += delta * yd;
                vdd[i] += delta * ydd;
            }
        }
        ReferenceSignal {
            theta_d: EulerAngles::from_vector(&v),
            theta_d_dot: vd,
            theta_d_ddot: vdd,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check_derivatives(shaping: ReferenceShaping) {
        let h = 1e-6;
        for &t in &[0.01, 0.1, 0.37, 1.2] {
            let (y0, d0, dd0) = shaping.unit_response(t);
            let (yp, dp, _) = shaping.unit_response(t + h);
            let (ym, dm, _) = shaping.unit_response(t - h);
            assert_relative_eq!((yp - ym) / (2.0 * h), d0, epsilon = 1e-6);
            assert_relative_eq!((dp - dm) / (2.0 * h), dd0, epsilon = 1e-4);
            assert!((0.0..=1.0).contains(&y0));
        }
    }

    #[test]
    fn shaped_derivatives_match_finite_differences() {
        check_derivatives(ReferenceShaping::FirstOrder { tau: 0.05 });
        check_derivatives(ReferenceShaping::SecondOrder { omega_n: 5.0 });
    }

    #[test]
    fn second_order_starts_at_rest() {
        let (y, yd, _) = ReferenceShaping::SecondOrder { omega_n: 5.0 }.unit_response(0.0);
        assert_eq!(y, 0.0);
        assert_eq!(yd, 0.0);
    }

    #[test]
    fn steps_superpose_from_previous_target() {
        let sched = [
            StepEvent { time: 0.5, axis: Axis::Yaw, target: 1.0 },
            StepEvent { time: 1.0, axis: Axis::Yaw, target: 0.25 },
        ];
        let g = ReferenceGenerator::new(EulerAngles::default(), &sched, ReferenceShaping::Step);
        assert_eq!(g.at(0.4).theta_d.psi, 0.0);
        assert_eq!(g.at(0.7).theta_d.psi, 1.0);
        assert_eq!(g.at(1.5).theta_d.psi, 0.25);
    }

    #[test]
    fn empty_schedule_holds_initial() {
        let g = ReferenceGenerator::new(EulerAngles::new(0.1, 0.2, 0.3), &[], ReferenceShaping::default());
        assert_eq!(g.at(3.0).theta_d, EulerAngles::new(0.1, 0.2, 0.3));
    }
}
