//! Fixed-gain first-order sliding mode and PID baselines.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::qcsm::sign;
use super::reference::ReferenceSignal;
use super::sliding::{sliding_surface, tracking_error, ControllerKinematics, SlidingState, SlidingUnits, SurfaceGains};
use super::ControlOutput;
use crate::dynamics::{inverse_rate_transform, wrap_angle, AttitudeState, TorqueVector};
use crate::error::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmcConfig {
    pub gains: SurfaceGains,
    /// Switching gain per axis, N·m.
    pub alpha: Vector3<f64>,
    pub u_max: f64,
    pub units: SlidingUnits,
    pub kinematics: ControllerKinematics,
}

impl Default for SmcConfig {
    fn default() -> Self {
        Self {
            gains: SurfaceGains::default(),
            alpha: Vector3::repeat(1.24),
            u_max: 5.0,
            units: SlidingUnits::default(),
            kinematics: ControllerKinematics::default(),
        }
    }
}

impl SmcConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        self.gains.validate()?;
        if self.alpha.iter().any(|a| !(*a > 0.0)) || !(self.u_max > 0.0) {
            return Err(ControlError::InvalidParameter {
                name: "alpha",
                reason: "switching gains and u_max must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Previous surface value, kept only to report a finite-difference rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmcState {
    prev_sigma: Option<Vector3<f64>>,
}

/// `U_i = -alpha_i sign(sigma_i)`.
pub fn smc_step(
    meas: &AttitudeState,
    reference: &ReferenceSignal,
    state: &SmcState,
    cfg: &SmcConfig,
    dt: f64,
) -> Result<(ControlOutput, SmcState), ControlError> {
    let scale = cfg.units.scale();
    let (e, e_dot) = tracking_error(meas, reference, cfg.kinematics)?;
    let sigma = sliding_surface(&(e * scale), &(e_dot * scale), &cfg.gains);
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(ControlError::NonFinite { what: "sigma" });
    }
    let u = Vector3::from_fn(|i, _| (-cfg.alpha[i] * sign(sigma[i])).clamp(-cfg.u_max, cfg.u_max));
    let sigma_dot = state.prev_sigma.map_or_else(Vector3::zeros, |p| (sigma - p) / dt);
    let out = ControlOutput {
        torque: TorqueVector::from_vector(&u),
        sliding: SlidingState { sigma, sigma_dot },
        alpha: cfg.alpha,
    };
    Ok((out, SmcState { prev_sigma: Some(sigma) }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: Vector3<f64>,
    pub ki: Vector3<f64>,
    pub kd: Vector3<f64>,
    /// Anti-windup clamp on the integral of the error, rad·s.
    pub integral_limit: Vector3<f64>,
}

/// Pole-placement parameters for [`PidGains::tuned`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidTuning {
    /// Natural frequency of the proportional-derivative pair, rad/s.
    pub omega_n: f64,
    pub zeta: f64,
    /// Integral gain as a fraction of `kp * omega_n`.
    pub integral_ratio: f64,
}

impl Default for PidTuning {
    /// Winner of the grid search over `omega_n`, `zeta` and `integral_ratio`
    /// on the nominal step scenario (see the `pid_tuning` test).
    fn default() -> Self {
        Self {
            omega_n: 20.0,
            zeta: 1.0,
            integral_ratio: 0.2,
        }
    }
}

impl PidGains {
    /// Gains for `I theta_ddot = U` per axis:
    /// `kp = I w^2`, `kd = 2 zeta I w`, `ki = integral_ratio kp w`.
    pub fn tuned(inertia_diag: &Vector3<f64>, tuning: &PidTuning) -> Self {
        let w = tuning.omega_n;
        let kp = inertia_diag * w * w;
        Self {
            ki: kp * (w * tuning.integral_ratio),
            kd: inertia_diag * (2.0 * tuning.zeta * w),
            kp,
            integral_limit: Vector3::repeat(0.5),
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let all = self.kp.iter().chain(self.ki.iter()).chain(self.kd.iter());
        if all.clone().any(|k| !(*k >= 0.0)) || self.integral_limit.iter().any(|l| !(*l >= 0.0)) {
            return Err(ControlError::InvalidParameter {
                name: "pid",
                reason: "gains and integral limit must be non-negative".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidConfig {
    pub gains: PidGains,
    pub u_max: f64,
    pub kinematics: ControllerKinematics,
    /// Surface used only to report `sigma` in traces, radians.
    pub report_gains: SurfaceGains,
}

impl PidConfig {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            u_max: 5.0,
            kinematics: ControllerKinematics::default(),
            report_gains: SurfaceGains::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: Vector3<f64>,
}

/// `U = kp e + ki int(e) - kd theta_dot` on `e = theta_d - theta`, with the
/// integral clamped and the output limited to `u_max`.
pub fn pid_step(
    meas: &AttitudeState,
    reference: &ReferenceSignal,
    state: &PidState,
    cfg: &PidConfig,
    dt: f64,
) -> Result<(ControlOutput, PidState), ControlError> {
    let g = &cfg.gains;
    let mut e = reference.theta_d.to_vector() - meas.angles.to_vector();
    e[2] = wrap_angle(e[2]);
    let theta_dot = match cfg.kinematics {
        ControllerKinematics::Exact => inverse_rate_transform(&meas.angles)? * meas.rates.to_vector(),
        ControllerKinematics::SmallAngle => meas.rates.to_vector(),
    };
    let integral = Vector3::from_fn(|i, _| {
        (state.integral[i] + e[i] * dt).clamp(-g.integral_limit[i], g.integral_limit[i])
    });
    let u = (g.kp.component_mul(&e) + g.ki.component_mul(&integral) - g.kd.component_mul(&theta_dot))
        .map(|x| x.clamp(-cfg.u_max, cfg.u_max));
    if u.iter().any(|x| !x.is_finite()) {
        return Err(ControlError::NonFinite { what: "control" });
    }
    let (se, se_dot) = tracking_error(meas, reference, cfg.kinematics)?;
    let gains = cfg.report_gains.as_vector();
    let sliding = SlidingState {
        sigma: se_dot + gains.component_mul(&se),
        sigma_dot: Vector3::zeros(),
    };
    let out = ControlOutput {
        torque: TorqueVector::from_vector(&u),
        sliding,
        alpha: Vector3::zeros(),
    };
    Ok((out, PidState { integral }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{BodyRates, EulerAngles};

    #[test]
    fn smc_zero_surface_gives_zero() {
        let (out, _) = smc_step(
            &AttitudeState::default(),
            &ReferenceSignal::default(),
            &SmcState::default(),
            &SmcConfig::default(),
            1e-3,
        )
        .unwrap();
        assert_eq!(out.torque, TorqueVector::ZERO);
    }

    #[test]
    fn smc_switches_against_surface() {
        // e = 0.1 rad roll gives sigma = 0.468 rad/s in radian units.
        let cfg = SmcConfig {
            units: SlidingUnits::Radians,
            ..Default::default()
        };
        let meas = AttitudeState::new(EulerAngles::new(0.1, 0.0, 0.0), BodyRates::default());
        let (out, _) = smc_step(&meas, &ReferenceSignal::default(), &SmcState::default(), &cfg, 1e-3).unwrap();
        assert!((out.sliding.sigma[0] - 0.468).abs() < 1e-15);
        assert_eq!(out.torque, TorqueVector::new(-1.24, 0.0, 0.0));
    }

    fn p_only() -> PidConfig {
        PidConfig::new(PidGains {
            kp: Vector3::repeat(1.0),
            ki: Vector3::zeros(),
            kd: Vector3::zeros(),
            integral_limit: Vector3::repeat(1.0),
        })
    }

    #[test]
    fn pid_zero_error_gives_zero() {
        let cfg = PidConfig::new(PidGains::tuned(&Vector3::new(0.01, 0.02, 0.03), &PidTuning::default()));
        let mut state = PidState::default();
        for _ in 0..100 {
            let (out, next) =
                pid_step(&AttitudeState::default(), &ReferenceSignal::default(), &state, &cfg, 1e-3).unwrap();
            assert_eq!(out.torque, TorqueVector::ZERO);
            state = next;
        }
    }

    #[test]
    fn pid_pure_proportional() {
        let reference = ReferenceSignal {
            theta_d: EulerAngles::new(0.1, 0.0, 0.0),
            ..Default::default()
        };
        let (out, _) = pid_step(&AttitudeState::default(), &reference, &PidState::default(), &p_only(), 1e-3).unwrap();
        assert_eq!(out.torque, TorqueVector::new(0.1, 0.0, 0.0));
    }

    #[test]
    fn pid_integral_is_clamped() {
        let mut cfg = p_only();
        cfg.gains.ki = Vector3::repeat(1.0);
        cfg.gains.integral_limit = Vector3::repeat(0.05);
        let reference = ReferenceSignal {
            theta_d: EulerAngles::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        let mut state = PidState::default();
        for _ in 0..1000 {
            state = pid_step(&AttitudeState::default(), &reference, &state, &cfg, 1e-3).unwrap().1;
        }
        assert_eq!(state.integral[0], 0.05);
    }
}
