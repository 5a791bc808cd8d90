//! Sliding manifold `sigma = e_dot + Lambda e` and the tracking errors it is
//! built from.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::reference::ReferenceSignal;
use crate::dynamics::{
    inverse_rate_transform, inverse_rate_transform_dot, skew, wrap_angle, AttitudeState,
    BodyRates, InertiaMatrix, TorqueVector,
};
use crate::error::ControlError;

/// Diagonal surface gains, 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGains {
    pub lambda_phi: f64,
    pub lambda_theta: f64,
    pub lambda_psi: f64,
}

impl SurfaceGains {
    pub fn new(lambda_phi: f64, lambda_theta: f64, lambda_psi: f64) -> Result<Self, ControlError> {
        let g = Self {
            lambda_phi,
            lambda_theta,
            lambda_psi,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        if self.as_vector().iter().all(|l| *l > 0.0 && l.is_finite()) {
            Ok(())
        } else {
            Err(ControlError::InvalidParameter {
                name: "lambda",
                reason: "surface gains must be positive".into(),
            })
        }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.lambda_phi, self.lambda_theta, self.lambda_psi)
    }
}

impl Default for SurfaceGains {
    fn default() -> Self {
        Self {
            lambda_phi: 4.68,
            lambda_theta: 4.68,
            lambda_psi: 3.84,
        }
    }
}

/// Per-axis sliding variable and its rate, in the controller's units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SlidingState {
    pub sigma: Vector3<f64>,
    pub sigma_dot: Vector3<f64>,
}

/// Angular units of the sliding variables.
///
/// The adaptation dead band and rate are plain numbers; reading them in
/// degrees gives a dead band of 0.7 deg/s on the surface rather than
/// 0.7 rad/s (40 deg/s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlidingUnits {
    #[default]
    Degrees,
    Radians,
}

impl SlidingUnits {
    /// Multiplier from radians to these units.
    pub fn scale(self) -> f64 {
        match self {
            Self::Degrees => 180.0 / std::f64::consts::PI,
            Self::Radians => 1.0,
        }
    }
}

/// How the controller turns body rates into Euler-angle rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKinematics {
    /// `theta_dot = H^-1 w`.
    #[default]
    Exact,
    /// `theta_dot ~ w`.
    SmallAngle,
}

/// `sigma_i = e_dot_i + lambda_i e_i`.
pub fn sliding_surface(e: &Vector3<f64>, e_dot: &Vector3<f64>, gains: &SurfaceGains) -> Vector3<f64> {
    e_dot + gains.as_vector().component_mul(e)
}

/// Attitude error `theta - theta_d` (yaw wrapped) and its rate, in radians.
pub fn tracking_error(
    meas: &AttitudeState,
    reference: &ReferenceSignal,
    kinematics: ControllerKinematics,
) -> Result<(Vector3<f64>, Vector3<f64>), ControlError> {
    let mut e = meas.angles.to_vector() - reference.theta_d.to_vector();
    e[2] = wrap_angle(e[2]);
    let rates = match kinematics {
        ControllerKinematics::Exact => inverse_rate_transform(&meas.angles)? * meas.rates.to_vector(),
        ControllerKinematics::SmallAngle => meas.rates.to_vector(),
    };
    Ok((e, rates - reference.theta_d_dot))
}

/// Nominal-model prediction of `sigma_dot` as an affine function of the
/// control torque, `sigma_dot = c + B U`, in the controller's units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaModel {
    pub c: Vector3<f64>,
    pub b: Matrix3<f64>,
}

impl SigmaModel {
    pub fn predict(&self, u: &Vector3<f64>) -> Vector3<f64> {
        self.c + self.b * u
    }
}

/// Builds [`SigmaModel`] from the nominal inertia with `d = 0`.
///
/// `e_dot` is in the controller's units, everything else in SI.
pub fn sigma_model(
    meas: &AttitudeState,
    reference: &ReferenceSignal,
    e_dot: &Vector3<f64>,
    nominal: &Matrix3<f64>,
    gains: &SurfaceGains,
    kinematics: ControllerKinematics,
    scale: f64,
) -> Result<SigmaModel, ControlError> {
    let w = meas.rates.to_vector();
    let i_inv = nominal
        .try_inverse()
        .ok_or(ControlError::NonFinite { what: "nominal inertia inverse" })?;
    let free = i_inv * (-skew(&w) * (nominal * w));
    let (m, m_dot_w) = match kinematics {
        ControllerKinematics::Exact => {
            let m = inverse_rate_transform(&meas.angles)?;
            let m_dot = inverse_rate_transform_dot(&meas.angles, &(m * w))?;
            (m, m_dot * w)
        }
        ControllerKinematics::SmallAngle => (Matrix3::identity(), Vector3::zeros()),
    };
    let c = (m_dot_w + m * free - reference.theta_d_ddot) * scale
        + gains.as_vector().component_mul(e_dot);
    let b = m * i_inv * scale;
    Ok(SigmaModel { c, b })
}

/// Small-angle estimate `-theta_d_ddot + Lambda e_dot + I0^-1 (-S(w) I0 w + U)`
/// with the nominal inertia only and `d = 0`, in radians.
pub fn sigma_derivative(
    e_dot: &Vector3<f64>,
    reference: &ReferenceSignal,
    w: &BodyRates,
    u_prev: &TorqueVector,
    inertia: &InertiaMatrix,
    gains: &SurfaceGains,
) -> Vector3<f64> {
    let i0 = inertia.nominal();
    let i_inv = Matrix3::from_diagonal(&i0.diagonal().map(|x| 1.0 / x));
    let wv = w.to_vector();
    -reference.theta_d_ddot
        + gains.as_vector().component_mul(e_dot)
        + i_inv * (-skew(&wv) * (i0 * wv) + u_prev.to_vector())
}
