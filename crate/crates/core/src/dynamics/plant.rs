//! Rigid-body attitude model used by the integrator.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::kinematics::{inverse_rate_transform, skew};
use super::torques::{gyro_torques, rotor_speeds, unmix_controls};
use super::types::{BodyRates, EulerAngles, InertiaMatrix, QuadParams, TorqueVector};
use crate::error::DynamicsError;

/// Which torques the plant integrates besides the control and the
/// scheduled disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantMode {
    /// `I w_dot = -S(w) I w + U + d`.
    #[default]
    ControlForm,
    /// Adds propeller gyroscopic torque and aerodynamic friction to `d`.
    FullTorque,
}

/// Attitude and body rates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttitudeState {
    pub angles: EulerAngles,
    pub rates: BodyRates,
}

impl AttitudeState {
    pub const fn new(angles: EulerAngles, rates: BodyRates) -> Self {
        Self { angles, rates }
    }

    pub fn is_finite(&self) -> bool {
        self.angles.to_vector().iter().all(|x| x.is_finite()) && self.rates.is_finite()
    }
}

/// `I^-1 (-S(w) I w + U + d)` with the effective inertia.
pub fn attitude_derivative(
    w: &BodyRates,
    u: &TorqueVector,
    d: &TorqueVector,
    inertia: &InertiaMatrix,
) -> Vector3<f64> {
    let i = inertia.effective();
    let i_inv = i.try_inverse().expect("positive-definite inertia is invertible");
    rate_derivative(&i, &i_inv, w, &(u.to_vector() + d.to_vector()))
}

fn rate_derivative(
    i: &Matrix3<f64>,
    i_inv: &Matrix3<f64>,
    w: &BodyRates,
    torque: &Vector3<f64>,
) -> Vector3<f64> {
    let wv = w.to_vector();
    i_inv * (-skew(&wv) * (i * wv) + torque)
}

/// The plant with its inertia inverse cached.
#[derive(Debug, Clone, Copy)]
pub struct Plant {
    params: QuadParams,
    mode: PlantMode,
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
}

impl Plant {
    pub fn new(params: QuadParams, mode: PlantMode) -> Result<Self, DynamicsError> {
        params.validate()?;
        let inertia = params.inertia.effective();
        let inertia_inv = inertia.try_inverse().ok_or(DynamicsError::IndefiniteInertia {
            min_eigenvalue: params.inertia.min_eigenvalue(),
        })?;
        Ok(Self {
            params,
            mode,
            inertia,
            inertia_inv,
        })
    }

    pub fn params(&self) -> &QuadParams {
        &self.params
    }

    pub fn mode(&self) -> PlantMode {
        self.mode
    }

    /// Torque the plant adds to `d` beyond the scheduled disturbance.
    pub fn internal_torque(&self, w: &BodyRates, u: &TorqueVector) -> TorqueVector {
        match self.mode {
            PlantMode::ControlForm => TorqueVector::ZERO,
            PlantMode::FullTorque => {
                let alloc = unmix_controls(u, self.params.hover_thrust(), &self.params);
                let speeds = rotor_speeds(&alloc.forces, &self.params);
                let g = gyro_torques(w, &speeds, &self.params);
                TorqueVector::from_vector(&(g.tau_p.to_vector() - g.tau_a.to_vector()))
            }
        }
    }

    /// `(theta_dot, w_dot)` at the given state.
    pub fn derivative(
        &self,
        state: &AttitudeState,
        u: &TorqueVector,
        d: &TorqueVector,
    ) -> Result<(Vector3<f64>, Vector3<f64>), DynamicsError> {
        let theta_dot = inverse_rate_transform(&state.angles)? * state.rates.to_vector();
        let extra = self.internal_torque(&state.rates, u);
        let torque = u.to_vector() + d.to_vector() + extra.to_vector();
        let w_dot = rate_derivative(&self.inertia, &self.inertia_inv, &state.rates, &torque);
        Ok((theta_dot, w_dot))
    }

    /// `1/2 w^T I w`.
    pub fn kinetic_energy(&self, w: &BodyRates) -> f64 {
        let wv = w.to_vector();
        0.5 * wv.dot(&(self.inertia * wv))
    }
}
