//! Rotor mixing and the auxiliary torque terms of the rigid-body model.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::kinematics::skew;
use super::types::{BodyRates, MotorForces, QuadParams, TorqueVector};

/// The 4x4 map from rotor forces to `(u_phi, u_theta, u_psi, u_z)`.
pub fn mixer_matrix(params: &QuadParams) -> Matrix4<f64> {
    let (l, c) = (params.l, params.c);
    Matrix4::new(
        0.0, l, 0.0, -l, //
        -l, 0.0, l, 0.0, //
        -c, c, -c, c, //
        1.0, 1.0, 1.0, 1.0,
    )
}

/// Body torques and total thrust produced by the rotor forces.
pub fn mix_forces(f: &MotorForces, params: &QuadParams) -> (TorqueVector, f64) {
    let out = mixer_matrix(params) * Vector4::from(f.as_array());
    (TorqueVector::new(out[0], out[1], out[2]), out[3])
}

/// Rotor forces for a commanded torque and thrust.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    /// Forces after clamping negative values to zero.
    pub forces: MotorForces,
    /// Exact inverse of the mixer, before clamping.
    pub raw: MotorForces,
    /// Set when any raw force was negative, i.e. the command is infeasible.
    pub saturated: bool,
}

/// Inverse of [`mix_forces`], with negative rotor forces clamped and flagged.
pub fn unmix_controls(u: &TorqueVector, thrust: f64, params: &QuadParams) -> Allocation {
    let yaw = u.u_psi / params.c;
    let plus = 0.5 * (thrust + yaw);
    let minus = 0.5 * (thrust - yaw);
    let roll = u.u_phi / params.l;
    let pitch = u.u_theta / params.l;
    let raw = MotorForces::new(
        0.5 * (minus - pitch),
        0.5 * (plus + roll),
        0.5 * (minus + pitch),
        0.5 * (plus - roll),
    );
    let saturated = raw.as_array().iter().any(|f| *f < 0.0);
    let forces = MotorForces::from_array(raw.as_array().map(|f| f.max(0.0)));
    Allocation {
        forces,
        raw,
        saturated,
    }
}

/// Thrust torques from the per-rotor formulas, using the yaw drag factor `b`.
pub fn thrust_torques(f: &MotorForces, params: &QuadParams) -> TorqueVector {
    TorqueVector::new(
        params.l * (f.f2 - f.f4),
        params.l * (f.f3 - f.f1),
        params.b * (-f.f1 + f.f2 - f.f3 + f.f4),
    )
}

/// Rotor speeds in rad/s from forces, assuming `F = k_f * Omega^2`.
pub fn rotor_speeds(f: &MotorForces, params: &QuadParams) -> [f64; 4] {
    f.as_array().map(|fi| (fi.max(0.0) / params.k_f).sqrt())
}

/// Body gyroscopic, propeller gyroscopic and aerodynamic friction torques.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GyroTorques {
    pub tau_b: TorqueVector,
    pub tau_p: TorqueVector,
    pub tau_a: TorqueVector,
}

/// Evaluates the three auxiliary torques with the effective inertia.
/// Friction is signed so that it always opposes rotation.
pub fn gyro_torques(w: &BodyRates, rotor_speeds: &[f64; 4], params: &QuadParams) -> GyroTorques {
    let wv = w.to_vector();
    let tau_b = -skew(&wv) * (params.inertia.effective() * wv);
    let omega_r = -rotor_speeds[0] + rotor_speeds[1] - rotor_speeds[2] + rotor_speeds[3];
    let tau_p = Vector3::new(params.i_r * omega_r * w.q, -params.i_r * omega_r * w.p, 0.0);
    let tau_a = params.k_a.component_mul(&wv.component_mul(&wv.abs()));
    GyroTorques {
        tau_b: TorqueVector::from_vector(&tau_b),
        tau_p: TorqueVector::from_vector(&tau_p),
        tau_a: TorqueVector::from_vector(&tau_a),
    }
}
