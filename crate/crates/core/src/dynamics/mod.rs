//! Quadrotor attitude dynamics.

mod kinematics;
mod plant;
mod torques;
mod types;

pub use kinematics::{
    angle_rates, euler_rate_transform, inverse_rate_transform, inverse_rate_transform_dot,
    rotation_matrix, skew, wrap_angle, GIMBAL_GUARD,
};
pub use plant::{attitude_derivative, AttitudeState, Plant, PlantMode};
pub use torques::{
    gyro_torques, mix_forces, mixer_matrix, rotor_speeds, thrust_torques, unmix_controls,
    Allocation, GyroTorques,
};
pub use types::{BodyRates, EulerAngles, InertiaMatrix, MotorForces, QuadParams, TorqueVector};
