use thiserror::Error;

/// Faults raised by the plant model and its integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// `cos(theta)` is too close to zero for the Euler-rate transform.
    #[error("degenerate attitude: cos(theta) = {cos_theta:e} is below the gimbal-lock guard")]
    DegenerateAttitude { cos_theta: f64 },

    /// A body rate left the configured envelope.
    #[error("body rate {rate:.3} rad/s exceeds the cap of {cap} rad/s")]
    RateCapExceeded { rate: f64, cap: f64 },

    /// Roll or pitch left (-pi/2, pi/2).
    #[error("attitude out of bounds: phi = {phi:.4} rad, theta = {theta:.4} rad")]
    AttitudeOutOfBounds { phi: f64, theta: f64 },

    /// The effective inertia is not positive-definite.
    #[error("inertia is not positive-definite (smallest eigenvalue {min_eigenvalue:e})")]
    IndefiniteInertia { min_eigenvalue: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in plant state")]
    NonFinite,
}

/// Errors raised by the controllers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("non-finite intermediate `{what}` in controller")]
    NonFinite { what: &'static str },

    #[error("invalid controller parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Scenario validation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error(transparent)]
    Dynamics(#[from] DynamicsError),

    #[error(transparent)]
    Control(#[from] ControlError),
}
