use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;

/// Roll, pitch and yaw in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub const fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }

    pub fn from_degrees(phi: f64, theta: f64, psi: f64) -> Self {
        Self::new(phi.to_radians(), theta.to_radians(), psi.to_radians())
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.phi, self.theta, self.psi)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// `|phi| < pi/2`, `|theta| < pi/2`, `|psi| <= pi`.
    pub fn within_envelope(&self) -> bool {
        use std::f64::consts::{FRAC_PI_2, PI};
        self.phi.abs() < FRAC_PI_2 && self.theta.abs() < FRAC_PI_2 && self.psi.abs() <= PI
    }
}

/// Body angular velocity `(p, q, r)` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyRates {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BodyRates {
    pub const fn new(p: f64, q: f64, r: f64) -> Self {
        Self { p, q, r }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.p, self.q, self.r)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.p.abs().max(self.q.abs()).max(self.r.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite() && self.r.is_finite()
    }
}

/// Torques about the body axes, N·m.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorqueVector {
    pub u_phi: f64,
    pub u_theta: f64,
    pub u_psi: f64,
}

impl TorqueVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(u_phi: f64, u_theta: f64, u_psi: f64) -> Self {
        Self {
            u_phi,
            u_theta,
            u_psi,
        }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.u_phi, self.u_theta, self.u_psi)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl std::ops::Add for TorqueVector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.u_phi + rhs.u_phi,
            self.u_theta + rhs.u_theta,
            self.u_psi + rhs.u_psi,
        )
    }
}

/// Per-rotor thrust, N. Rotors only push.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotorForces {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl MotorForces {
    pub const fn new(f1: f64, f2: f64, f3: f64, f4: f64) -> Self {
        Self { f1, f2, f3, f4 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }

    pub fn from_array(f: [f64; 4]) -> Self {
        Self::new(f[0], f[1], f[2], f[3])
    }
}

/// Inertia split into the diagonal nominal part the controller knows and an
/// uncertain symmetric part that only the plant sees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaMatrix {
    nominal: Matrix3<f64>,
    delta: Matrix3<f64>,
}

impl InertiaMatrix {
    /// Diagonal nominal inertia with no uncertainty.
    pub fn diagonal(ixx: f64, iyy: f64, izz: f64) -> Result<Self, DynamicsError> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(ixx, iyy, izz)), Matrix3::zeros())
    }

    pub fn new(nominal: Matrix3<f64>, delta: Matrix3<f64>) -> Result<Self, DynamicsError> {
        for i in 0..3 {
            for j in 0..3 {
                if i != j && nominal[(i, j)] != 0.0 {
                    return Err(DynamicsError::InvalidParameter {
                        name: "inertia.nominal",
                        reason: "nominal inertia must be diagonal".into(),
                    });
                }
            }
            if !(nominal[(i, i)] > 0.0) || !nominal[(i, i)].is_finite() {
                return Err(DynamicsError::InvalidParameter {
                    name: "inertia.nominal",
                    reason: format!("diagonal entry {i} must be positive"),
                });
            }
        }
        if (delta - delta.transpose()).abs().max() > 1e-15 || delta.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::InvalidParameter {
                name: "inertia.delta",
                reason: "uncertainty must be a finite symmetric matrix".into(),
            });
        }
        let inertia = Self { nominal, delta };
        let min_eigenvalue = inertia.min_eigenvalue();
        if !(min_eigenvalue > 0.0) {
            return Err(DynamicsError::IndefiniteInertia { min_eigenvalue });
        }
        Ok(inertia)
    }

    pub fn nominal(&self) -> &Matrix3<f64> {
        &self.nominal
    }

    pub fn delta(&self) -> &Matrix3<f64> {
        &self.delta
    }

    pub fn effective(&self) -> Matrix3<f64> {
        self.nominal + self.delta
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.effective()).eigenvalues.min()
    }

    /// Same nominal part, different uncertainty.
    pub fn with_delta(&self, delta: Matrix3<f64>) -> Result<Self, DynamicsError> {
        Self::new(self.nominal, delta)
    }
}

/// Physical parameters of the airframe.
///
/// Defaults are the 3DR Solo values (`m`, `l`, `g`, inertia). The yaw
/// coefficient, friction factors, rotor inertia and thrust coefficient are
/// not published for that airframe; the defaults below are plausible
/// placeholders and can be overridden from the scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    /// kg
    pub m: f64,
    /// Arm length, m.
    pub l: f64,
    /// m/s²
    pub g: f64,
    pub inertia: InertiaMatrix,
    /// Yaw drag factor of the per-rotor torque formulas.
    pub b: f64,
    /// Force-to-torque coefficient of the mixer matrix, m.
    pub c: f64,
    /// Aerodynamic friction coefficients, N·m·s²/rad².
    pub k_a: Vector3<f64>,
    /// Rotor inertia, kg·m².
    pub i_r: f64,
    /// Rotor thrust coefficient `F = k_f Ω²`, N·s²; only used to recover
    /// rotor speeds for the propeller gyroscopic torque.
    pub k_f: f64,
    /// Body-rate envelope, rad/s.
    pub rate_cap: f64,
}

impl QuadParams {
    /// Solo airframe with the documented placeholder coefficients.
    pub fn solo() -> Self {
        Self {
            m: 1.50,
            l: 0.205,
            g: 9.81,
            inertia: InertiaMatrix::diagonal(8.85e-3, 15.5e-3, 23.09e-3)
                .expect("tabulated inertia is positive"),
            b: 0.01,
            c: 0.01,
            k_a: Vector3::new(1e-4, 1e-4, 1e-4),
            i_r: 3.4e-5,
            k_f: 6.0e-6,
            rate_cap: 50.0,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = [
            ("m", self.m),
            ("l", self.l),
            ("g", self.g),
            ("b", self.b),
            ("c", self.c),
            ("k_f", self.k_f),
            ("rate_cap", self.rate_cap),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DynamicsError::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {value}"),
                });
            }
        }
        if self.k_a.iter().any(|k| !(*k >= 0.0)) {
            return Err(DynamicsError::InvalidParameter {
                name: "k_a",
                reason: "friction coefficients must be non-negative".into(),
            });
        }
        if !(self.i_r >= 0.0) {
            return Err(DynamicsError::InvalidParameter {
                name: "i_r",
                reason: "rotor inertia must be non-negative".into(),
            });
        }
        Ok(())
    }

    /// Thrust that balances gravity.
    pub fn hover_thrust(&self) -> f64 {
        self.m * self.g
    }
}

impl Default for QuadParams {
    fn default() -> Self {
        Self::solo()
    }
}
