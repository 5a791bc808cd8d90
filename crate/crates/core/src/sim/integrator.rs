//! Fixed-step classical Runge-Kutta.

use nalgebra::SVector;

use crate::dynamics::{wrap_angle, AttitudeState, BodyRates, EulerAngles, Plant, TorqueVector};
use crate::error::DynamicsError;

/// One RK4 step of `x' = f(t, x)`.
pub fn rk4<const N: usize, E>(
    mut f: impl FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>, E>,
    t: f64,
    x: &SVector<f64, N>,
    dt: f64,
) -> Result<SVector<f64, N>, E> {
    let half = 0.5 * dt;
    let k1 = f(t, x)?;
    let k2 = f(t + half, &(x + k1 * half))?;
    let k3 = f(t + half, &(x + k2 * half))?;
    let k4 = f(t + dt, &(x + k3 * dt))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

fn pack(s: &AttitudeState) -> SVector<f64, 6> {
    let a = s.angles.to_vector();
    let w = s.rates.to_vector();
    SVector::<f64, 6>::from_column_slice(&[a[0], a[1], a[2], w[0], w[1], w[2]])
}

fn unpack(x: &SVector<f64, 6>) -> AttitudeState {
    AttitudeState::new(
        EulerAngles::new(x[0], x[1], x[2]),
        BodyRates::new(x[3], x[4], x[5]),
    )
}

/// Advances the plant by `dt` with `u` and `d` held constant and wraps yaw
/// into `(-pi, pi]`. No envelope check.
pub fn integrate(
    plant: &Plant,
    state: &AttitudeState,
    u: &TorqueVector,
    d: &TorqueVector,
    dt: f64,
) -> Result<AttitudeState, DynamicsError> {
    let f = |_t: f64, x: &SVector<f64, 6>| -> Result<SVector<f64, 6>, DynamicsError> {
        let (a, w) = plant.derivative(&unpack(x), u, d)?;
        Ok(SVector::<f64, 6>::from_column_slice(&[a[0], a[1], a[2], w[0], w[1], w[2]]))
    };
    let x = rk4(f, 0.0, &pack(state), dt)?;
    let mut next = unpack(&x);
    if !next.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    next.angles.psi = wrap_angle(next.angles.psi);
    Ok(next)
}

/// [`integrate`] followed by the attitude and rate envelope check.
pub fn rk4_step(
    plant: &Plant,
    state: &AttitudeState,
    u: &TorqueVector,
    d: &TorqueVector,
    dt: f64,
) -> Result<AttitudeState, DynamicsError> {
    let next = integrate(plant, state, u, d, dt)?;
    check_envelope(&next, plant.params().rate_cap)?;
    Ok(next)
}

/// Roll/pitch inside `(-pi/2, pi/2)` and every body rate within the cap.
pub fn check_envelope(state: &AttitudeState, rate_cap: f64) -> Result<(), DynamicsError> {
    let a = state.angles;
    if !a.within_envelope() {
        return Err(DynamicsError::AttitudeOutOfBounds {
            phi: a.phi,
            theta: a.theta,
        });
    }
    let rate = state.rates.max_abs();
    if rate > rate_cap {
        return Err(DynamicsError::RateCapExceeded { rate, cap: rate_cap });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PlantMode, QuadParams};
    use nalgebra::Vector2;

    #[test]
    fn equilibrium_is_fixed() {
        let plant = Plant::new(QuadParams::solo(), PlantMode::ControlForm).unwrap();
        let s = AttitudeState::default();
        let z = TorqueVector::ZERO;
        assert_eq!(rk4_step(&plant, &s, &z, &z, 1e-3).unwrap(), s);
    }

    #[test]
    fn rk4_integrates_exponential() {
        let f = |_t: f64, x: &Vector2<f64>| -> Result<Vector2<f64>, ()> { Ok(-*x) };
        let mut x = Vector2::new(1.0, 2.0);
        for _ in 0..100 {
            x = rk4(f, 0.0, &x, 0.01).unwrap();
        }
        assert!((x[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rate_cap_is_enforced() {
        let plant = Plant::new(QuadParams::solo(), PlantMode::ControlForm).unwrap();
        let s = AttitudeState::new(EulerAngles::default(), BodyRates::new(49.99, 0.0, 0.0));
        let u = TorqueVector::new(5.0, 0.0, 0.0);
        let err = rk4_step(&plant, &s, &u, &TorqueVector::ZERO, 1e-2).unwrap_err();
        assert!(matches!(err, DynamicsError::RateCapExceeded { .. }));
    }
}
