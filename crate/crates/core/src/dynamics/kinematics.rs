//! Euler-angle kinematics: the body-rate transform, its inverse and time
//! derivative, the body-to-inertial rotation, and the skew operator.

use nalgebra::{Matrix3, Vector3};

use super::types::{BodyRates, EulerAngles};
use crate::error::DynamicsError;

/// Below this `|cos(theta)|` the Euler-rate transform is treated as singular.
pub const GIMBAL_GUARD: f64 = 1e-9;

fn guard(theta: f64) -> Result<f64, DynamicsError> {
    let ct = theta.cos();
    if ct.abs() < GIMBAL_GUARD {
        Err(DynamicsError::DegenerateAttitude { cos_theta: ct })
    } else {
        Ok(ct)
    }
}

/// `H` with `omega = H * theta_dot`.
pub fn euler_rate_transform(angles: &EulerAngles) -> Result<Matrix3<f64>, DynamicsError> {
    let ct = guard(angles.theta)?;
    let (sp, cp) = angles.phi.sin_cos();
    let st = angles.theta.sin();
    Ok(Matrix3::new(
        1.0, 0.0, -st, //
        0.0, cp, ct * sp, //
        0.0, -sp, ct * cp,
    ))
}

/// `H^-1` with `theta_dot = H^-1 * omega`, built in closed form.
pub fn inverse_rate_transform(angles: &EulerAngles) -> Result<Matrix3<f64>, DynamicsError> {
    let ct = guard(angles.theta)?;
    let (sp, cp) = angles.phi.sin_cos();
    let tt = angles.theta.sin() / ct;
    Ok(Matrix3::new(
        1.0, sp * tt, cp * tt, //
        0.0, cp, -sp, //
        0.0, sp / ct, cp / ct,
    ))
}

/// Time derivative of `H^-1` along `angle_rates = (phi_dot, theta_dot, psi_dot)`.
pub fn inverse_rate_transform_dot(
    angles: &EulerAngles,
    angle_rates: &Vector3<f64>,
) -> Result<Matrix3<f64>, DynamicsError> {
    let ct = guard(angles.theta)?;
    let (sp, cp) = angles.phi.sin_cos();
    let st = angles.theta.sin();
    let tt = st / ct;
    let sec2 = 1.0 / (ct * ct);
    let d_phi = Matrix3::new(
        0.0, cp * tt, -sp * tt, //
        0.0, -sp, -cp, //
        0.0, cp / ct, -sp / ct,
    );
    let d_theta = Matrix3::new(
        0.0, sp * sec2, cp * sec2, //
        0.0, 0.0, 0.0, //
        0.0, sp * st * sec2, cp * st * sec2,
    );
    Ok(d_phi * angle_rates[0] + d_theta * angle_rates[1])
}

/// Euler-angle rates from body rates.
pub fn angle_rates(angles: &EulerAngles, w: &BodyRates) -> Result<Vector3<f64>, DynamicsError> {
    Ok(inverse_rate_transform(angles)? * w.to_vector())
}

/// Body-to-inertial rotation for the Z-Y-X Euler sequence.
pub fn rotation_matrix(angles: &EulerAngles) -> Matrix3<f64> {
    let (sp, cp) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let (ss, cs) = angles.psi.sin_cos();
    Matrix3::new(
        cs * ct,
        cs * st * sp - ss * cp,
        cs * st * cp + ss * sp,
        ss * ct,
        ss * st * sp + cs * cp,
        ss * st * cp - cs * sp,
        -st,
        ct * sp,
        ct * cp,
    )
}

/// Cross-product matrix: `skew(a) * b == a x b`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -w[2], w[1], //
        w[2], 0.0, -w[0], //
        -w[1], w[0], 0.0,
    )
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

    #[test]
    fn h_at_level_attitude_is_identity() {
        let h = euler_rate_transform(&EulerAngles::default()).unwrap();
        assert_eq!(h, Matrix3::identity());
    }

    #[test]
    fn h_near_gimbal_lock_is_rejected() {
        let err = euler_rate_transform(&EulerAngles::new(0.0, FRAC_PI_2 - 1e-12, 0.0)).unwrap_err();
        assert!(matches!(err, DynamicsError::DegenerateAttitude { .. }));
        assert!(inverse_rate_transform(&EulerAngles::new(0.0, FRAC_PI_2 - 1e-12, 0.0)).is_err());
    }

    #[test]
    fn h_matches_hand_evaluation() {
        let a = EulerAngles::new(FRAC_PI_6, FRAC_PI_3, 0.0);
        let h = euler_rate_transform(&a).unwrap();
        let s3 = 3f64.sqrt();
        assert_relative_eq!(h[(0, 0)], 1.0);
        assert_relative_eq!(h[(0, 1)], 0.0);
        assert_relative_eq!(h[(0, 2)], -s3 / 2.0, epsilon = 1e-15);
        // phi = 30 deg, theta = 60 deg, theta_dot = (1, 1, 1):
        // p = 1 - sin60, q = cos30 + cos60 sin30, r = -sin30 + cos60 cos30
        let w = h * Vector3::new(1.0, 1.0, 1.0);
        assert_relative_eq!(w[0], 1.0 - s3 / 2.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], s3 / 2.0 + 0.25, epsilon = 1e-15);
        assert_relative_eq!(w[2], -0.5 + s3 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_dot_matches_finite_difference() {
        let a = EulerAngles::new(0.3, -0.4, 1.0);
        let rates = Vector3::new(0.7, -1.1, 0.2);
        let h = 1e-6;
        let step = |s: f64| {
            let v = a.to_vector() + rates * s;
            inverse_rate_transform(&EulerAngles::from_vector(&v)).unwrap()
        };
        let fd = (step(h) - step(-h)) / (2.0 * h);
        let an = inverse_rate_transform_dot(&a, &rates).unwrap();
        assert!((fd - an).abs().max() < 1e-8);
    }

    #[test]
    fn rotation_special_cases() {
        assert_eq!(rotation_matrix(&EulerAngles::default()), Matrix3::identity());
        let r = rotation_matrix(&EulerAngles::new(0.0, 0.0, FRAC_PI_2));
        assert_relative_eq!(r.column(0).into_owned(), Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn skew_pattern() {
        assert_eq!(skew(&Vector3::zeros()), Matrix3::zeros());
        let s = skew(&Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(
            s,
            Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0)
        );
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(0.25), 0.25);
    }
}
