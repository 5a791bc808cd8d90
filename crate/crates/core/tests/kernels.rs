use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use proptest::prelude::*;

use qcsm_core::dynamics::{
    euler_rate_transform, inverse_rate_transform, mix_forces, mixer_matrix, rotation_matrix, skew, unmix_controls,
    wrap_angle, Plant, PlantMode,
};
use qcsm_core::sim::{integrate, rk4};
use qcsm_core::{AttitudeState, BodyRates, EulerAngles, InertiaMatrix, MotorForces, QuadParams, TorqueVector};

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

fn angles() -> impl Strategy<Value = EulerAngles> {
    (-3.1f64..3.1, -HALF_PI + 0.01..HALF_PI - 0.01, -3.1f64..3.1).prop_map(|(a, b, c)| EulerAngles::new(a, b, c))
}

fn vec3(r: f64) -> impl Strategy<Value = Vector3<f64>> {
    (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| Vector3::new(a, b, c))
}

proptest! {
    #[test]
    fn skew_is_antisymmetric_and_crosses(w in vec3(50.0), v in vec3(50.0)) {
        let s = skew(&w);
        prop_assert_eq!(s.transpose(), -s);
        prop_assert!((s * v - w.cross(&v)).amax() <= 1e-12 * (1.0 + w.amax() * v.amax()));
    }

    #[test]
    fn rotation_is_orthonormal(a in angles()) {
        let r = rotation_matrix(&a);
        prop_assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_transforms_are_inverse(a in angles()) {
        let h = euler_rate_transform(&a).unwrap();
        let h_inv = inverse_rate_transform(&a).unwrap();
        prop_assert!((h * h_inv - Matrix3::identity()).amax() < 1e-10);
        prop_assert!((h_inv * h - Matrix3::identity()).amax() < 1e-10);
    }

    #[test]
    fn mixer_round_trip(f in prop::array::uniform4(0.0f64..15.0)) {
        let p = QuadParams::solo();
        let forces = MotorForces::from_array(f);
        let (tau, thrust) = mix_forces(&forces, &p);
        let back = unmix_controls(&tau, thrust, &p);
        for (b, f) in back.raw.as_array().iter().zip(f) {
            prop_assert!((b - f).abs() < 1e-10);
        }
        prop_assert!(!back.saturated);
    }

    #[test]
    fn unmixed_forces_are_never_negative(u in vec3(5.0), thrust in 0.0f64..40.0) {
        let p = QuadParams::solo();
        let alloc = unmix_controls(&TorqueVector::from_vector(&u), thrust, &p);
        prop_assert!(alloc.forces.as_array().iter().all(|f| *f >= 0.0));
    }

    #[test]
    fn wrapped_angles_stay_in_range(a in -100.0f64..100.0) {
        let w = wrap_angle(a);
        prop_assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        let turns = (a - w) / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }
}

#[test]
fn mixer_is_invertible() {
    let m = mixer_matrix(&QuadParams::solo());
    assert!(m.determinant().abs() > 1e-9);
}

#[test]
fn degenerate_attitude_is_rejected() {
    assert!(inverse_rate_transform(&EulerAngles::new(0.0, HALF_PI, 0.0)).is_err());
}

/// Error of RK4 on `x' = A x` over `horizon` against `exp(A horizon) x0`.
fn rk4_error(a: Matrix2<f64>, x0: Vector2<f64>, horizon: f64, dt: f64) -> f64 {
    let exact = (a * horizon).exp() * x0;
    let n = (horizon / dt).round() as usize;
    let mut x = x0;
    for k in 0..n {
        x = rk4::<2, ()>(|_, y| Ok(a * y), k as f64 * dt, &x, dt).unwrap();
    }
    (x - exact).norm()
}

#[test]
fn rk4_is_fourth_order() {
    let a = Matrix2::new(0.0, 1.0, -4.0, -0.4);
    let x0 = Vector2::new(1.0, 0.0);
    for dt in [0.1, 0.05, 0.025] {
        let ratio = rk4_error(a, x0, 2.0, dt) / rk4_error(a, x0, 2.0, dt / 2.0);
        assert!(ratio >= 15.0, "dt = {dt}: ratio {ratio}");
    }
}

#[test]
fn rk4_integrates_time_dependent_input() {
    // x' = cos t, x(0) = 0  =>  x(1) = sin 1.
    let mut x = nalgebra::SVector::<f64, 1>::zeros();
    let dt = 0.01;
    for k in 0..100 {
        x = rk4::<1, ()>(|t, _| Ok(nalgebra::SVector::<f64, 1>::new(t.cos())), k as f64 * dt, &x, dt).unwrap();
    }
    assert!((x[0] - 1f64.sin()).abs() < 1e-10);
}

fn free_flight(plant: &Plant, w0: BodyRates, steps: usize, dt: f64) -> Vec<AttitudeState> {
    let mut s = AttitudeState::new(EulerAngles::default(), w0);
    let mut out = vec![s];
    for _ in 0..steps {
        s = integrate(plant, &s, &TorqueVector::ZERO, &TorqueVector::ZERO, dt).unwrap();
        out.push(s);
    }
    out
}

#[test]
fn principal_axis_spin_is_invariant() {
    let plant = Plant::new(QuadParams::solo(), PlantMode::ControlForm).unwrap();
    for w0 in [BodyRates::new(0.0, 0.0, 2.0), BodyRates::new(1.5, 0.0, 0.0), BodyRates::new(0.0, -3.0, 0.0)] {
        for s in free_flight(&plant, w0, 1000, 1e-3) {
            assert!((s.rates.to_vector() - w0.to_vector()).amax() < 1e-10);
        }
    }
}

#[test]
fn principal_spin_yaw_follows_rate() {
    // Pure yaw spin: psi(t) = r t, wrapped.
    let plant = Plant::new(QuadParams::solo(), PlantMode::ControlForm).unwrap();
    let traj = free_flight(&plant, BodyRates::new(0.0, 0.0, 2.0), 1000, 1e-3);
    let expected = wrap_angle(2.0);
    assert!((traj[1000].angles.psi - expected).abs() < 1e-12);
}

#[test]
fn torque_free_energy_is_conserved() {
    let mut p = QuadParams::solo();
    p.inertia = InertiaMatrix::new(
        Matrix3::from_diagonal(&Vector3::new(8.85e-3, 1.5e-2, 2.2e-2)),
        Matrix3::new(0.0, 4e-4, -2e-4, 4e-4, 0.0, 1e-4, -2e-4, 1e-4, 0.0),
    )
    .unwrap();
    let plant = Plant::new(p, PlantMode::ControlForm).unwrap();
    let w0 = BodyRates::new(0.4, -0.3, 0.5);
    let e0 = plant.kinetic_energy(&w0);
    let traj = free_flight(&plant, w0, 1000, 1e-3);
    for s in &traj {
        assert!((plant.kinetic_energy(&s.rates) - e0).abs() / e0 < 1e-6);
    }
    // Angular momentum magnitude is conserved too.
    let h = |w: &BodyRates| (p.inertia.effective() * w.to_vector()).norm();
    assert!((h(&traj[1000].rates) - h(&w0)).abs() < 1e-9);
}

#[test]
fn pitch_spin_with_perturbation_conserves_energy() {
    let plant = Plant::new(QuadParams::solo(), PlantMode::ControlForm).unwrap();
    let w0 = BodyRates::new(1e-3, 5.0, 1e-3);
    let e0 = plant.kinetic_energy(&w0);
    let traj = free_flight(&plant, w0, 1000, 1e-3);
    let last = traj[1000].rates;
    assert!(last.q.abs() <= 5.0 + 1e-9);
    assert!((plant.kinetic_energy(&last) - e0).abs() / e0 < 1e-6);
}
