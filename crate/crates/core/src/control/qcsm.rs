//! Quasi-continuous second-order sliding-mode law.

use nalgebra::{Matrix3, Vector3};

/// Below this magnitude both `sigma` and `sigma_dot` count as zero.
pub const ORIGIN_TOL: f64 = 1e-12;

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The normalized law `(sigma_dot + |sigma|^1/2 sign sigma) / (|sigma_dot| + |sigma|^1/2)`,
/// which lies in `[-1, 1]` and is zero at the origin.
pub fn qcsm_shape(sigma: f64, sigma_dot: f64) -> f64 {
    if sigma.abs() < ORIGIN_TOL && sigma_dot.abs() < ORIGIN_TOL {
        return 0.0;
    }
    let root = sigma.abs().sqrt();
    let den = sigma_dot.abs() + root;
    ((sigma_dot + root * sign(sigma)) / den).clamp(-1.0, 1.0)
}

/// `u = -alpha * qcsm_shape(sigma, sigma_dot)`; `|u| <= alpha`.
pub fn qcsm_control(sigma: f64, sigma_dot: f64, alpha: f64) -> f64 {
    -alpha * qcsm_shape(sigma, sigma_dot)
}

/// Solves `u = -alpha * qcsm_shape(sigma, sigma_dot(u))` for one axis with
/// `sigma_dot(u) = offset + gain * u`, `gain > 0`.
///
/// `gain * (x - offset) + alpha * shape(x)` is strictly increasing in
/// `x = sigma_dot`, so the root is unique and bracketed by
/// `offset +- gain * alpha`.
pub fn solve_axis(sigma: f64, offset: f64, gain: f64, alpha: f64, iterations: u32) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let j = 1.0 / gain;
    // On the surface the law is a relay in sigma_dot; if the drift can be
    // cancelled the root is sigma_dot = 0 with the equivalent control.
    if sigma.abs() < ORIGIN_TOL && (j * offset).abs() <= alpha {
        return 0.0 - j * offset;
    }
    let f = |x: f64| j * (x - offset) + alpha * qcsm_shape(sigma, x);
    let mut lo = offset - gain * alpha;
    let mut hi = offset + gain * alpha;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    (j * (x - offset)).clamp(-alpha, alpha)
}

/// Gauss-Seidel sweeps over the coupled axes of
/// `U_i = -alpha_i shape(sigma_i, c_i + (B U)_i)`, starting from `u0`.
/// Stops early once a sweep leaves every axis unchanged.
pub fn solve_coupled(
    sigma: &Vector3<f64>,
    c: &Vector3<f64>,
    b: &Matrix3<f64>,
    alpha: &Vector3<f64>,
    u0: &Vector3<f64>,
    sweeps: u32,
    iterations: u32,
) -> Vector3<f64> {
    let mut u = *u0;
    for _ in 0..sweeps {
        let before = u;
        for i in 0..3 {
            let mut offset = c[i];
            for j in 0..3 {
                if j != i {
                    offset += b[(i, j)] * u[j];
                }
            }
            u[i] = solve_axis(sigma[i], offset, b[(i, i)], alpha[i], iterations);
        }
        if u == before {
            break;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_gives_zero() {
        assert_eq!(qcsm_control(0.0, 0.0, 1.24), 0.0);
    }

    #[test]
    fn zero_rate_reduces_to_sign_law() {
        assert_eq!(qcsm_control(0.04, 0.0, 2.0), -2.0);
        assert_eq!(qcsm_control(-0.3, 0.0, 2.0), 2.0);
    }

    #[test]
    fn zero_surface_uses_rate() {
        assert_eq!(qcsm_control(0.0, 1.0, 2.0), -2.0);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(-3.0), -1.0);
    }

    #[test]
    fn solve_axis_satisfies_fixed_point() {
        let (sigma, offset, gain, alpha) = (0.3, -2.0, 100.0, 1.5);
        let u = solve_axis(sigma, offset, gain, alpha, 200);
        let x = offset + gain * u;
        assert!((u - qcsm_control(sigma, x, alpha)).abs() < 1e-9);
    }

    #[test]
    fn solve_axis_holds_the_origin_with_equivalent_control() {
        // sigma = 0 and the drift alone can be cancelled: sigma_dot -> 0.
        let u = solve_axis(0.0, 10.0, 100.0, 1.0, 200);
        assert!((u + 0.1).abs() < 1e-9);
    }

    #[test]
    fn solve_coupled_decoupled_matches_axes() {
        // One sweep solves a diagonal system; the second confirms it.
        let b = Matrix3::from_diagonal(&Vector3::new(100.0, 60.0, 40.0));
        let sigma = Vector3::new(0.2, -0.1, 0.0);
        let c = Vector3::new(1.0, -3.0, 0.5);
        let alpha = Vector3::new(1.0, 2.0, 3.0);
        let u = solve_coupled(&sigma, &c, &b, &alpha, &Vector3::zeros(), 2, 100);
        for i in 0..3 {
            assert_eq!(u[i], solve_axis(sigma[i], c[i], b[(i, i)], alpha[i], 100));
        }
    }
}
