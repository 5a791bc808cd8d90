//! Post-hoc check that the adaptive gains dominate the lumped uncertainty.

use nalgebra::Vector3;
use serde::Serialize;

use crate::dynamics::skew;
use crate::sim::{SimTrace, TraceRecord};

/// `Xi = -S(w) I w + d - I theta_d_ddot + I Lambda e_dot` with the plant
/// inertia, in N·m. `e_dot` is recovered from the recorded surface.
pub fn lumped_uncertainty(trace: &SimTrace, k: usize, theta_d_ddot: &Vector3<f64>) -> Vector3<f64> {
    let r: &TraceRecord = &trace.records[k];
    let i = trace.meta.effective_inertia;
    let lambda = trace.meta.surface_gains.as_vector();
    let e_dot = r.sigma / trace.meta.sliding_scale - lambda.component_mul(&r.error);
    let w = r.rates.to_vector();
    -skew(&w) * (i * w) + r.d.to_vector() - i * theta_d_ddot + i * lambda.component_mul(&e_dot)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisGainBound {
    /// Fraction of dead-band samples with `alpha >= |Xi|`.
    pub coverage: f64,
    pub samples: usize,
    pub xi_max: f64,
    /// Largest `|d|` the plant saw on this axis.
    pub d_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainBoundReport {
    pub axes: [AxisGainBound; 3],
}

/// Reconstructs `Xi` along the trace, with the reference acceleration taken
/// from central differences of the recorded reference, and reports how
/// often the gain covered it once the surface is inside the dead band.
pub fn gain_bound_check(trace: &SimTrace) -> GainBoundReport {
    let n = trace.records.len();
    let dt = trace.meta.dt_plant;
    let eps = trace.meta.epsilon.unwrap_or_else(|| Vector3::repeat(f64::INFINITY));
    let mut hits = [0usize; 3];
    let mut samples = [0usize; 3];
    let mut xi_max = [0.0f64; 3];
    let mut d_max = [0.0f64; 3];
    for k in 0..n {
        let acc = if k == 0 || k + 1 == n {
            Vector3::zeros()
        } else {
            let a = trace.records[k - 1].reference.to_vector();
            let b = trace.records[k].reference.to_vector();
            let c = trace.records[k + 1].reference.to_vector();
            (a - b * 2.0 + c) / (dt * dt)
        };
        let xi = lumped_uncertainty(trace, k, &acc);
        let r = &trace.records[k];
        for i in 0..3 {
            xi_max[i] = xi_max[i].max(xi[i].abs());
            d_max[i] = d_max[i].max(r.d.to_vector()[i].abs());
            if r.sigma[i].abs() <= eps[i] {
                samples[i] += 1;
                if r.alpha[i] >= xi[i].abs() {
                    hits[i] += 1;
                }
            }
        }
    }
    let axes = std::array::from_fn(|i| AxisGainBound {
        coverage: if samples[i] == 0 { 0.0 } else { hits[i] as f64 / samples[i] as f64 },
        samples: samples[i],
        xi_max: xi_max[i],
        d_max: d_max[i],
    });
    GainBoundReport { axes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TorqueVector;
    use crate::sim::testing::synthetic_trace;

    #[test]
    fn hover_without_disturbance_has_no_uncertainty() {
        let trace = synthetic_trace(0.1, 1e-3, vec![], |_| 0.0);
        let rep = gain_bound_check(&trace);
        for a in rep.axes {
            assert_eq!(a.xi_max, 0.0);
        }
    }

    #[test]
    fn constant_disturbance_enters_directly() {
        let mut trace = synthetic_trace(0.1, 1e-3, vec![], |_| 0.0);
        for r in &mut trace.records {
            r.d = TorqueVector::new(0.5, 0.5, 0.5);
        }
        let rep = gain_bound_check(&trace);
        for a in rep.axes {
            assert!((a.xi_max - 0.5).abs() < 1e-15);
            assert_eq!(a.d_max, 0.5);
        }
    }
}
