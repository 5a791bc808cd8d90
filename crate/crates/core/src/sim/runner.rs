//! Closed-loop scenario execution.

use nalgebra::Vector3;

use super::integrator::{check_envelope, integrate};
use super::scenario::{disturbance_at, FaultPolicy, Scenario};
use super::trace::{flags, FaultRecord, SimTrace, TraceMeta, TraceRecord};
use crate::control::{ControlOutput, ReferenceGenerator};
use crate::control::ControllerConfig;
use crate::dynamics::{unmix_controls, wrap_angle, Plant};
use crate::error::{ControlError, DynamicsError, ScenarioError};

fn fault_flag(err: &DynamicsError) -> u32 {
    match err {
        DynamicsError::RateCapExceeded { .. } => flags::RATE_CAP,
        DynamicsError::AttitudeOutOfBounds { .. } => flags::ATTITUDE,
        DynamicsError::DegenerateAttitude { .. } => flags::DEGENERATE,
        _ => flags::NON_FINITE,
    }
}

fn abort_with(trace: &mut SimTrace, time: f64, err: DynamicsError) {
    if let Some(last) = trace.records.last_mut() {
        last.fault |= fault_flag(&err);
    }
    trace.faults.push(FaultRecord {
        time,
        message: err.to_string(),
        error: Some(err),
        aborted: true,
    });
}

/// Runs a validated scenario. Plant and controller faults end up in the
/// trace; only an invalid scenario is an error.
pub fn run_scenario(scn: &Scenario) -> Result<SimTrace, ScenarioError> {
    scn.validate()?;
    let plant_params = scn.plant_params()?;
    let plant = Plant::new(plant_params, scn.plant_mode)?;
    let refgen = ReferenceGenerator::new(
        scn.initial_state.angles,
        &scn.reference_schedule,
        scn.reference_shaping,
    );
    let n = scn.steps();
    let ratio = scn.control_ratio();
    let dt = scn.dt_plant;
    let thrust = plant_params.hover_thrust();
    let inertia = plant_params.inertia.effective();
    let scale = scn.controller.sliding_scale();
    let u_max = scn.controller.u_max();
    let alpha_max = match &scn.controller {
        ControllerConfig::Aqcsm(c) if c.adaptive => Some(c.adaptation.alpha_max),
        _ => None,
    };

    let meta = TraceMeta {
        scenario: scn.name.clone(),
        controller: scn.controller.name().to_string(),
        duration: scn.duration,
        dt_plant: scn.dt_plant,
        dt_control: scn.dt_control,
        events: scn.reference_schedule.clone(),
        sliding_scale: scale,
        surface_gains: scn.controller.surface_gains(),
        epsilon: scn.controller.epsilon(),
        effective_inertia: inertia,
        nominal_inertia: *scn.params.inertia.nominal(),
    };
    let mut trace = SimTrace {
        meta,
        records: Vec::with_capacity(n + 1),
        faults: Vec::new(),
    };

    let mut controller = scn.controller.start();
    let mut state = scn.initial_state;
    let mut out: Option<ControlOutput> = None;
    let mut alpha_peak = Vector3::<f64>::zeros();
    let mut pending = 0u32;

    for k in 0..=n {
        let t = k as f64 * dt;
        let reference = refgen.at(t);
        if k % ratio == 0 {
            match controller.step(&state, &reference, scn.dt_control) {
                Ok(o) => out = Some(o),
                Err(err) => {
                    let err = match err {
                        ControlError::Dynamics(e) => e,
                        _ => DynamicsError::NonFinite,
                    };
                    abort_with(&mut trace, t, err);
                    break;
                }
            }
        }
        let o = out.expect("controller runs at k = 0");
        let u = o.torque;
        let d_sched = disturbance_at(&scn.disturbance_schedule, t);
        let d = d_sched + plant.internal_torque(&state.rates, &u);
        let alloc = unmix_controls(&u, thrust, &plant_params);

        let mut error = state.angles.to_vector() - reference.theta_d.to_vector();
        error[2] = wrap_angle(error[2]);
        let sigma_si = o.sliding.sigma / scale;
        let v0 = 0.5 * sigma_si.dot(&(inertia * sigma_si));
        alpha_peak = alpha_peak.sup(&o.alpha);
        let v = v0 + 0.5 * (o.alpha - alpha_peak).norm_squared();

        let mut fault = pending;
        pending = 0;
        if alloc.saturated {
            fault |= flags::MOTOR_SATURATION;
        }
        if u.to_vector().iter().any(|x| x.abs() >= u_max) {
            fault |= flags::CONTROL_CLAMP;
        }
        if alpha_max.is_some_and(|m| o.alpha.iter().any(|a| *a >= m)) {
            fault |= flags::GAIN_CLAMP;
        }

        let record = TraceRecord {
            time: t,
            angles: state.angles,
            rates: state.rates,
            reference: reference.theta_d,
            error,
            sigma: o.sliding.sigma,
            sigma_dot: o.sliding.sigma_dot,
            alpha: o.alpha,
            u,
            d,
            motors: alloc.forces,
            v0,
            v,
            fault,
        };
        trace.records.push(record);
        if k == n {
            break;
        }

        let next = match integrate(&plant, &state, &u, &d_sched, dt) {
            Ok(next) => next,
            Err(err) => {
                abort_with(&mut trace, t + dt, err);
                break;
            }
        };
        if let Err(err) = check_envelope(&next, plant_params.rate_cap) {
            if scn.fault_policy == FaultPolicy::Abort {
                abort_with(&mut trace, t + dt, err);
                break;
            }
            pending = fault_flag(&err);
            trace.faults.push(FaultRecord {
                time: t + dt,
                message: err.to_string(),
                error: Some(err),
                aborted: false,
            });
        }
        state = next;
    }
    Ok(trace)
}
