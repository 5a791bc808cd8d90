//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use qcsm_cli::{load_document, read_trace_csv, run_check, write_trace_csv, Document, TraceTable};
use qcsm_core::dynamics::{mix_forces, rotation_matrix, skew, unmix_controls, Plant, PlantMode};
use qcsm_core::sim::{integrate, rk4};
use qcsm_core::{AttitudeState, BodyRates, EulerAngles, MotorForces, QuadParams, TorqueVector};

const ORTHONORMALITY_TOL: f64 = 1e-12;
const MIXER_TOL: f64 = 1e-10;
const RK4_RATIO_MIN: f64 = 15.0;
const SPIN_TOL: f64 = 1e-10;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

fn kernels() -> Line {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut orth = 0.0f64;
    let mut det = 0.0f64;
    let mut skew_exact = true;
    for phi in grid(13, -3.1, 3.1) {
        for theta in grid(13, -half_pi + 0.01, half_pi - 0.01) {
            for psi in grid(13, -3.1, 3.1) {
                let r = rotation_matrix(&EulerAngles::new(phi, theta, psi));
                orth = orth.max((r * r.transpose() - Matrix3::identity()).amax());
                det = det.max((r.determinant() - 1.0).abs());
                let w = Vector3::new(phi, theta, psi);
                let s = skew(&w);
                let v = Vector3::new(psi, -phi, 0.5 * theta);
                skew_exact &= s.transpose() == -s && s * v == w.cross(&v);
            }
        }
    }

    let params = QuadParams::solo();
    let mut mixer = 0.0f64;
    for f1 in grid(6, 0.0, 12.0) {
        for f2 in grid(6, 0.5, 9.0) {
            for f3 in grid(6, 1.0, 7.0) {
                let f = MotorForces::from_array([f1, f2, f3, 3.3]);
                let (tau, thrust) = mix_forces(&f, &params);
                let back = unmix_controls(&tau, thrust, &params).raw;
                let diff = (0..4).map(|i| (back.as_array()[i] - f.as_array()[i]).abs()).fold(0.0, f64::max);
                mixer = mixer.max(diff);
            }
        }
    }

    // Damped oscillator against its matrix exponential.
    let a = Matrix2::new(0.0, 1.0, -4.0, -0.4);
    let x0 = Vector2::new(1.0, 0.0);
    let horizon = 2.0;
    let exact = (a * horizon).exp() * x0;
    let err = |dt: f64| {
        let n = (horizon / dt).round() as usize;
        let mut x = x0;
        for k in 0..n {
            x = rk4::<2, ()>(|_, y| Ok(a * y), k as f64 * dt, &x, dt).unwrap();
        }
        (x - exact).norm()
    };
    let ratio = err(0.1) / err(0.05);

    let plant = Plant::new(params, PlantMode::ControlForm).unwrap();
    let w0 = BodyRates::new(0.0, 0.0, 2.0);
    let mut state = AttitudeState::new(EulerAngles::default(), w0);
    let mut spin = 0.0f64;
    for _ in 0..1000 {
        state = integrate(&plant, &state, &TorqueVector::ZERO, &TorqueVector::ZERO, 1e-3).unwrap();
        spin = spin.max((state.rates.to_vector() - w0.to_vector()).amax());
    }

    let pass = orth < ORTHONORMALITY_TOL
        && det < ORTHONORMALITY_TOL
        && skew_exact
        && mixer < MIXER_TOL
        && ratio >= RK4_RATIO_MIN
        && spin < SPIN_TOL;
    Line {
        id: 7,
        name: "numerical kernels",
        pass,
        detail: format!(
            "orthonormality {orth:.1e}, det {det:.1e}, skew exact {skew_exact}, mixer {mixer:.1e}, \
             rk4 ratio {ratio:.2}, spin drift {spin:.1e}"
        ),
    }
}

fn determinism_and_format() -> Line {
    let Document::Scenario(scn) = load_document(&scenarios().join("nominal.cfg")).unwrap() else {
        panic!("nominal.cfg is a batch");
    };
    let encode = || {
        let trace = qcsm_core::run_scenario(&scn).unwrap();
        let mut bytes = Vec::new();
        write_trace_csv(&trace, 1, &mut bytes).unwrap();
        (trace, bytes)
    };
    let (trace, first) = encode();
    let (_, second) = encode();
    let identical = first == second;

    let table = read_trace_csv(first.as_slice()).unwrap();
    let expected = TraceTable::from_trace(&trace);
    let values_exact = table.rows.len() == expected.rows.len()
        && table
            .rows
            .iter()
            .zip(&expected.rows)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    let mut rewritten = Vec::new();
    table.write(&mut rewritten).unwrap();
    let bytes_exact = rewritten == first;

    let out = Command::new(env!("CARGO_BIN_EXE_qcsm"))
        .args(["run", "--check"])
        .arg(scenarios())
        .output()
        .unwrap();
    let check_code = out.status.code();

    Line {
        id: 8,
        name: "determinism and format",
        pass: identical && values_exact && bytes_exact && check_code == Some(0),
        detail: format!(
            "repeat identical {identical}, round-trip values {values_exact}, rewrite identical {bytes_exact}, \
             --check exit {check_code:?}"
        ),
    }
}

fn main() -> ExitCode {
    let mut lines: Vec<Line> = match run_check(&scenarios()) {
        Ok(report) => report
            .criteria
            .into_iter()
            .map(|c| Line {
                id: c.id,
                name: c.name,
                pass: c.pass,
                detail: c.detail,
            })
            .collect(),
        Err(e) => (1..=6)
            .map(|id| Line {
                id,
                name: "scenario check",
                pass: false,
                detail: e.to_string(),
            })
            .collect(),
    };
    lines.push(kernels());
    lines.push(determinism_and_format());
    let mut ok = true;
    for l in &lines {
        ok &= l.pass;
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} ({}): {}", l.id, l.name, l.detail);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
