//! Trace CSV and metrics reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use qcsm_core::analysis::RunSummary;
use qcsm_core::{SimTrace, TraceRecord};

use crate::error::CliError;

/// Fixed column order of `trace.csv`.
pub const TRACE_COLUMNS: [&str; 35] = [
    "time", "phi", "theta", "psi", "p", "q", "r", "phi_d", "theta_d", "psi_d", "e1", "e2", "e3",
    "sigma1", "sigma2", "sigma3", "sigmadot1", "sigmadot2", "sigmadot3", "alpha1", "alpha2",
    "alpha3", "u_phi", "u_theta", "u_psi", "d1", "d2", "d3", "f1", "f2", "f3", "f4", "V0", "V",
    "fault",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    #[default]
    Json,
}

/// One trace row in file units: angles and errors in degrees, rates in
/// rad/s, everything else as recorded.
pub fn trace_row(r: &TraceRecord) -> [f64; 35] {
    let deg = f64::to_degrees;
    let a = r.angles;
    let w = r.rates;
    let d = r.reference;
    let f = r.motors.as_array();
    [
        r.time,
        deg(a.phi),
        deg(a.theta),
        deg(a.psi),
        w.p,
        w.q,
        w.r,
        deg(d.phi),
        deg(d.theta),
        deg(d.psi),
        deg(r.error[0]),
        deg(r.error[1]),
        deg(r.error[2]),
        r.sigma[0],
        r.sigma[1],
        r.sigma[2],
        r.sigma_dot[0],
        r.sigma_dot[1],
        r.sigma_dot[2],
        r.alpha[0],
        r.alpha[1],
        r.alpha[2],
        r.u.u_phi,
        r.u.u_theta,
        r.u.u_psi,
        r.d.u_phi,
        r.d.u_theta,
        r.d.u_psi,
        f[0],
        f[1],
        f[2],
        f[3],
        r.v0,
        r.v,
        r.fault as f64,
    ]
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn format_row(row: &[f64; 35]) -> Vec<String> {
    let mut out: Vec<String> = row[..34].iter().map(|x| format_number(*x)).collect();
    out.push(format!("{}", row[34] as u32));
    out
}

/// Writes every `decimate`-th record, starting with the first.
pub fn write_trace_csv<W: Write>(trace: &SimTrace, decimate: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in trace.records.iter().step_by(decimate.max(1)) {
        w.write_record(format_row(&trace_row(r)))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a trace file, in file units.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub rows: Vec<[f64; 35]>,
}

impl TraceTable {
    pub fn from_trace(trace: &SimTrace) -> Self {
        Self {
            rows: trace.records.iter().map(trace_row).collect(),
        }
    }

    pub fn write<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRACE_COLUMNS)?;
        for row in &self.rows {
            w.write_record(format_row(row))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Converts rows back to records, degrees to radians.
    pub fn records(&self) -> Vec<TraceRecord> {
        use qcsm_core::{BodyRates, EulerAngles, MotorForces, TorqueVector};
        use nalgebra::Vector3;
        let rad = f64::to_radians;
        self.rows
            .iter()
            .map(|c| TraceRecord {
                time: c[0],
                angles: EulerAngles::new(rad(c[1]), rad(c[2]), rad(c[3])),
                rates: BodyRates::new(c[4], c[5], c[6]),
                reference: EulerAngles::new(rad(c[7]), rad(c[8]), rad(c[9])),
                error: Vector3::new(rad(c[10]), rad(c[11]), rad(c[12])),
                sigma: Vector3::new(c[13], c[14], c[15]),
                sigma_dot: Vector3::new(c[16], c[17], c[18]),
                alpha: Vector3::new(c[19], c[20], c[21]),
                u: TorqueVector::new(c[22], c[23], c[24]),
                d: TorqueVector::new(c[25], c[26], c[27]),
                motors: MotorForces::from_array([c[28], c[29], c[30], c[31]]),
                v0: c[32],
                v: c[33],
                fault: c[34] as u32,
            })
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header: {0}")]
    Header(String),
    #[error("row {row}, column `{column}`: {message}")]
    Field {
        row: usize,
        column: &'static str,
        message: String,
    },
}

pub fn read_trace_csv<R: std::io::Read>(input: R) -> Result<TraceTable, ReadError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(TRACE_COLUMNS.iter().copied()) {
        return Err(ReadError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let mut row = [0.0; 35];
        for (i, cell) in row.iter_mut().enumerate() {
            let field = rec.get(i).unwrap_or("");
            *cell = field.parse().map_err(|e: std::num::ParseFloatError| ReadError::Field {
                row: k + 1,
                column: TRACE_COLUMNS[i],
                message: e.to_string(),
            })?;
        }
        rows.push(row);
    }
    Ok(TraceTable { rows })
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Metrics keyed by axis, then metric name. Step metrics on each axis
/// describe its first step; `steps` lists all of them. Angles in degrees.
pub fn metrics_json(summary: &RunSummary) -> Value {
    let mut axes = Map::new();
    for a in &summary.axes {
        let mut m = Map::new();
        let steps: Vec<Value> = a
            .steps
            .iter()
            .map(|s| {
                json!({
                    "event_time": num(s.event_time),
                    "target_deg": num(s.target.to_degrees()),
                    "settling_time": s.settling_time.map_or(Value::Null, num),
                    "overshoot_percent": num(s.overshoot),
                    "steady_state_error_deg": num(s.steady_state_error.to_degrees()),
                    "peak_control": num(s.peak_control),
                })
            })
            .collect();
        if let Some(Value::Object(first)) = steps.first() {
            for (k, v) in first {
                m.insert(k.clone(), v.clone());
            }
        }
        m.insert("chattering".into(), num(a.chattering));
        m.insert("mean_alpha".into(), num(a.mean_alpha));
        m.insert("gain_coverage".into(), num(a.gain_coverage));
        m.insert("xi_max".into(), num(a.xi_max));
        m.insert("steps".into(), Value::Array(steps));
        axes.insert(a.axis.name().into(), Value::Object(m));
    }
    json!({
        "scenario": summary.scenario,
        "controller": summary.controller,
        "records": summary.records,
        "aborted": summary.aborted,
        "faults": summary.faults,
        "lyapunov": {
            "violations": summary.lyapunov_violations,
            "max_delta_v_outside_band": num(summary.max_delta_v_outside_band),
        },
        "axes": Value::Object(axes),
    })
}

/// Flat `axis,metric,value` rows; run-level metrics use the axis `run`.
pub fn metrics_csv<W: Write>(summary: &RunSummary, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis", "metric", "value"])?;
    let cell = |v: Option<f64>| v.map_or_else(String::new, format_number);
    w.write_record(["run", "records", &summary.records.to_string()])?;
    w.write_record(["run", "aborted", &summary.aborted.to_string()])?;
    w.write_record(["run", "lyapunov_violations", &summary.lyapunov_violations.to_string()])?;
    w.write_record(["run", "max_delta_v_outside_band", &cell(Some(summary.max_delta_v_outside_band))])?;
    for a in &summary.axes {
        let name = a.axis.name();
        if let Some(s) = a.steps.first() {
            w.write_record([name, "settling_time", &cell(s.settling_time)])?;
            w.write_record([name, "overshoot_percent", &cell(Some(s.overshoot))])?;
            w.write_record([name, "steady_state_error_deg", &cell(Some(s.steady_state_error.to_degrees()))])?;
            w.write_record([name, "peak_control", &cell(Some(s.peak_control))])?;
        }
        w.write_record([name, "chattering", &cell(Some(a.chattering))])?;
        w.write_record([name, "mean_alpha", &cell(Some(a.mean_alpha))])?;
        w.write_record([name, "gain_coverage", &cell(Some(a.gain_coverage))])?;
        w.write_record([name, "xi_max", &cell(Some(a.xi_max))])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trace.csv` and the metrics report into `dir`.
pub fn write_run(
    dir: &Path,
    trace: &SimTrace,
    summary: &RunSummary,
    decimate: usize,
    format: ReportFormat,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    let path = dir.join("trace.csv");
    let file = File::create(&path).map_err(|e| CliError::output(&path, e))?;
    write_trace_csv(trace, decimate, BufWriter::new(file)).map_err(|e| CliError::output(&path, e))?;
    match format {
        ReportFormat::Json => {
            let path = dir.join("metrics.json");
            let mut text = serde_json::to_string_pretty(&metrics_json(summary)).map_err(|e| CliError::output(&path, e))?;
            text.push('\n');
            std::fs::write(&path, text).map_err(|e| CliError::output(&path, e))?;
        }
        ReportFormat::Csv => {
            let path = dir.join("metrics.csv");
            let file = File::create(&path).map_err(|e| CliError::output(&path, e))?;
            metrics_csv(summary, BufWriter::new(file)).map_err(|e| CliError::output(&path, e))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.7e-20, -1e300, 0.0, 5.0, f64::MIN_POSITIVE] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn header_has_fixed_order() {
        let mut buf = Vec::new();
        TraceTable { rows: vec![] }.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,phi,theta,psi,p,q,r,phi_d,theta_d,psi_d,e1,e2,e3,sigma1"));
        assert!(text.trim_end().ends_with("f1,f2,f3,f4,V0,V,fault"));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(read_trace_csv("a,b\n1,2\n".as_bytes()), Err(ReadError::Header(_))));
    }
}
