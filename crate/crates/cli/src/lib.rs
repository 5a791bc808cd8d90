//! Scenario files, run orchestration and report writing for `qcsm`.

pub mod check;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qcsm_core::analysis::summarize;
use qcsm_core::run_scenario;
use qcsm_core::sim::FaultPolicy;
use qcsm_core::Scenario;

pub use check::{run_check, CheckReport, CriterionResult};
pub use config::{parse_document, parse_scenario, Batch, Document};
pub use error::{CliError, ConfigError};
pub use output::{read_trace_csv, write_trace_csv, ReportFormat, TraceTable, TRACE_COLUMNS};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "QCSM_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAULT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub out_dir: PathBuf,
    /// Keep every k-th trace sample.
    pub decimate: usize,
    pub format: ReportFormat,
    /// Overrides the policy in the scenario file.
    pub fault_policy: Option<FaultPolicy>,
    /// Reserved; the simulator is deterministic.
    pub seed: Option<u64>,
    /// Worker threads for batch documents; `None` uses the document's value.
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            out_dir: out_dir.into(),
            decimate: 1,
            format: ReportFormat::default(),
            fault_policy: None,
            seed: None,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.decimate < 1 {
            return Err(CliError::Usage("decimation must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Usage("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Default output root: `$QCSM_OUT`, else `./out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}

pub fn load_document(path: &Path) -> Result<Document, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_document(&text, path)
}

/// What happened to one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub name: String,
    pub dir: PathBuf,
    pub records: usize,
    pub aborted: bool,
}

fn run_one(scn: &Scenario, dir: &Path, cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let trace = run_scenario(scn).map_err(|source| CliError::Scenario {
        name: scn.name.clone(),
        source,
    })?;
    let summary = summarize(&trace);
    output::write_run(dir, &trace, &summary, cfg.decimate, cfg.format)?;
    Ok(RunOutcome {
        name: scn.name.clone(),
        dir: dir.to_path_buf(),
        records: trace.records.len(),
        aborted: trace.aborted(),
    })
}

/// Runs each scenario in its own subdirectory of `root` on up to `workers`
/// threads. Outcomes keep the input order.
pub fn run_all(
    runs: &[Scenario],
    root: &Path,
    workers: usize,
    cfg: &RunConfig,
) -> Vec<Result<RunOutcome, CliError>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunOutcome, CliError>>>> = runs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, runs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(scn) = runs.get(k) else { break };
                let result = run_one(scn, &root.join(&scn.name), cfg);
                *slots[k].lock().expect("result slot poisoned") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("result slot poisoned").expect("run skipped"))
        .collect()
}

/// Loads `cfg.scenario` and runs it, or every entry if it is a batch.
/// A single scenario writes to `out_dir/<name>`, a batch to
/// `out_dir/<batch>/<run>`.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Result<RunOutcome, CliError>>, CliError> {
    cfg.validate()?;
    let apply = |mut s: Scenario| {
        if let Some(p) = cfg.fault_policy {
            s.fault_policy = p;
        }
        s
    };
    Ok(match load_document(&cfg.scenario)? {
        Document::Scenario(s) => run_all(&[apply(*s)], &cfg.out_dir, 1, cfg),
        Document::Batch(b) => {
            let runs: Vec<_> = b.runs.into_iter().map(apply).collect();
            let workers = cfg.workers.unwrap_or(b.workers);
            run_all(&runs, &cfg.out_dir.join(&b.name), workers, cfg)
        }
    })
}

/// Exit status for a set of outcomes: config errors dominate faults.
pub fn exit_status(outcomes: &[Result<RunOutcome, CliError>]) -> i32 {
    if outcomes.iter().any(|o| o.is_err()) {
        EXIT_CONFIG
    } else if outcomes.iter().any(|o| o.as_ref().is_ok_and(|o| o.aborted)) {
        EXIT_FAULT
    } else {
        EXIT_OK
    }
}

/// Runs `cfg` and reports to standard error; returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Ok(outcomes) => {
            for o in &outcomes {
                match o {
                    Ok(o) if o.aborted => eprintln!("{}: aborted on fault, partial trace in {}", o.name, o.dir.display()),
                    Ok(o) => eprintln!("{}: {} records in {}", o.name, o.records, o.dir.display()),
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            exit_status(&outcomes)
        }
    }
}

/// Runs the acceptance check in `dir` and prints one line per criterion.
pub fn check(dir: &Path) -> i32 {
    match run_check(dir) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Ok(report) => {
            for c in &report.criteria {
                println!("{c}");
            }
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAULT
            }
        }
    }
}
