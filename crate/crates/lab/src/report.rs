//! Suite results, gates and the on-disk report.

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One acceptance check with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Gate {
    /// Passes when `measured < threshold`.
    pub fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured < threshold,
            measured,
            threshold,
            detail: format!("{measured:.3e} < {threshold:.3e}"),
        }
    }

    /// Passes when `measured <= threshold`.
    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
            detail: format!("{measured:.3e} <= {threshold:.3e}"),
        }
    }

    pub fn holds(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, measured: f64::from(u8::from(passed)), threshold: 1.0, detail: detail.into() }
    }

    pub fn finite(name: &str, measured: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured.is_finite(),
            measured,
            threshold: f64::INFINITY,
            detail: format!("{measured:.6e} is finite"),
        }
    }
}

/// A CSV file produced by a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &[&'static str]) -> Self {
        Self { file, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.file);
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting, stable across runs.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

pub fn int(v: impl std::fmt::Display) -> String {
    v.to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub gates: Vec<Gate>,
    pub constants: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
    pub runtime_s: f64,
    pub time_budget_s: f64,
}

impl SuiteReport {
    pub fn new(suite: &'static str, time_budget_s: f64) -> Self {
        Self { suite, gates: Vec::new(), constants: BTreeMap::new(), tables: Vec::new(), runtime_s: 0.0, time_budget_s }
    }

    pub fn gate(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn constant(&mut self, name: impl Into<String>, v: f64) {
        self.constants.insert(name.into(), v);
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn failed_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| !g.passed)
    }
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    suite: &'a str,
    passed: bool,
    runtime_s: f64,
    time_budget_s: f64,
    gates: &'a [Gate],
    constants: &'a BTreeMap<String, f64>,
    files: Vec<&'a str>,
}

#[derive(Serialize)]
struct Summary<'a> {
    tool: &'static str,
    version: &'static str,
    run_stamp: String,
    seed: u64,
    subcommand: &'a str,
    passed: bool,
    config: &'a ExperimentConfig,
    suites: Vec<SuiteSummary<'a>>,
}

/// Hash of the tool version and the canonical configuration, shortened like a
/// commit id.
pub fn run_stamp(cfg: &ExperimentConfig) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update(serde_json::to_vec(cfg).expect("configuration serializes"));
    let digest = h.finalize();
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Output { path: path.to_path_buf(), source }
}

/// Writes every suite table and `summary.json` into `dir`, returning the
/// paths written.
pub fn write_reports(dir: &Path, cfg: &ExperimentConfig, subcommand: &str, reports: &[SuiteReport]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for t in reports.iter().flat_map(|r| &r.tables) {
        let path = dir.join(t.file);
        let file = std::fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        w.write_record(&t.header)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    let summary = Summary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        run_stamp: run_stamp(cfg),
        seed: cfg.seed,
        subcommand,
        passed: reports.iter().all(SuiteReport::passed),
        config: cfg,
        suites: reports
            .iter()
            .map(|r| SuiteSummary {
                suite: r.suite,
                passed: r.passed(),
                runtime_s: r.runtime_s,
                time_budget_s: r.time_budget_s,
                gates: &r.gates,
                constants: &r.constants,
                files: r.tables.iter().map(|t| t.file).collect(),
            })
            .collect(),
    };
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
