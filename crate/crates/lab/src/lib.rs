//! Batch experiments for Dunkl-setting commutators.
//!
//! Each subcommand runs one suite of numerical checks on top of
//! [`dunkl_core`], writes its tables as CSV and records every gate in
//! `summary.json`.

pub mod cache;
pub mod config;
pub mod error;
pub mod families;
pub mod report;
pub mod suites;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use report::{Gate, SuiteReport};
pub use suites::Suite;

use std::path::{Path, PathBuf};

/// Result of a run: per-suite reports and the files written.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<SuiteReport>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(SuiteReport::passed)
    }

    pub fn report(&self, suite: Suite) -> Option<&SuiteReport> {
        self.reports.iter().find(|r| r.suite == suite.name())
    }

    /// Exit status: 0 when every gate passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs `suite` on a pool of `jobs` workers (0 picks the default) and writes
/// the reports into `out`.
pub fn run(cfg: &ExperimentConfig, suite: Suite, out: &Path, jobs: usize) -> Result<RunOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
    let reports = pool.install(|| suite.expand().into_iter().map(|s| s.run(cfg)).collect::<Result<Vec<_>>>())?;
    let files = report::write_reports(out, cfg, suite.name(), &reports)?;
    Ok(RunOutcome { reports, files })
}
