//! The experiment suites behind each subcommand.

mod bmo;
mod commutator_norm;
mod compactness;
mod geometry;
mod kernel;
mod measure;
mod spectral;
mod tail;

use crate::config::{CommutatorGrid, ExperimentConfig};
use crate::error::{InSuite, Result};
use crate::report::{Gate, SuiteReport};
use dunkl_core::commutator::CommutatorSetup;
use dunkl_core::geometry::RootSystem;
use dunkl_core::kernels::KernelRegistry;
use dunkl_core::measure::WeightedMeasure;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    ValidateGeometry,
    ValidateMeasure,
    ValidateSpectral,
    VerifyKernel,
    Bmo,
    CommutatorNorm,
    TailDecay,
    Compactness,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::ValidateGeometry,
        Suite::ValidateMeasure,
        Suite::ValidateSpectral,
        Suite::VerifyKernel,
        Suite::Bmo,
        Suite::CommutatorNorm,
        Suite::TailDecay,
        Suite::Compactness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ValidateGeometry => "validate-geometry",
            Suite::ValidateMeasure => "validate-measure",
            Suite::ValidateSpectral => "validate-spectral",
            Suite::VerifyKernel => "verify-kernel",
            Suite::Bmo => "bmo",
            Suite::CommutatorNorm => "commutator-norm",
            Suite::TailDecay => "tail-decay",
            Suite::Compactness => "compactness",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    fn budget(self, cfg: &ExperimentConfig) -> f64 {
        match self {
            Suite::ValidateGeometry => cfg.geometry.time_budget_s,
            Suite::ValidateMeasure => cfg.measure.time_budget_s,
            Suite::ValidateSpectral => cfg.spectral.time_budget_s,
            Suite::VerifyKernel => cfg.kernel.time_budget_s,
            Suite::Bmo => f64::INFINITY,
            Suite::CommutatorNorm => cfg.commutator.time_budget_s,
            Suite::TailDecay => cfg.tail.time_budget_s,
            Suite::Compactness => cfg.compactness.time_budget_s,
            Suite::All => f64::INFINITY,
        }
    }

    /// Runs one suite (not `All`) on the current rayon pool.
    pub fn run(self, cfg: &ExperimentConfig) -> Result<SuiteReport> {
        let start = Instant::now();
        let mut report = match self {
            Suite::ValidateGeometry => geometry::run(cfg),
            Suite::ValidateMeasure => measure::run(cfg),
            Suite::ValidateSpectral => spectral::run(cfg),
            Suite::VerifyKernel => kernel::run(cfg),
            Suite::Bmo => bmo::run(cfg),
            Suite::CommutatorNorm => commutator_norm::run(cfg),
            Suite::TailDecay => tail::run(cfg),
            Suite::Compactness => compactness::run(cfg),
            Suite::All => unreachable!("`all` is expanded by the caller"),
        }?;
        report.runtime_s = start.elapsed().as_secs_f64();
        report.time_budget_s = self.budget(cfg);
        if report.time_budget_s.is_finite() {
            report.gate(Gate::below("runtime_s", report.runtime_s, report.time_budget_s));
        }
        Ok(report)
    }
}

/// Seeded generator for one named stream of a run.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) fn measure_of(rs: RootSystem) -> WeightedMeasure {
    WeightedMeasure::new(rs)
}

/// Rank-one measure, kernel and commutator discretization.
pub(crate) fn rank1_setup(
    suite: &'static str,
    k: f64,
    kernel: &str,
    grid: &CommutatorGrid,
) -> Result<(WeightedMeasure, CommutatorSetup)> {
    let m = measure_of(RootSystem::rank1(k).in_suite(suite)?);
    let ks = KernelRegistry::with_builtins(&m).in_suite(suite)?.get(kernel).in_suite(suite)?.clone();
    let setup = CommutatorSetup::new(&m, ks, grid.layout()).in_suite(suite)?;
    Ok((m, setup))
}

/// Maximum over an iterator, ignoring nothing: a NaN makes the result NaN.
pub(crate) fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, v| if v.is_nan() || a.is_nan() { f64::NAN } else { a.max(v) })
}
