use super::{rank1_setup, rng};
use crate::cache::SharedLevels;
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::families::LineInput;
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::commutator::{cauchy_tail, regression_slope, tail_bounds_probe, CommutatorSeries, LimitOptions};
use dunkl_core::function_spaces::{LipschitzWitness, WitnessKind};
use dunkl_core::measure::QuadratureSpec;
use rand::Rng;

const SUITE: &str = "tail-decay";

/// Unit tent at the origin and a smooth bump overlapping its support.
pub(crate) fn standard_pair() -> Result<(LipschitzWitness, LineInput)> {
    let b = LipschitzWitness::new(WitnessKind::Tent, vec![0.0], 1.0, 1.0, 1.0).in_suite(SUITE)?;
    let f = LineInput { center: 0.25, radius: 1.5, amplitude: 1.0, frequency: 0.0 };
    Ok((b, f))
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let tc = &cfg.tail;
    let mut report = SuiteReport::new(SUITE, tc.time_budget_s);
    let (m, setup) = rank1_setup(SUITE, tc.multiplicity, &tc.kernel, &tc.grid)?;
    let cache = SharedLevels::new(&setup, 0);
    let (witness, input) = standard_pair()?;
    let b = |x: f64| witness.eval(&[x]);
    let f = |x: f64| input.eval(x);
    let eps = setup.kernel().epsilon;
    let p0 = 0.5 * (1.0 + tc.p);

    let mut series = CommutatorSeries::new(&setup, &cache, &b, &f);
    let cap = setup.max_level().max(0) as u32;
    let conv = series
        .limit(&LimitOptions { p0, tolerance: tc.reference_tolerance, cap })
        .in_suite(SUITE)?;
    let (lo, hi) = tc.m_range;
    let reference = conv.m_star.max(hi + 2);
    let ms: Vec<u32> = (lo..=hi).collect();
    let tails = cauchy_tail(&mut series, &ms, reference, p0).in_suite(SUITE)?;
    let xs: Vec<f64> = ms.iter().map(|&m| f64::from(m)).collect();
    let ys: Vec<f64> = tails.iter().map(|t| t.max(f64::MIN_POSITIVE).log2()).collect();
    let slope = regression_slope(&xs, &ys);

    let mut decay = Table::new("tail_decay.csv", &["k", "m", "tail_norm", "log2_tail", "reference_level", "p0"]);
    for (&mi, &t) in ms.iter().zip(&tails) {
        decay.push(vec![num(tc.multiplicity), int(mi), num(t), num(t.log2()), int(reference), num(p0)]);
    }
    let target = -tc.slope_factor * eps;
    report.constant("epsilon", eps);
    report.constant("slope", slope);
    report.constant("reference_level", f64::from(reference));
    report.gate(Gate::at_most("tail_slope", slope, target));
    let monotone = tails.windows(2).all(|w| w[1] < w[0]);
    report.gate(Gate::holds("tail_decreasing", monotone, "tail norms decrease with m"));

    let mut r = rng(cfg.seed, 700);
    let samples: Vec<f64> = (0..tc.samples)
        .map(|_| {
            let s = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            s * r.gen_range(-3.0f64..6.0).exp2()
        })
        .collect();
    let q = QuadratureSpec::gauss(16);
    let probe = tail_bounds_probe(&setup, &cache, &m, &witness, &f, tc.p, tc.envelope_level, &samples, &q).in_suite(SUITE)?;
    let mut bounds = Table::new(
        "tail_bounds.csv",
        &["k", "m", "x", "small", "small_shape", "bx", "bx_shape", "by", "by_shape"],
    );
    for row in &probe.rows {
        bounds.push(vec![
            num(tc.multiplicity),
            int(probe.m),
            num(row.x),
            num(row.small),
            num(row.small_shape),
            num(row.bx),
            num(row.bx_shape),
            num(row.by),
            num(row.by_shape),
        ]);
    }
    report.constant("small_constant", probe.small_constant);
    report.constant("bx_constant", probe.bx_constant);
    report.constant("by_constant", probe.by_constant);
    report.gate(Gate::at_most("bx_vanishes_outside_support", probe.bx_outside, 0.0));
    report.gate(Gate::finite("small_envelope_constant", probe.small_constant));
    report.gate(Gate::finite("by_envelope_constant", probe.by_constant));
    report.tables.push(decay);
    report.tables.push(bounds);
    Ok(report)
}
