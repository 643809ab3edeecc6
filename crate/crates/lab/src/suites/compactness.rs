use super::rank1_setup;
use crate::cache::SharedLevels;
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::families::inputs;
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::commutator::{compactness_probe, CompactnessOptions, RealFn};
use dunkl_core::function_spaces::{LipschitzWitness, WitnessKind};

const SUITE: &str = "compactness";

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let cc = &cfg.compactness;
    let mut report = SuiteReport::new(SUITE, cc.time_budget_s);
    let (_, setup) = rank1_setup(SUITE, cc.multiplicity, &cc.kernel, &cc.grid)?;
    let cache = SharedLevels::new(&setup, 0);
    let b = LipschitzWitness::new(WitnessKind::Tent, vec![0.0], 1.0, 1.0, 1.0).in_suite(SUITE)?;
    let support = (b.r_b + f64::from(cc.m).exp2()).min(setup.input_radius());
    let fs = inputs("bumps", cfg.seed ^ 0x0c0a, cc.extended_basis, support)?;
    let evals: Vec<_> = fs.iter().map(|f| move |x: f64| f.eval(x)).collect();
    let basis: Vec<RealFn<'_>> = evals.iter().map(|f| f as RealFn<'_>).collect();

    let mut fractions = cc.delta_fractions.clone();
    if !fractions.contains(&cc.gate_delta_fraction) {
        fractions.push(cc.gate_delta_fraction);
    }
    let opts = CompactnessOptions {
        m: cc.m,
        p: cc.p,
        delta_fractions: fractions,
        prefixes: vec![cc.basis, cc.extended_basis],
        tail_levels: cc.tail_levels.clone(),
        tail_reference: cc.tail_reference,
        holder_stride: cc.holder_stride,
    };
    let probe = compactness_probe(&setup, &cache, &b, &basis, &opts).in_suite(SUITE)?;

    let mut table = Table::new("compactness.csv", &["k", "m", "delta_fraction", "delta", "basis_size", "covering_number"]);
    let mut gate_counts = None;
    for (delta, counts) in &probe.covering_numbers {
        let frac = delta / probe.uniform_bound;
        for &(n, c) in counts {
            table.push(vec![num(cc.multiplicity), int(cc.m), num(frac), num(*delta), int(n), int(c)]);
        }
        if (frac - cc.gate_delta_fraction).abs() <= 1e-12 * cc.gate_delta_fraction {
            gate_counts = Some(counts.clone());
        }
    }
    let spread = probe.holder_spread();
    report.constant("omega_radius", probe.omega_radius);
    report.constant("uniform_bound", probe.uniform_bound);
    report.constant("leakage", probe.leakage);
    report.constant("input_localization", probe.input_localization);
    report.constant("holder_modulus", probe.holder_modulus);
    report.constant("holder_spread", spread);
    let mut slopes = probe.tail_slopes.clone();
    slopes.sort_by(f64::total_cmp);
    // inputs away from the symbol support have identically vanishing tails
    report.constant("median_tail_slope", slopes.get(slopes.len() / 2).copied().unwrap_or(f64::NAN));
    report.gate(Gate::below("leakage", probe.leakage, cc.leakage_tolerance));
    report.gate(Gate::finite("holder_modulus", probe.holder_modulus));
    report.gate(Gate::below("holder_spread", spread, cc.holder_spread_bound));
    let (small, large) = match gate_counts.as_deref() {
        Some([(_, a), (_, b)]) => (*a, *b),
        _ => (0, usize::MAX),
    };
    report.constant(format!("covering_{}", cc.basis), small as f64);
    report.constant(format!("covering_{}", cc.extended_basis), large as f64);
    report.gate(Gate::holds(
        "covering_flattens",
        small == large,
        format!("N(delta) {small} -> {large} at {} of the uniform bound", cc.gate_delta_fraction),
    ));
    report.tables.push(table);
    Ok(report)
}
