use super::{max_of, rng};
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::geometry::{chamber_of, generate_group, reflect, CoxeterGroup, RootSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SUITE: &str = "validate-geometry";

fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Group element moving `y` into the closed chamber of `x`.
fn into_chamber(rs: &RootSystem, g: &CoxeterGroup, x: &[f64], y: &[f64]) -> Option<Vec<f64>> {
    let target = chamber_of(rs, x);
    (0..g.order()).map(|s| g.apply(s, y)).find(|gy| target.contains(gy))
}

struct Checks {
    closure: f64,
    involution: f64,
    orbit_invariance: f64,
    chamber: f64,
    chamber_pairs: usize,
}

fn check_system(rs: &RootSystem, pairs: usize, seed: u64, stream: u64) -> Result<Checks> {
    let g = generate_group(rs).in_suite(SUITE)?;
    let dim = rs.dimension();
    let mut closure = if g.is_closed() { 0.0 } else { 1.0 };
    for a in 0..g.order() {
        for b in 0..g.order() {
            if g.find(&g.compose(a, b)).is_none() {
                closure = 1.0;
            }
        }
    }
    let mut r = rng(seed, stream);
    let (mut involution, mut orbit_invariance, mut chamber) = (0.0f64, 0.0f64, 0.0f64);
    let mut chamber_pairs = 0;
    for _ in 0..pairs {
        let x = point(&mut r, dim);
        let y = point(&mut r, dim);
        for alpha in rs.roots() {
            involution = involution.max(dist(&reflect(alpha, &reflect(alpha, &x)), &x));
        }
        let s = r.gen_range(0..g.order());
        let t = r.gen_range(0..g.order());
        let d = g.orbit_distance(&x, &y);
        orbit_invariance = orbit_invariance
            .max((g.orbit_distance(&g.apply(s, &x), &y) - d).abs())
            .max((g.orbit_distance(&x, &g.apply(t, &y)) - d).abs())
            .max((g.orbit_distance(&g.apply(s, &x), &g.apply(s, &y)) - d).abs());
        if let Some(gy) = into_chamber(rs, &g, &x, &y) {
            chamber = chamber.max((g.orbit_distance(&x, &gy) - dist(&x, &gy)).abs());
            chamber_pairs += 1;
        }
    }
    Ok(Checks { closure, involution, orbit_invariance, chamber, chamber_pairs })
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let gc = &cfg.geometry;
    let mut report = SuiteReport::new(SUITE, gc.time_budget_s);
    let systems: Vec<(String, RootSystem)> =
        gc.systems.iter().map(|s| Ok((s.label(), s.resolve()?))).collect::<Result<_>>()?;
    let results: Vec<Checks> = systems
        .par_iter()
        .enumerate()
        .map(|(i, (_, rs))| check_system(rs, gc.pairs, cfg.seed, 100 + i as u64))
        .collect::<Result<_>>()?;
    let mut table = Table::new("geometry.csv", &["system", "order", "check", "samples", "max_defect", "tolerance", "passed"]);
    for ((label, rs), c) in systems.iter().zip(&results) {
        let order = generate_group(rs).in_suite(SUITE)?.order();
        let rows = [
            ("closure", order * order, c.closure),
            ("reflection_involution", gc.pairs * rs.roots().len(), c.involution),
            ("orbit_distance_invariance", 3 * gc.pairs, c.orbit_invariance),
            ("chamber_property", c.chamber_pairs, c.chamber),
        ];
        for (check, samples, defect) in rows {
            let passed = defect < gc.tolerance;
            table.push(vec![
                label.clone(),
                int(order),
                check.into(),
                int(samples),
                num(defect),
                num(gc.tolerance),
                passed.to_string(),
            ]);
            report.gate(Gate::below(&format!("{label}/{check}"), defect, gc.tolerance));
        }
        report.gate(Gate::holds(
            &format!("{label}/chamber_pairs"),
            c.chamber_pairs == gc.pairs,
            format!("{} of {} pairs mapped into a common chamber", c.chamber_pairs, gc.pairs),
        ));
    }
    report.constant("max_defect", max_of(results.iter().flat_map(|c| [c.involution, c.orbit_invariance, c.chamber])));
    report.tables.push(table);
    Ok(report)
}
