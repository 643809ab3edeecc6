use super::{max_of, measure_of, rng};
use crate::config::ExperimentConfig;
use crate::error::{InSuite, LabError, Result};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::geometry::{generate_group, RootSystem};
use dunkl_core::kernels::{
    check_dyadic_estimates, dyadic_piece, kernel_sum, kernel_translation, level_stability, truncate, unit_samples,
    DyadicSample,
    verify_assumptions, AssumptionConfig, AssumptionReport, KernelRegistry, KernelSpec,
};
use dunkl_core::measure::{QuadratureSpec, WeightedMeasure};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SUITE: &str = "verify-kernel";

struct LevelRow {
    level: i32,
    functional: &'static str,
    value: f64,
    samples: usize,
}

struct SystemResult {
    label: String,
    assumptions: AssumptionReport,
    control: AssumptionReport,
    telescoping: f64,
    levels: Vec<LevelRow>,
}

fn telescoping(ks: &KernelSpec, dim: usize, lo: i32, hi: i32, r: &mut impl Rng) -> Result<f64> {
    let inner = truncate(ks, (lo as f64 - 1.0).exp2()).in_suite(SUITE)?;
    let outer = truncate(ks, (hi as f64).exp2()).in_suite(SUITE)?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let mut x: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        let s = r.gen_range((lo - 2) as f64..(hi + 1) as f64).exp2() / n;
        x.iter_mut().for_each(|v| *v *= s);
        let sum: Complex64 = (lo..=hi).map(|l| dyadic_piece(ks, l).eval(&x)).sum();
        let k = ks.eval(&x).norm();
        if k > 0.0 {
            worst = worst.max((sum - (inner(&x) - outer(&x))).norm() / k);
        }
    }
    Ok(worst)
}

/// Unit-scale samples with `|x - y| <= 1`, where the level-zero piece lives.
fn near_samples(dim: usize, count: usize, seed: u64) -> Vec<DyadicSample> {
    let mut r = rng(seed, 0);
    let unit = |r: &mut ChaCha8Rng| -> Vec<f64> {
        let v: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
        v.into_iter().map(|c| c / n).collect()
    };
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect();
            let rho = r.gen_range(0.1..1.0);
            let u = unit(&mut r);
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + rho * b).collect();
            let h = r.gen_range(0.02..0.5);
            let w = unit(&mut r);
            let y_prime = y.iter().zip(&w).map(|(a, b)| a + h * b).collect();
            DyadicSample { x, y, y_prime }
        })
        .collect()
}

fn check_system(label: String, rs: RootSystem, cfg: &ExperimentConfig, stream: u64) -> Result<SystemResult> {
    let kc = &cfg.kernel;
    let m: WeightedMeasure = measure_of(rs);
    let dim = m.dimension();
    let q = QuadratureSpec::gauss(kc.resolution);
    let reg = KernelRegistry::with_builtins(&m).in_suite(SUITE)?;
    let find = |name: &str| {
        reg.get(name).map_err(|_| LabError::UnknownName { kind: "kernel", name: format!("{name} for {label}") })
    };
    let ks = find(&kc.kernel)?;
    let control = find(&kc.control_kernel)?;
    let acfg = AssumptionConfig::default();
    let assumptions = verify_assumptions(ks, &m, &q, &acfg).in_suite(SUITE)?;
    let control = verify_assumptions(control, &m, &q, &acfg).in_suite(SUITE)?;
    let mut r = rng(cfg.seed, stream);
    let (lo, hi) = kc.levels;
    let telescoping = telescoping(ks, dim, lo, hi, &mut r)?;

    let axes = m.root_system().axis_multiplicities().ok_or_else(|| LabError::Precondition {
        suite: SUITE,
        source: dunkl_core::Error::NoClosedForm,
    })?;
    let pt = kernel_translation(&axes);
    let g = generate_group(m.root_system()).in_suite(SUITE)?;
    let pair_count = if dim == 1 { kc.pair_samples } else { kc.planar_pair_samples };
    let mut levels = Vec::new();
    for l in lo..=hi {
        let s = (l as f64).exp2();
        let dk = dyadic_piece(ks, l);
        // fresh unit-scale samples at every level, dilated to scale 2^l
        let level_seed = cfg.seed ^ (stream << 16) ^ (l + 64) as u64;
        let scaled: Vec<_> = near_samples(dim, kc.samples, level_seed).iter().map(|u| u.scaled(s)).collect();
        let est = check_dyadic_estimates(&pt, &m, &dk, &scaled, &q).in_suite(SUITE)?;
        levels.push(LevelRow { level: l, functional: "dyadic_size", value: est.size_constant, samples: est.samples });
        levels.push(LevelRow { level: l, functional: "dyadic_holder", value: est.holder_constant, samples: est.samples });
        let pairs: Vec<_> = unit_samples(dim, pair_count, level_seed ^ 0x5eed)
            .into_iter()
            .filter(|p| g.orbit_distance(&p.x, &p.y) > 1e-3)
            .collect();
        let (mut size, mut holder, mut holder_n) = (0.0f64, 0.0f64, 0);
        for p in &pairs {
            let p = p.scaled(s);
            let d = g.orbit_distance(&p.x, &p.y);
            let reach = p.x.iter().chain(&p.y).map(|v| v * v).sum::<f64>().sqrt() * 2.0;
            let range = d.log2().floor() as i32..=reach.log2().ceil() as i32 + 2;
            let rep = kernel_sum(&pt, &g, &m, ks, &p.x, &p.y, Some(&p.y_prime), range, &q).in_suite(SUITE)?;
            size = size.max(rep.size_functional);
            if let Some(h) = rep.holder_functional {
                holder = holder.max(h);
                holder_n += 1;
            }
        }
        levels.push(LevelRow { level: l, functional: "sum_size", value: size, samples: pairs.len() });
        levels.push(LevelRow { level: l, functional: "sum_holder", value: holder, samples: holder_n });
    }
    Ok(SystemResult { label, assumptions, control, telescoping, levels })
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let kc = &cfg.kernel;
    let mut report = SuiteReport::new(SUITE, kc.time_budget_s);
    let systems: Vec<(String, RootSystem)> =
        kc.systems.iter().map(|s| Ok((s.label(), s.resolve()?))).collect::<Result<_>>()?;
    let results: Vec<SystemResult> = systems
        .into_par_iter()
        .enumerate()
        .map(|(i, (label, rs))| check_system(label, rs, cfg, 400 + i as u64))
        .collect::<Result<_>>()?;

    let mut assumptions = Table::new(
        "kernel_assumptions.csv",
        &[
            "system",
            "kernel",
            "annulus_sup",
            "annulus_log_slope",
            "annulus_holds",
            "derivative_0",
            "derivative_1",
            "derivative_2",
            "derivatives_hold",
            "cauchy_last_difference",
            "limit_re",
            "limit_im",
            "limit_holds",
        ],
    );
    let mut estimates = Table::new("kernel_estimates.csv", &["system", "level", "functional", "measured_constant", "samples"]);
    for res in &results {
        for a in [&res.assumptions, &res.control] {
            let d = |i: usize| a.derivatives.get(i).map_or(String::new(), |d| num(d.measured));
            assumptions.push(vec![
                res.label.clone(),
                a.kernel.clone(),
                num(a.annulus_sup),
                num(a.annulus_log_slope),
                a.a_holds.to_string(),
                d(0),
                d(1),
                d(2),
                a.d_holds.to_string(),
                num(a.cauchy_differences.last().copied().unwrap_or(0.0)),
                num(a.extrapolated_limit.re),
                num(a.extrapolated_limit.im),
                a.l_holds.to_string(),
            ]);
        }
        let l = &res.label;
        let a = &res.assumptions;
        report.gate(Gate::holds(&format!("{l}/annulus"), a.a_holds, format!("annulus sup {:.3e}", a.annulus_sup)));
        report.gate(Gate::holds(
            &format!("{l}/derivatives"),
            a.d_holds && a.derivatives.len() == 3,
            format!("orders checked: {}", a.derivatives.len()),
        ));
        report.gate(Gate::holds(&format!("{l}/cancellation_limit"), a.l_holds, format!("limit {:.3e}", a.extrapolated_limit)));
        let c = &res.control;
        report.gate(Gate::holds(
            &format!("{l}/control_rejected"),
            !(c.a_holds && c.d_holds && c.l_holds),
            format!("{} annulus sup {:.3e}", c.kernel, c.annulus_sup),
        ));
        report.gate(Gate::below(&format!("{l}/telescoping"), res.telescoping, kc.telescoping_tolerance));
        for row in &res.levels {
            estimates.push(vec![l.clone(), int(row.level), row.functional.into(), num(row.value), int(row.samples)]);
        }
        for functional in ["dyadic_size", "dyadic_holder", "sum_size", "sum_holder"] {
            let values: Vec<f64> = res.levels.iter().filter(|r| r.functional == functional).map(|r| r.value).collect();
            let finite = values.iter().all(|v| v.is_finite() && *v > 0.0);
            let stability = if finite { level_stability(values.iter().copied()) } else { f64::INFINITY };
            report.constant(format!("{l}/{functional}_stability"), stability);
            report.constant(format!("{l}/{functional}_max"), max_of(values));
            report.gate(Gate::below(&format!("{l}/{functional}_stability"), stability, kc.stability_bound));
        }
        report.constant(format!("{l}/annulus_sup"), a.annulus_sup);
    }
    report.tables.push(assumptions);
    report.tables.push(estimates);
    Ok(report)
}
