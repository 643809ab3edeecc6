use super::{max_of, measure_of, rng};
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::geometry::{generate_group, RootSystem};
use dunkl_core::measure::{ball_volume, check_growth, check_volume_asymptotics, integrate, QuadratureSpec, Region, WeightedMeasure};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

const SUITE: &str = "validate-measure";

struct Volume {
    center: Vec<f64>,
    radius: f64,
    volume: f64,
}

struct SystemResult {
    label: String,
    volumes: Vec<Volume>,
    /// `(check, samples, min, max, defect)`.
    checks: Vec<(&'static str, usize, f64, f64, f64)>,
}

fn check_system(
    label: String,
    rs: RootSystem,
    cfg: &ExperimentConfig,
    stream: u64,
) -> Result<SystemResult> {
    let mc = &cfg.measure;
    let m = measure_of(rs);
    let dim = m.dimension();
    let n = m.homogeneous_dimension();
    let q = QuadratureSpec::gauss(mc.resolution);
    let g = generate_group(m.root_system()).in_suite(SUITE)?;
    let mut r = rng(cfg.seed, stream);
    let mut volumes = Vec::new();
    let mut vol = |x: &[f64], rad: f64, q: &QuadratureSpec| -> Result<f64> {
        let v = ball_volume(&m, x, rad, q).in_suite(SUITE)?;
        if q.resolution == mc.resolution {
            volumes.push(Volume { center: x.to_vec(), radius: rad, volume: v });
        }
        Ok(v)
    };
    let mut checks = Vec::new();

    let (mut scaling, mut invariance, mut convergence) = (0.0f64, 0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..mc.scaling_samples {
        let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-3.0..3.0)).collect();
        let rad = r.gen_range(0.05..3.0);
        let t = r.gen_range(0.2..5.0);
        let s = r.gen_range(0..g.order());
        let v = vol(&x, rad, &q)?;
        let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
        let vt = vol(&tx, t * rad, &q)?;
        let ratio = vt / (t.powf(n) * v);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        scaling = scaling.max((ratio - 1.0).abs());
        let vs = vol(&g.apply(s, &x), rad, &q)?;
        invariance = invariance.max((vs / v - 1.0).abs());
        let fine = vol(&x, rad, &q.refined())?;
        convergence = convergence.max((fine / v - 1.0).abs());
    }
    checks.push(("scaling_law", mc.scaling_samples, lo, hi, scaling));
    checks.push(("g_invariance", mc.scaling_samples, 1.0 - invariance, 1.0 + invariance, invariance));
    checks.push(("resolution_doubling", mc.scaling_samples, 1.0 - convergence, 1.0 + convergence, convergence));

    let mut growth = Vec::with_capacity(mc.growth_samples);
    let (mut g_lo, mut g_hi) = ((f64::INFINITY, f64::INFINITY), (0.0f64, 0.0f64));
    for _ in 0..mc.growth_samples {
        let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-4.0..4.0)).collect();
        let r1 = 2f64.powf(r.gen_range(-4.0..2.0));
        let r2 = r1 * 2f64.powf(r.gen_range(0.0..4.0));
        let (a, b) = check_growth(&m, &x, r1, r2, &q).in_suite(SUITE)?;
        g_lo = (g_lo.0.min(a), g_lo.1.min(b));
        g_hi = (g_hi.0.max(a), g_hi.1.max(b));
        growth.push((x, r1));
    }
    let defect = |lo: f64, hi: f64| if lo > 0.0 && hi.is_finite() { 0.0 } else { f64::INFINITY };
    // lower bracket: w(B(x, r2)) >= C (r2/r1)^N w(B(x, r1)); upper with the homogeneous dimension
    checks.push(("growth_lower", mc.growth_samples, g_lo.0, g_hi.0, defect(g_lo.0, g_hi.0)));
    checks.push(("growth_upper", mc.growth_samples, g_lo.1, g_hi.1, defect(g_lo.1, g_hi.1)));
    let asym = check_volume_asymptotics(&m, &growth, &q).in_suite(SUITE)?;
    checks.push(("volume_asymptotics", asym.samples, asym.min_ratio, asym.max_ratio, defect(asym.min_ratio, asym.max_ratio)));

    Ok(SystemResult { label, volumes, checks })
}

/// `w(B(0, r)) = (4/3) r^3` for rank one with `k = 1`, by both routes.
fn closed_form(resolution: usize) -> Result<(f64, Vec<Volume>)> {
    let m = WeightedMeasure::new(RootSystem::rank1(1.0).in_suite(SUITE)?);
    let q = QuadratureSpec::gauss(resolution);
    let mut worst = 0.0f64;
    let mut volumes = Vec::new();
    for rad in [0.125, 0.5, 1.0, 2.0, 7.5] {
        let exact = 4.0 / 3.0 * rad * rad * rad;
        let v = ball_volume(&m, &[0.0], rad, &q).in_suite(SUITE)?;
        let i = integrate(&m, |_| Complex64::new(1.0, 0.0), &Region::ball(vec![0.0], rad), &q).in_suite(SUITE)?.re;
        worst = worst.max((v / exact - 1.0).abs()).max((i / exact - 1.0).abs());
        volumes.push(Volume { center: vec![0.0], radius: rad, volume: v });
    }
    Ok((worst, volumes))
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let mc = &cfg.measure;
    let mut report = SuiteReport::new(SUITE, mc.time_budget_s);
    let systems: Vec<(String, RootSystem)> =
        mc.systems.iter().map(|s| Ok((s.label(), s.resolve()?))).collect::<Result<_>>()?;
    let results: Vec<SystemResult> = systems
        .into_par_iter()
        .enumerate()
        .map(|(i, (label, rs))| check_system(label, rs, cfg, 200 + i as u64))
        .collect::<Result<_>>()?;
    let (closed, closed_volumes) = closed_form(mc.resolution)?;

    let mut checks = Table::new("measure.csv", &["system", "check", "samples", "min", "max", "defect", "tolerance", "passed"]);
    let mut volumes = Table::new("volumes.csv", &["system", "center_1", "center_2", "radius", "volume", "scheme", "resolution"]);
    let mut push_volumes = |label: &str, vs: &[Volume]| {
        for v in vs {
            volumes.push(vec![
                label.into(),
                num(v.center[0]),
                v.center.get(1).map_or(String::new(), |&c| num(c)),
                num(v.radius),
                num(v.volume),
                "gauss-legendre".into(),
                int(mc.resolution),
            ]);
        }
    };
    for res in &results {
        for &(check, samples, lo, hi, defect) in &res.checks {
            let tol = match check {
                "scaling_law" | "resolution_doubling" => mc.scaling_tolerance,
                "g_invariance" => mc.invariance_tolerance,
                _ => f64::INFINITY,
            };
            let gate = if tol.is_finite() { Gate::below(&format!("{}/{check}", res.label), defect, tol) } else { Gate::finite(&format!("{}/{check}", res.label), defect) };
            checks.push(vec![
                res.label.clone(),
                check.into(),
                int(samples),
                num(lo),
                num(hi),
                num(defect),
                num(tol),
                gate.passed.to_string(),
            ]);
            report.gate(gate);
        }
        push_volumes(&res.label, &res.volumes);
    }
    let label = "rank1[1]";
    checks.push(vec![
        label.into(),
        "closed_form_unit_ball".into(),
        int(closed_volumes.len()),
        num(closed),
        num(closed),
        num(closed),
        num(mc.closed_form_tolerance),
        (closed < mc.closed_form_tolerance).to_string(),
    ]);
    report.gate(Gate::below("closed_form_unit_ball", closed, mc.closed_form_tolerance));
    push_volumes(label, &closed_volumes);
    report.constant("closed_form_defect", closed);
    report.constant(
        "scaling_defect",
        max_of(results.iter().flat_map(|r| r.checks.iter().filter(|c| c.0 == "scaling_law").map(|c| c.4))),
    );
    report.tables.push(checks);
    report.tables.push(volumes);
    Ok(report)
}
