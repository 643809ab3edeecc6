use super::{max_of, measure_of, rng};
use crate::config::{ExperimentConfig, GridDoc};
use crate::error::{InSuite, Result};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::geometry::{generate_group, RootSystem};
use dunkl_core::spectral::{dunkl_operator, ConvolutionMode, DunklKernel, GridFunction, SpectralContext, TranslationMethod};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SUITE: &str = "validate-spectral";

/// `(1 - |x - c|^2/r^2)^8 cos(<w, x>)` on its support ball.
#[derive(Debug, Clone)]
struct TestFn {
    center: Vec<f64>,
    radius: f64,
    wave: Vec<f64>,
}

impl TestFn {
    fn eval(&self, x: &[f64]) -> Complex64 {
        let t2 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (self.radius * self.radius);
        if t2 >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase: f64 = x.iter().zip(&self.wave).map(|(a, b)| a * b).sum();
        Complex64::new((1.0 - t2).powi(8) * phase.cos(), 0.0)
    }

    fn reach(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.radius
    }
}

fn test_functions(r: &mut ChaCha8Rng, dim: usize, count: usize, reach: f64) -> Vec<TestFn> {
    (0..count)
        .map(|i| {
            let radius = r.gen_range(0.6..0.9) * reach;
            let room = (reach - radius) / (dim as f64).sqrt();
            let center = (0..dim).map(|_| r.gen_range(-room..room)).collect();
            // every other function is modulated
            let wave = (0..dim).map(|_| if i % 2 == 1 { r.gen_range(-3.0..3.0) } else { 0.0 }).collect();
            TestFn { center, radius, wave }
        })
        .collect()
}

#[derive(Default)]
struct Row {
    plancherel: f64,
    inversion: f64,
    residual: f64,
    outside_mass: f64,
    contraction: f64,
    convolution: f64,
    commutativity: f64,
    aliased: bool,
}

struct Case {
    label: String,
    rs: RootSystem,
    space: GridDoc,
    frequency: GridDoc,
    reach: f64,
}

fn residual(rs: &RootSystem, r: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let kernel = DunklKernel::new(rs).in_suite(SUITE)?;
    let dim = rs.dimension();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let y: Vec<f64> = (0..dim).map(|_| r.gen_range(-3.0..3.0)).collect();
        let yc: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut xi: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        xi.iter_mut().for_each(|v| *v /= n);
        let lambda: f64 = xi.iter().zip(&y).map(|(a, b)| a * b).sum();
        let e = |x: &[f64]| kernel.eval(x, &yc);
        let grad = |x: &[f64]| kernel.gradient_x(x, &yc);
        let t = dunkl_operator(rs, &xi, e, Some(grad)).in_suite(SUITE)?;
        for _ in 0..4 {
            let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.5..2.5)).collect();
            let ex = kernel.eval(&x, &yc);
            worst = worst.max((t(&x) - lambda * ex).norm() / (1.0 + ex.norm()));
        }
    }
    Ok(worst)
}

fn run_case(case: &Case, cfg: &ExperimentConfig, stream: u64) -> Result<Vec<Row>> {
    let sc = &cfg.spectral;
    let m = measure_of(case.rs.clone());
    let g = generate_group(&case.rs).in_suite(SUITE)?;
    let ctx = SpectralContext::new(m, case.space.spec(), case.frequency.spec()).in_suite(SUITE)?;
    let dim = case.rs.dimension();
    let mut r = rng(cfg.seed, stream);
    let fns = test_functions(&mut r, dim, sc.functions, case.reach);
    let residual = residual(&case.rs, &mut r, sc.kernel_samples)?;
    let sampled: Vec<GridFunction> = fns.iter().map(|t| ctx.sample(Some(t.reach()), |x| t.eval(x))).collect();
    let mut rows = Vec::with_capacity(fns.len());
    for (i, f) in sampled.iter().enumerate() {
        let mut row = Row { residual, ..Row::default() };
        let ff = ctx.dunkl_transform(f).in_suite(SUITE)?;
        row.aliased = ff.aliased();
        row.plancherel = (ff.l2_norm() / f.l2_norm() - 1.0).abs();
        row.inversion = ctx.inverse_transform(&ff).in_suite(SUITE)?.relative_l2_distance(f).in_suite(SUITE)?;

        // containment: tau_x f(-y) lives on the orbit of B(x, r) for f supported in B(0, r)
        let rad = fns[i].radius;
        let centred = ctx.sample(Some(rad), |x| TestFn { center: vec![0.0; dim], ..fns[i].clone() }.eval(x));
        let room = 0.9 * (case.space.extent - rad) / (dim as f64).sqrt();
        let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-room..room)).collect();
        let t = ctx.translate(&x, &centred, TranslationMethod::ProductFormula).in_suite(SUITE)?;
        let (mut inside, mut outside) = (0.0, 0.0);
        for ((p, v), w) in t.points().zip(t.values()).zip(t.quad_weights()) {
            let mass = v.norm_sqr() * w;
            if g.orbit_distance(&x, &p) > rad + 1e-9 {
                outside += mass;
            } else {
                inside += mass;
            }
        }
        row.outside_mass = outside / (inside + outside).max(f64::MIN_POSITIVE);
        row.contraction = (t.l2_norm() / centred.l2_norm() - 1.0).max(0.0);

        let h = &sampled[(i + 1) % sampled.len()];
        let pts: Vec<Vec<f64>> = (0..3).map(|_| (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect()).collect();
        let a = ctx.convolve_at(f, h, ConvolutionMode::Spectral, &pts).in_suite(SUITE)?;
        let b = ctx.convolve_at(f, h, ConvolutionMode::Translation, &pts).in_suite(SUITE)?;
        let c = ctx.convolve_at(h, f, ConvolutionMode::Spectral, &pts).in_suite(SUITE)?;
        let scale = max_of(a.iter().map(|v| v.norm())).max(f64::MIN_POSITIVE);
        row.convolution = max_of(a.iter().zip(&b).map(|(u, v)| (u - v).norm())) / scale;
        row.commutativity = max_of(a.iter().zip(&c).map(|(u, v)| (u - v).norm())) / scale;
        rows.push(row);
    }
    Ok(rows)
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let sc = &cfg.spectral;
    let mut report = SuiteReport::new(SUITE, sc.time_budget_s);
    let mut cases = Vec::new();
    for &k in &sc.rank1_multiplicities {
        cases.push(Case {
            label: format!("rank1[{k}]"),
            rs: RootSystem::rank1(k).in_suite(SUITE)?,
            space: sc.rank1_space,
            frequency: sc.rank1_frequency,
            reach: 0.3 * sc.rank1_space.extent,
        });
    }
    if !sc.product_multiplicities.is_empty() {
        let ks: Vec<String> = sc.product_multiplicities.iter().map(|k| k.to_string()).collect();
        cases.push(Case {
            label: format!("product[{}]", ks.join(",")),
            rs: RootSystem::product(&sc.product_multiplicities).in_suite(SUITE)?,
            space: sc.product_space,
            frequency: sc.product_frequency,
            reach: 0.5 * sc.product_space.extent,
        });
    }
    let results: Vec<Vec<Row>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_case(c, cfg, 300 + i as u64))
        .collect::<Result<_>>()?;

    let mut table = Table::new(
        "spectral.csv",
        &[
            "system",
            "function",
            "plancherel_defect",
            "inversion_error",
            "kernel_residual",
            "translation_outside_mass",
            "translation_growth",
            "convolution_gap",
            "convolution_asymmetry",
            "aliased",
        ],
    );
    for (case, rows) in cases.iter().zip(&results) {
        for (i, r) in rows.iter().enumerate() {
            table.push(vec![
                case.label.clone(),
                int(i),
                num(r.plancherel),
                num(r.inversion),
                num(r.residual),
                num(r.outside_mass),
                num(r.contraction),
                num(r.convolution),
                num(r.commutativity),
                r.aliased.to_string(),
            ]);
        }
        let l = &case.label;
        report.gate(Gate::below(&format!("{l}/plancherel"), max_of(rows.iter().map(|r| r.plancherel)), sc.tolerance));
        report.gate(Gate::below(&format!("{l}/inversion"), max_of(rows.iter().map(|r| r.inversion)), sc.tolerance));
        report.gate(Gate::below(&format!("{l}/kernel_residual"), max_of(rows.iter().map(|r| r.residual)), sc.residual_tolerance));
        report.gate(Gate::below(&format!("{l}/support_containment"), max_of(rows.iter().map(|r| r.outside_mass)), sc.support_tolerance));
        report.gate(Gate::below(&format!("{l}/translation_contraction"), max_of(rows.iter().map(|r| r.contraction)), 1e-8));
        report.gate(Gate::below(&format!("{l}/convolution_modes"), max_of(rows.iter().map(|r| r.convolution)), sc.tolerance));
        report.gate(Gate::below(&format!("{l}/convolution_commutes"), max_of(rows.iter().map(|r| r.commutativity)), sc.tolerance));
        report.gate(Gate::holds(&format!("{l}/no_aliasing"), rows.iter().all(|r| !r.aliased), "no transform flagged as aliased"));
    }
    report.constant("max_inversion_error", max_of(results.iter().flatten().map(|r| r.inversion)));
    report.constant("max_outside_mass", max_of(results.iter().flatten().map(|r| r.outside_mass)));
    report.tables.push(table);
    Ok(report)
}
