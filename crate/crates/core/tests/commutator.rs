use dunkl_core::commutator::*;
use dunkl_core::function_spaces::{lipschitz_family, BallFamily, LipschitzWitness, WitnessKind};
use dunkl_core::geometry::{generate_group, Ball, RootSystem};
use dunkl_core::kernels::{builtin_riesz_kernel, smooth_step};
use dunkl_core::measure::{QuadratureSpec, WeightedMeasure};
use dunkl_core::quadrature::GaussLegendre;
use dunkl_core::spectral::{GridSpec, SpectralContext};
use dunkl_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn small_layout() -> TableLayout {
    TableLayout { output: PanelLayout { octaves: 6, ..PanelLayout::default() }, ..TableLayout::default() }
}

struct Fixture {
    measure: WeightedMeasure,
    setup: CommutatorSetup,
    levels: PrebuiltLevels,
}

fn fixture(k: f64, levels: std::ops::RangeInclusive<i32>) -> Fixture {
    let measure = WeightedMeasure::new(RootSystem::rank1(k).unwrap());
    let setup = CommutatorSetup::new(&measure, builtin_riesz_kernel(&measure, 0).unwrap(), small_layout()).unwrap();
    let levels = PrebuiltLevels::build(&setup, levels).unwrap();
    Fixture { measure, setup, levels }
}

fn shared_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(0.5, -3..=3))
}

fn bump(c: f64, r: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let t = (x - c) / r;
        if t.abs() < 1.0 {
            (1.0 - t * t).powi(3)
        } else {
            0.0
        }
    }
}

#[test]
fn hilbert_commutator_matches_double_quadrature() {
    let fx = fixture(0.0, -3..=3);
    let b = |x: f64| (1.3 * x).sin();
    let f = bump(0.2, 1.5);
    let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b: &b, p: 2.0, m: 3 };
    let out = commutator_truncated(&cfg, &f).unwrap();
    // K^{(3)}(u) = (phi(|u|/8) - phi(16|u|)) / u
    let trunc = |u: f64| (smooth_step(u.abs() / 8.0) - smooth_step(16.0 * u.abs())) / u;
    let gl = GaussLegendre::new(12);
    let reference = |x: f64| {
        let mut acc = 0.0;
        let n = 3000;
        let h = 3.4 / n as f64;
        for i in 0..n {
            let a = -1.3 + i as f64 * h;
            acc += gl.integrate(a, a + h, |y| if y == x { 0.0 } else { (b(x) - b(y)) * trunc(x - y) * f(y) });
        }
        acc
    };
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for x in [-3.0, -1.1, -0.4, 0.05, 0.9, 1.7, 2.6, 6.0] {
        let r = reference(x);
        worst = worst.max((out.eval(x) - r).abs());
        scale = scale.max(r.abs());
    }
    assert!(worst < 1e-6 * scale, "{worst} {scale}");
}

#[test]
fn riesz_transform_of_an_interval_is_logarithmic() {
    let fx = fixture(0.0, -4..=4);
    let f = |y: f64| if y.abs() <= 1.0 { 1.0 } else { 0.0 };
    for x in [-3.5, -1.5, -0.6, 0.0, 0.3, 0.8, 2.2, 5.0] {
        let v = direct_operator_at(&fx.setup, &f, x, 4).unwrap();
        let exact = ((x + 1.0) / (x - 1.0)).abs().ln();
        assert!((v - exact).abs() < 1e-5 * exact.abs().max(1.0), "x={x} {v} {exact}");
    }
}

#[test]
fn spectral_application_agrees_with_kernel_sums_off_support() {
    for k in [0.0, 0.5, 1.0] {
        let measure = WeightedMeasure::new(RootSystem::rank1(k).unwrap());
        let kernel = builtin_riesz_kernel(&measure, 0).unwrap();
        let fine = TableLayout { translation_step: 1.0 / 32.0, translation_nodes: 40, piece_nodes: 16, ..small_layout() };
        let setup = CommutatorSetup::new(&measure, kernel.clone(), fine).unwrap();
        let ctx = SpectralContext::new(measure, GridSpec::new(8.0, 0.5, 20), GridSpec::new(48.0, 2.0, 20)).unwrap();
        let cutoff = |y: f64| {
            let t = y / 1.5;
            if t.abs() < 1.0 { (1.0 - t * t).powi(8) * (1.0 + 0.5 * y) } else { 0.0 }
        };
        let f = ctx.sample(None, |y| Complex64::new(cutoff(y[0]), 0.0));
        let tf = operator_apply(&ctx, &kernel, &f, 2).unwrap();
        assert!(!tf.aliased());
        let mut rng_x = 2.1;
        for _ in 0..20 {
            rng_x = (rng_x * 7.31 + 0.37) % 4.5;
            let x = if (rng_x * 10.0) as i64 % 2 == 0 { 1.8 + rng_x } else { -1.8 - rng_x };
            let direct = direct_operator_at(&setup, &cutoff, x, 2).unwrap();
            let spectral = tf.interpolate(&[x]).re;
            let scale = direct.abs().max(1e-3 * tf.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
            assert!((direct - spectral).abs() < 1e-5 * scale, "k={k} x={x} {direct} {spectral}");
        }
    }
}

#[test]
fn constant_symbols_vanish_and_converge_immediately() {
    let fx = shared_half();
    let b = |_: f64| 2.5;
    let f = bump(-0.4, 1.2);
    let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b: &b, p: 2.0, m: 3 };
    assert!(commutator_truncated(&cfg, &f).unwrap().values.iter().all(|&v| v == 0.0));
    let (out, conv) = commutator_limit(&cfg, &f, &LimitOptions { cap: 3, ..LimitOptions::for_exponent(2.0) }).unwrap();
    assert_eq!(conv.m_star, 0);
    assert_eq!(out.sup_norm(), 0.0);
}

#[test]
fn missing_levels_are_reported() {
    let fx = shared_half();
    let b = |x: f64| x.cos();
    let f = bump(0.0, 1.0);
    let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b: &b, p: 2.0, m: 4 };
    assert_eq!(commutator_truncated(&cfg, &f), Err(Error::MissingLevel(-4)));
    let rank2 = WeightedMeasure::new(RootSystem::product(&[1.0, 1.0]).unwrap());
    let ks = builtin_riesz_kernel(&rank2, 0).unwrap();
    assert!(CommutatorSetup::new(&rank2, ks, small_layout()).is_err());
}

#[test]
fn limit_stopping_rule_is_monotone_in_tolerance() {
    let fx = fixture(1.0, -8..=8);
    let b = |x: f64| (1.0 - (x - 0.2).abs()).max(0.0);
    let f = bump(0.3, 1.5);
    let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b: &b, p: 3.0, m: 0 };
    let mut last = u32::MAX;
    for tol in [1e-2, 3e-2, 1e-1, 3e-1] {
        let (_, conv) = commutator_limit(&cfg, &f, &LimitOptions { tolerance: tol, cap: 8, ..LimitOptions::for_exponent(3.0) }).unwrap();
        assert!(conv.m_star <= last);
        last = conv.m_star;
        let d = &conv.differences;
        assert!(d[d.len() - 1] < d[0]);
    }
    let tight = commutator_limit(&cfg, &f, &LimitOptions { tolerance: 1e-12, cap: 8, ..LimitOptions::for_exponent(3.0) });
    assert!(matches!(tight, Err(Error::NotConverged { diffs }) if diffs.len() == 8));
}

#[test]
fn ratio_table_is_scale_invariant_and_flags_constants() {
    let fx = fixture(0.5, -14..=8);
    let b1 = |x: f64| (1.0 - x.abs()).max(0.0);
    let b2 = |x: f64| 3.0 * (1.0 - x.abs()).max(0.0);
    let c = |_: f64| 1.0;
    let f = bump(0.5, 1.0);
    let f2 = |x: f64| -2.0 * f(x);
    let symbols = [
        Symbol { id: "b".into(), b: &b1, bmo: 0.4 },
        Symbol { id: "3b".into(), b: &b2, bmo: 1.2 },
        Symbol { id: "c".into(), b: &c, bmo: 0.0 },
    ];
    let fs = [NamedFn { id: "f".into(), f: &f }, NamedFn { id: "-2f".into(), f: &f2 }];
    let est = estimate_operator_norm(&fx.setup, &fx.levels, &symbols, &fs, &[2.0], 1e-1).unwrap();
    let ok: Vec<_> = est.cells.iter().filter(|c| c.status == CellStatus::Ok).collect();
    assert_eq!(ok.len(), 4);
    for cell in &ok {
        assert!((cell.ratio / ok[0].ratio - 1.0).abs() < 1e-12);
    }
    for cell in est.cells.iter().filter(|c| c.b_id == "c") {
        assert_eq!(cell.status, CellStatus::Degenerate);
        assert!(cell.commutator_norm < 1e-10 * cell.f_norm);
    }
    assert!(est.bmo_ratio >= ok[0].ratio);
}

#[test]
fn decomposition_partitions_space() {
    let g = generate_group(&RootSystem::rank1(1.0).unwrap()).unwrap();
    let d = decompose(&g, &Ball::new(vec![0.7], 0.1));
    // U_1 = {|z - 0.7| > 0.5, |z + 0.7| <= 0.5}
    for z in [-1.2, -0.7, -0.2, 0.0, 0.2, 0.21, 1.2, 1.3, 3.0] {
        let u1 = ((z - 0.7f64).abs() > 0.5 && (z + 0.7f64).abs() <= 0.5) as i32 as f64;
        assert_eq!(d.reflected(1, &[z]), u1);
        assert!(d.partition_defect(|y: &[f64]| (3.0 * y[0]).sin() + 2.0, &[z]) <= 1e-12);
    }
    let g2 = generate_group(&RootSystem::a2(1.0).unwrap()).unwrap();
    let d2 = decompose(&g2, &Ball::new(vec![0.6, 0.25], 0.08));
    assert_eq!(d2.pieces(), 7);
    for i in 0..400 {
        let z = [-1.0 + 0.005 * i as f64, 0.8 - 0.004 * i as f64];
        let count = d2.near(&z) + d2.far(&z) + (1..=5).map(|j| d2.reflected(j, &z)).sum::<f64>();
        assert_eq!(count, 1.0);
    }
}

#[test]
fn sharp_maximal_ratios_are_finite() {
    let fx = shared_half();
    let g = generate_group(fx.measure.root_system()).unwrap();
    let b = |x: f64| (1.0 - (x - 0.3).abs()).max(0.0);
    let f = bump(0.0, 1.5);
    let family = BallFamily::custom(vec![vec![-1.0], vec![-0.5], vec![0.0], vec![0.5], vec![1.0]], vec![0.25, 0.5, 1.0]).unwrap();
    let opts = SharpOptions { s: 1.5, m: 3, bmo: 0.3 };
    let rows = sharp_maximal_diagnostic(
        &fx.setup, &fx.levels, &fx.measure, &g, &b, &f, &[-0.6, 0.1, 0.45], &family, &QuadratureSpec::gauss(16), &opts,
    )
    .unwrap();
    for r in &rows {
        assert!(r.ratio.is_finite() && r.ratio > 0.0, "{r:?}");
        assert!(r.partition_defect <= 1e-12);
    }
}

#[test]
fn tail_probe_respects_its_preconditions() {
    let fx = fixture(1.0, -42..=8);
    let b = LipschitzWitness::new(WitnessKind::Tent, vec![0.0], 1.0, 1.5, 1.5).unwrap();
    let f = bump(0.2, 1.0);
    let q = QuadratureSpec::gauss(16);
    let r = tail_bounds_probe(&fx.setup, &fx.levels, &fx.measure, &b, &f, 2.0, 1, &[0.5], &q);
    assert!(matches!(r, Err(Error::Precondition(_))));
    let samples = [-20.0, -5.0, -1.2, -0.3, 0.4, 1.0, 2.0, 7.5, 30.0];
    let report = tail_bounds_probe(&fx.setup, &fx.levels, &fx.measure, &b, &f, 2.0, 2, &samples, &q).unwrap();
    assert_eq!(report.bx_outside, 0.0);
    assert!(report.small_constant.is_finite() && report.by_constant.is_finite() && report.bx_constant.is_finite());
    let zero = LipschitzWitness::new(WitnessKind::Tent, vec![0.0], 0.0, 1.5, 1.5).unwrap();
    let report = tail_bounds_probe(&fx.setup, &fx.levels, &fx.measure, &zero, &f, 2.0, 2, &samples, &q).unwrap();
    assert!(report.rows.iter().all(|r| r.small == 0.0 && r.bx == 0.0 && r.by == 0.0));
}

#[test]
fn compactness_probe_localizes() {
    let fx = fixture(1.0, -2..=2);
    let b = lipschitz_family(1, 5, 1).remove(0);
    let basis: Vec<Box<dyn Fn(f64) -> f64>> = (0..4).map(|i| Box::new(bump(-0.6 + 0.4 * i as f64, 0.8)) as Box<dyn Fn(f64) -> f64>).collect();
    let refs: Vec<RealFn<'_>> = basis.iter().map(|f| f.as_ref()).collect();
    let opts = CompactnessOptions {
        m: 2,
        p: 2.0,
        delta_fractions: vec![0.05, 0.5, 2.0],
        prefixes: vec![2, 4],
        tail_levels: vec![],
        tail_reference: 0,
        holder_stride: 2,
    };
    let r = compactness_probe(&fx.setup, &fx.levels, &b, &refs, &opts).unwrap();
    assert_eq!(r.leakage, 0.0);
    assert_eq!(r.input_localization, 0.0);
    assert!(r.holder_modulus.is_finite() && r.uniform_bound > 0.0);
    for w in r.covering_numbers.windows(2) {
        for (a, b) in w[0].1.iter().zip(&w[1].1) {
            assert!(b.1 <= a.1);
        }
    }
    assert_eq!(r.covering_numbers.last().unwrap().1, vec![(2, 1), (4, 1)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commutator_is_bilinear(a in -2.0f64..2.0, c in -2.0f64..2.0, s1 in 0.2f64..1.5, s2 in 0.2f64..1.5, shift in -1.0f64..1.0) {
        let fx = shared_half();
        let b1 = move |x: f64| (s1 * x).sin();
        let b2 = move |x: f64| (1.0 - (x - shift).abs() / s2).max(0.0);
        let b12 = move |x: f64| a * b1(x) + c * b2(x);
        let f1 = bump(shift, 1.0);
        let f2 = bump(-0.5, 0.7);
        let f12 = |x: f64| a * f1(x) + c * f2(x);
        let run = |b: RealFn<'_>, f: RealFn<'_>| {
            let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b, p: 2.0, m: 3 };
            commutator_truncated(&cfg, f).unwrap().values
        };
        let (u1, u2, u12) = (run(&b1, &f1), run(&b2, &f1), run(&b12, &f1));
        let (v1, v2, v12) = (run(&b1, &f1), run(&b1, &f2), run(&b1, &f12));
        let scale = u1.iter().chain(&u2).chain(&v2).fold(1e-300f64, |m, v| m.max(v.abs()));
        for i in 0..u1.len() {
            prop_assert!((u12[i] - a * u1[i] - c * u2[i]).abs() <= 1e-10 * scale * (1.0 + a.abs() + c.abs()));
            prop_assert!((v12[i] - a * v1[i] - c * v2[i]).abs() <= 1e-10 * scale * (1.0 + a.abs() + c.abs()));
        }
    }

    #[test]
    fn constants_are_annihilated(v in -5.0f64..5.0, c in -1.0f64..1.0, r in 0.3f64..2.0) {
        let fx = shared_half();
        let b = move |_: f64| v;
        let f = bump(c, r);
        let cfg = CommutatorConfig { setup: &fx.setup, levels: &fx.levels, b: &b, p: 1.5, m: 3 };
        let out = commutator_truncated(&cfg, &f).unwrap();
        let fn_norm = fx.setup.output().lp_norm(&fx.setup.output().nodes().iter().map(|&x| f(x)).collect::<Vec<_>>(), 1.5);
        prop_assert!(out.lp_norm(1.5) < 1e-10 * fn_norm);
    }
}
