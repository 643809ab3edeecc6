use dunkl_core::geometry::RootSystem;
use dunkl_core::measure::WeightedMeasure;
use dunkl_core::spectral::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn bump(c: &[f64], r: f64) -> impl Fn(&[f64]) -> Complex64 + '_ {
    move |x: &[f64]| {
        let t2 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (r * r);
        Complex64::new(if t2 < 1.0 { (1.0 - t2).powi(8) } else { 0.0 }, 0.0)
    }
}

fn rank1(k: f64) -> SpectralContext {
    let m = WeightedMeasure::new(RootSystem::rank1(k).unwrap());
    SpectralContext::new(m, GridSpec::new(8.0, 0.5, 20), GridSpec::new(48.0, 2.0, 20)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn plancherel_and_inversion(k in prop::sample::select(vec![0.0, 0.5, 1.0, 1.5]), c in -1.5f64..1.5, r in 0.8f64..2.0) {
        let ctx = rank1(k);
        let f = ctx.sample(Some(c.abs() + r), bump(&[c], r));
        let ff = ctx.dunkl_transform(&f).unwrap();
        prop_assert!(!ff.aliased());
        prop_assert!((ff.l2_norm() / f.l2_norm() - 1.0).abs() < 1e-6);
        let back = ctx.inverse_transform(&ff).unwrap();
        prop_assert!(back.relative_l2_distance(&f).unwrap() < 1e-6);
    }

    #[test]
    fn translations_contract_and_stay_in_the_annulus(k in 0.2f64..1.5, x in -3.0f64..3.0, r in 0.8f64..1.6) {
        let ctx = rank1(k);
        let f = ctx.sample(Some(r), bump(&[0.0], r));
        let t = ctx.translate(&[x], &f, TranslationMethod::ProductFormula).unwrap();
        prop_assert!(t.l2_norm() <= f.l2_norm() * (1.0 + 1e-8));
        // tau_x f(-y) vanishes unless |x| - r <= |y| <= |x| + r
        let (lo, hi) = ((x.abs() - r).max(0.0), x.abs() + r);
        let (mut inside, mut outside) = (0.0, 0.0);
        for ((p, v), w) in t.points().zip(t.values()).zip(t.quad_weights()) {
            let a = p[0].abs();
            let mass = v.norm_sqr() * w;
            if a < lo - 1e-9 || a > hi + 1e-9 { outside += mass } else { inside += mass }
        }
        prop_assert!(outside <= 1e-6 * (inside + outside));
    }
}

#[test]
fn product_system_transform_round_trip() {
    let m = WeightedMeasure::new(RootSystem::product(&[1.0, 1.0]).unwrap());
    let ctx = SpectralContext::new(m, GridSpec::new(4.0, 0.5, 16), GridSpec::new(40.0, 2.5, 16)).unwrap();
    for (c, r) in [([0.3, -0.2], 1.5), ([-0.5, 0.6], 1.2)] {
        let f = ctx.sample(Some(2.0), bump(&c, r));
        let ff = ctx.dunkl_transform(&f).unwrap();
        assert!((ff.l2_norm() / f.l2_norm() - 1.0).abs() < 1e-6);
        assert!(ctx.inverse_transform(&ff).unwrap().relative_l2_distance(&f).unwrap() < 1e-6);
    }
}

#[test]
fn product_kernel_solves_the_defining_system() {
    let rs = RootSystem::product(&[1.0, 1.0]).unwrap();
    let kernel = DunklKernel::new(&rs).unwrap();
    let ys = [[0.7, -1.3], [2.0, 0.4], [-0.3, -2.5]];
    for y in ys {
        let yc = [Complex64::new(y[0], 0.0), Complex64::new(y[1], 0.0)];
        for xi in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
            let e = |x: &[f64]| kernel.eval(x, &yc);
            let grad = |x: &[f64]| kernel.gradient_x(x, &yc);
            let t = dunkl_operator(&rs, &xi, e, Some(grad)).unwrap();
            let lambda = xi[0] * y[0] + xi[1] * y[1];
            for x in [[0.4, 0.9], [-1.2, 0.3], [0.0, 1.1], [2.0, -0.7]] {
                let res = t(&x) - lambda * kernel.eval(&x, &yc);
                assert!(res.norm() < 1e-5 * (1.0 + kernel.eval(&x, &yc).norm()), "{x:?} {y:?} {res}");
            }
            for i in 0..2 {
                let single = dunkl_kernel(&RootSystem::rank1(1.0).unwrap(), &[0.8], &[yc[i]]).unwrap();
                let x = if i == 0 { [0.8, 0.0] } else { [0.0, 0.8] };
                let other = [Complex64::new(0.0, 0.0); 2];
                let mut only = other;
                only[i] = yc[i];
                assert!((kernel.eval(&x, &only) - single).norm() < 1e-12);
            }
        }
    }
}
