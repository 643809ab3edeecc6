use approx::assert_relative_eq;
use dunkl_core::function_spaces::*;
use dunkl_core::geometry::*;
use dunkl_core::measure::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn systems() -> Vec<RootSystem> {
    vec![
        RootSystem::rank1(0.7).unwrap(),
        RootSystem::product(&[0.5, 1.0]).unwrap(),
        RootSystem::a2(1.0).unwrap(),
        RootSystem::b2(0.5, 1.5).unwrap(),
    ]
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflections_are_involutions(alpha in point(3), x in point(3)) {
        prop_assume!(alpha.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let back = reflect(&alpha, &reflect(&alpha, &x));
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_distance_and_weight_are_invariant(which in 0usize..4, x in point(2), y in point(2), s in 0usize..8) {
        let rs = &systems()[which];
        let (x, y) = if rs.dimension() == 1 { (x[..1].to_vec(), y[..1].to_vec()) } else { (x, y) };
        let g = generate_group(rs).unwrap();
        let m = WeightedMeasure::new(rs.clone());
        let sx = g.apply(s % g.order(), &x);
        prop_assert!((g.orbit_distance(&sx, &y) - g.orbit_distance(&x, &y)).abs() < 1e-12);
        let (w, ws) = (m.weight(&x), m.weight(&sx));
        prop_assert!((w - ws).abs() <= 1e-10 * w.max(1e-300));
    }

    #[test]
    fn weight_is_homogeneous(which in 0usize..4, x in point(2), t in 0.1f64..10.0) {
        let rs = &systems()[which];
        let x = if rs.dimension() == 1 { x[..1].to_vec() } else { x };
        let m = WeightedMeasure::new(rs.clone());
        prop_assume!(!chamber_of(rs, &x).on_wall() && m.weight(&x) > 1e-200);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let expected = t.powf(m.homogeneous_dimension() - rs.dimension() as f64) * m.weight(&x);
        prop_assert!((m.weight(&tx) - expected).abs() < 1e-12 * m.weight(&tx));
    }

    #[test]
    fn same_chamber_distance_is_euclidean(which in 0usize..4, x in point(2), y in point(2)) {
        let rs = &systems()[which];
        let (x, y) = if rs.dimension() == 1 { (x[..1].to_vec(), y[..1].to_vec()) } else { (x, y) };
        let g = generate_group(rs).unwrap();
        let c = chamber_of(rs, &x);
        prop_assume!(c.contains(&y));
        let e = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!((g.orbit_distance(&x, &y) - e).abs() < 1e-12);
    }

    #[test]
    fn rank1_volume_scales(k in 0.0f64..2.0, x in -3.0f64..3.0, r in 0.05f64..4.0, t in 0.2f64..5.0) {
        let m = WeightedMeasure::new(RootSystem::rank1(k).unwrap());
        let q = QuadratureSpec::gauss(64);
        let v = ball_volume(&m, &[x], r, &q).unwrap();
        let vt = ball_volume(&m, &[t * x], t * r, &q).unwrap();
        prop_assert!((vt - t.powf(m.homogeneous_dimension()) * v).abs() < 1e-10 * vt);
    }

    #[test]
    fn bmo_ignores_constants_and_scales(c in -3.0f64..3.0, a in 0.2f64..4.0) {
        let m = WeightedMeasure::new(RootSystem::rank1(1.0).unwrap());
        let q = QuadratureSpec::gauss(16);
        let fam = BallFamily::custom(vec![vec![-0.5], vec![0.25], vec![1.0]], vec![0.25, 0.5, 1.0]).unwrap();
        let b = |x: &[f64]| (2.0 * x[0]).sin() + 0.3 * x[0] * x[0];
        let base = bmo_norm(&m, b, &fam, 0, &q).unwrap().norm_estimate;
        let shifted = bmo_norm(&m, |x: &[f64]| b(x) + c, &fam, 0, &q).unwrap().norm_estimate;
        let scaled = bmo_norm(&m, |x: &[f64]| a * b(x), &fam, 0, &q).unwrap().norm_estimate;
        prop_assert!((shifted - base).abs() <= 1e-10 * base);
        prop_assert!((scaled - a * base).abs() <= 1e-10 * a * base);
    }
}

#[test]
fn groups_close_under_composition() {
    for (rs, order) in systems().into_iter().zip([2, 4, 6, 8]) {
        let g = generate_group(&rs).unwrap();
        assert_eq!(g.order(), order);
        assert!(g.is_closed());
        for a in 0..g.order() {
            for b in 0..g.order() {
                assert!(g.find(&g.compose(a, b)).is_some());
            }
        }
    }
}

#[test]
fn planar_scaling_law_at_resolution_64() {
    let m = WeightedMeasure::new(RootSystem::product(&[1.0, 0.5]).unwrap());
    let q = QuadratureSpec::gauss(64);
    for (x, r, t) in [(vec![0.3, -0.2], 0.5, 2.0), (vec![1.0, 1.0], 0.25, 3.0), (vec![0.0, 0.0], 1.0, 0.5)] {
        let v = ball_volume(&m, &x, r, &q).unwrap();
        let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
        let vt = ball_volume(&m, &tx, t * r, &q).unwrap();
        assert_relative_eq!(vt, t.powf(m.homogeneous_dimension()) * v, max_relative = 1e-6);
    }
}

#[test]
fn integrals_are_reflection_invariant() {
    let rs = RootSystem::a2(0.5).unwrap();
    let g = generate_group(&rs).unwrap();
    let m = WeightedMeasure::new(rs);
    let q = QuadratureSpec::gauss(48);
    let region = Region::ball(vec![0.0, 0.0], 1.5);
    let f = |x: &[f64]| Complex64::new((x[0] + 0.4 * x[1]).exp() * (1.0 + x[1] * x[1]), 0.0);
    let base = integrate(&m, f, &region, &q).unwrap().re;
    for s in 0..g.order() {
        let v = integrate(&m, |x: &[f64]| f(&g.apply(s, x)), &region, &q).unwrap().re;
        assert_relative_eq!(v, base, max_relative = 1e-8);
    }
}

#[test]
fn unit_multiplicity_ball_volume() {
    let m = WeightedMeasure::new(RootSystem::rank1(1.0).unwrap());
    for r in [0.1, 1.0, 2.5] {
        let v = ball_volume(&m, &[0.0], r, &QuadratureSpec::gauss(32)).unwrap();
        assert_relative_eq!(v, 4.0 / 3.0 * r * r * r, max_relative = 1e-8);
    }
}

#[test]
fn witnesses_respect_the_lipschitz_bmo_bound() {
    let m = WeightedMeasure::new(RootSystem::rank1(0.5).unwrap());
    let q = QuadratureSpec::gauss(16);
    let fam = BallFamily::custom((-6..=6).map(|i| vec![0.25 * i as f64]).collect(), vec![0.125, 0.25, 0.5, 1.0]).unwrap();
    let family = lipschitz_family(1, 11, 6);
    assert_eq!(family.len(), 6);
    assert!(family.iter().any(|w| w.g_invariant) && family.iter().any(|w| !w.g_invariant));
    for w in &family {
        let est = bmo_norm(&m, |x: &[f64]| w.eval(x), &fam, 0, &q).unwrap().norm_estimate;
        assert!(est <= 2.0 * w.l_b * fam.max_radius(), "{w:?} {est}");
        assert_relative_eq!(w.scaled(2.0).l_b, 2.0 * w.l_b);
    }
}

#[test]
fn maximal_function_grows_with_the_family() {
    let m = WeightedMeasure::new(RootSystem::product(&[1.0, 1.0]).unwrap());
    let q = QuadratureSpec::gauss(12);
    let small = BallFamily::custom(vec![vec![0.0, 0.0], vec![0.5, 0.5]], vec![0.5, 1.0]).unwrap();
    let large = BallFamily::custom(vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 0.0]], vec![0.25, 0.5, 1.0, 2.0]).unwrap();
    let f = |x: &[f64]| Complex64::new((-(x[0] - 0.3).powi(2) - x[1] * x[1]).exp(), 0.0);
    for x in [[0.1, 0.1], [0.4, 0.6], [0.9, -0.1]] {
        let a = maximal_function(&m, f, &x, &small, &q).unwrap();
        let b = maximal_function(&m, f, &x, &large, &q).unwrap();
        assert!(b >= a);
    }
}
