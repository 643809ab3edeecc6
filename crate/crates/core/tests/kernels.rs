use dunkl_core::geometry::{generate_group, RootSystem};
use dunkl_core::kernels::*;
use dunkl_core::measure::{QuadratureSpec, WeightedMeasure};
use dunkl_core::spectral::ProductTranslation;

fn setup(ks: &[f64]) -> (WeightedMeasure, ProductTranslation) {
    let rs = if ks.len() == 1 { RootSystem::rank1(ks[0]) } else { RootSystem::product(ks) };
    (WeightedMeasure::new(rs.unwrap()), kernel_translation(ks))
}

#[test]
fn dyadic_constants_are_level_stable() {
    for ks in [vec![0.5], vec![1.0], vec![1.0, 1.0]] {
        let (m, pt) = setup(&ks);
        let kernel = builtin_riesz_kernel(&m, 0).unwrap();
        let q = QuadratureSpec::gauss(16);
        let base = unit_samples(ks.len(), 12, 3);
        let reports: Vec<_> = (-8..=8)
            .map(|l| {
                let s: Vec<_> = base.iter().map(|s| s.scaled(libm::ldexp(1.0, l))).collect();
                check_dyadic_estimates(&pt, &m, &dyadic_piece(&kernel, l), &s, &q).unwrap()
            })
            .collect();
        for w in reports.windows(2) {
            let change = (w[1].size_constant / w[0].size_constant - 1.0).abs();
            assert!(change < 0.25, "{ks:?} {w:?}");
        }
        assert!(level_stability(reports.iter().map(|r| r.size_constant)) < 10.0);
        assert!(level_stability(reports.iter().map(|r| r.holder_constant)) < 10.0);
    }
}

#[test]
fn kernel_sum_tail_converges() {
    for ks in [vec![0.5], vec![1.0, 1.0]] {
        let (m, pt) = setup(&ks);
        let g = generate_group(m.root_system()).unwrap();
        let kernel = builtin_riesz_kernel(&m, 0).unwrap();
        let q = QuadratureSpec::gauss(16);
        let (x, y): (Vec<f64>, Vec<f64>) = if ks.len() == 1 { (vec![0.4], vec![1.45]) } else { (vec![0.4, 0.2], vec![1.3, -0.7]) };
        let a = kernel_sum(&pt, &g, &m, &kernel, &x, &y, None, -8..=8, &q).unwrap();
        let b = kernel_sum(&pt, &g, &m, &kernel, &x, &y, None, -10..=10, &q).unwrap();
        let rel = (a.value - b.value).norm() / b.value.norm();
        assert!(rel < 1e-6);
    }
}
