use super::{max_of, measure_of, rng};
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::function_spaces::{
    bmo_d_norm, bmo_norm, john_nirenberg_suite, lipschitz_family, BallFamily, FamilyPolicy, JohnNirenbergInequality,
    JohnNirenbergSample, LipschitzWitness, WitnessKind,
};
use dunkl_core::geometry::generate_group;
use dunkl_core::measure::QuadratureSpec;
use rand::Rng;
use rayon::prelude::*;

const SUITE: &str = "bmo";

const INEQUALITIES: [(JohnNirenbergInequality, &str); 4] = [
    (JohnNirenbergInequality::RadiusChange, "radius_change"),
    (JohnNirenbergInequality::NearbyCentres, "nearby_centres"),
    (JohnNirenbergInequality::Reflected, "reflected"),
    (JohnNirenbergInequality::JohnNirenberg, "john_nirenberg"),
];

struct WitnessResult {
    bmo: f64,
    bmo_d: f64,
    refinement_delta: f64,
    constants: Vec<Option<f64>>,
}

fn kind(w: &LipschitzWitness) -> &'static str {
    match w.kind {
        WitnessKind::Tent => "tent",
        WitnessKind::Bump => "bump",
        WitnessKind::Plateau => "plateau",
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let bc = &cfg.bmo;
    let mut report = SuiteReport::new(SUITE, f64::INFINITY);
    let label = bc.system.label();
    let m = measure_of(bc.system.resolve()?);
    let g = generate_group(m.root_system()).in_suite(SUITE)?;
    let dim = m.dimension();
    let q = QuadratureSpec::gauss(bc.resolution);
    let policy = FamilyPolicy {
        extent: bc.extent,
        pitch: bc.pitch,
        r0: bc.r0,
        j_min: bc.radius_exponents.0,
        j_max: bc.radius_exponents.1,
    };
    let family = BallFamily::lattice(dim, policy).in_suite(SUITE)?;
    let witnesses = lipschitz_family(dim, cfg.seed, bc.witnesses);
    let mut r = rng(cfg.seed, 500);
    let samples: Vec<JohnNirenbergSample> = (0..bc.john_nirenberg_samples)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect();
            let rad = r.gen_range(0.1..1.0);
            let y = x.iter().map(|c| c + r.gen_range(-1.0..1.0) * rad).collect();
            JohnNirenbergSample {
                x,
                y,
                r: rad,
                r1: rad * r.gen_range(1.0f64..16.0),
                sigma: r.gen_range(0..g.order()),
                j: r.gen_range(1..5),
                s: 1.5,
            }
        })
        .collect();
    let results: Vec<WitnessResult> = witnesses
        .par_iter()
        .map(|w| {
            let b = |x: &[f64]| w.eval(x);
            let rep = bmo_norm(&m, b, &family, bc.rounds, &q).in_suite(SUITE)?;
            let rep_d = bmo_d_norm(&g, &m, b, &family, bc.rounds, &q).in_suite(SUITE)?;
            let jn = john_nirenberg_suite(&m, &g, b, rep.norm_estimate, &samples, &q).in_suite(SUITE)?;
            Ok(WitnessResult {
                bmo: rep.norm_estimate,
                bmo_d: rep_d.norm_estimate,
                refinement_delta: rep.refinement_delta,
                constants: INEQUALITIES.iter().map(|(which, _)| jn.max_constant(*which)).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let r_max = family.max_radius() * 2f64.powi(bc.rounds as i32);
    let mut bmo = Table::new(
        "bmo.csv",
        &["system", "witness", "kind", "g_invariant", "l_b", "r_b", "bmo", "bmo_d", "refinement_delta", "lipschitz_bound"],
    );
    let mut jn = Table::new("john_nirenberg.csv", &["system", "witness", "inequality", "samples", "max_constant"]);
    for (i, (w, res)) in witnesses.iter().zip(&results).enumerate() {
        let bound = 2.0 * w.l_b * r_max;
        bmo.push(vec![
            label.clone(),
            int(i),
            kind(w).into(),
            w.g_invariant.to_string(),
            num(w.l_b),
            num(w.r_b),
            num(res.bmo),
            num(res.bmo_d),
            num(res.refinement_delta),
            num(bound),
        ]);
        report.gate(Gate::holds(
            &format!("witness{i}/bmo_positive_finite"),
            res.bmo.is_finite() && res.bmo > 0.0 && res.bmo_d.is_finite() && res.bmo_d > 0.0,
            format!("bmo {:.3e}, bmo_d {:.3e}", res.bmo, res.bmo_d),
        ));
        report.gate(Gate::at_most(&format!("witness{i}/lipschitz_bound"), res.bmo, bound));
        for ((_, name), c) in INEQUALITIES.iter().zip(&res.constants) {
            let rows = samples.len();
            jn.push(vec![label.clone(), int(i), (*name).into(), int(rows), c.map_or(String::new(), num)]);
            if let Some(c) = c {
                report.gate(Gate::finite(&format!("witness{i}/{name}"), *c));
            }
        }
    }
    report.constant("max_bmo", max_of(results.iter().map(|r| r.bmo)));
    report.constant("max_bmo_d", max_of(results.iter().map(|r| r.bmo_d)));
    report.tables.push(bmo);
    report.tables.push(jn);
    Ok(report)
}
