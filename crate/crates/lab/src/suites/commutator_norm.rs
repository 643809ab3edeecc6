use super::{max_of, rank1_setup, rng};
use crate::cache::SharedLevels;
use crate::config::ExperimentConfig;
use crate::error::{InSuite, Result};
use crate::families::{inputs, symbols, LineInput, LineSymbol};
use crate::report::{int, num, Gate, SuiteReport, Table};
use dunkl_core::commutator::{norm_cells, sharp_maximal_diagnostic, CellStatus, NamedFn, NormCell, SharpOptions, SharpRow, Symbol};
use dunkl_core::function_spaces::{bmo_norm, BallFamily, FamilyPolicy};
use dunkl_core::geometry::generate_group;
use dunkl_core::measure::{QuadratureSpec, WeightedMeasure};
use rand::Rng;
use rayon::prelude::*;
use std::time::Instant;

const SUITE: &str = "commutator-norm";

fn bmo_of(m: &WeightedMeasure, b: &LineSymbol, rounds: usize) -> Result<f64> {
    if let LineSymbol::Constant(_) = b {
        return Ok(0.0);
    }
    let family = BallFamily::lattice(1, FamilyPolicy::default()).in_suite(SUITE)?;
    Ok(bmo_norm(m, |x: &[f64]| b.eval(x[0]), &family, rounds, &QuadratureSpec::gauss(16)).in_suite(SUITE)?.norm_estimate)
}

struct Pair {
    b: LineSymbol,
    b_id: String,
    bmo: f64,
    f: LineInput,
    f_id: String,
}

fn pair_cells(setup: &dunkl_core::commutator::CommutatorSetup, cache: &SharedLevels<'_>, pair: &Pair, ps: &[f64], tol: f64) -> Vec<NormCell> {
    let b = |x: f64| pair.b.eval(x);
    let f = |x: f64| pair.f.eval(x);
    let sym = Symbol { id: pair.b_id.clone(), b: &b, bmo: pair.bmo };
    let named = NamedFn { id: pair.f_id.clone(), f: &f };
    norm_cells(setup, cache, &sym, &named, ps, tol)
}

fn sup_ratio(cells: &[NormCell]) -> f64 {
    max_of(cells.iter().filter(|c| c.status == CellStatus::Ok).map(|c| c.ratio))
}

struct KResult {
    k: f64,
    cells: Vec<(usize, NormCell)>,
    controls: Vec<NormCell>,
    sharp: Vec<SharpRow>,
    sharp_bmo: f64,
    sharp_s: f64,
}

fn run_k(cfg: &ExperimentConfig, k: f64, stream: u64) -> Result<KResult> {
    let cc = &cfg.commutator;
    let (m, setup) = rank1_setup(SUITE, k, &cc.kernel, &cc.grid)?;
    let cache = SharedLevels::new(&setup, 0);
    let count = 2 * cc.pairs;
    let bs = symbols(&cc.b_family, cfg.seed ^ stream, count)?;
    let fs = inputs(&cc.f_family, cfg.seed ^ (stream << 4), count, setup.input_radius())?;
    let bmos: Vec<f64> = bs.par_iter().map(|b| bmo_of(&m, b, cc.bmo_rounds)).collect::<Result<_>>()?;
    let pairs: Vec<Pair> = bs
        .into_iter()
        .zip(bmos)
        .zip(fs)
        .enumerate()
        .map(|(i, ((b, bmo), f))| Pair { b_id: b.id(i), b, bmo, f_id: f.id(i), f })
        .collect();
    let cells: Vec<(usize, NormCell)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| pair_cells(&setup, &cache, pair, &cc.p, cc.tolerance).into_iter().map(move |c| (i, c)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut r = rng(cfg.seed, stream + 1);
    let controls: Vec<NormCell> = pairs
        .iter()
        .enumerate()
        .flat_map(|(i, pair)| {
            let c = LineSymbol::Constant(r.gen_range(-2.0..2.0));
            let control = Pair { b_id: c.id(i), b: c, bmo: 0.0, f: pair.f, f_id: pair.f_id.clone() };
            pair_cells(&setup, &cache, &control, &cc.p, cc.tolerance)
        })
        .collect();

    // sharp maximal diagnostic on the first pair with a nonconstant symbol
    let (mut sharp, mut sharp_bmo) = (Vec::new(), 0.0);
    let started = Instant::now();
    if let Some(pair) = pairs.iter().find(|p| p.bmo > 0.0) {
        let g = generate_group(m.root_system()).in_suite(SUITE)?;
        let centers: Vec<Vec<f64>> = (-7..=7).map(|i| vec![0.5 * i as f64]).collect();
        let family = BallFamily::custom(centers, vec![0.25, 0.5, 1.0, 2.0]).in_suite(SUITE)?;
        let xs: Vec<f64> = (0..cc.sharp_samples).map(|_| r.gen_range(-3.0..3.0)).collect();
        let opts = SharpOptions { s: 0.5 * (1.0 + cc.sharp_p), m: cc.sharp_level, bmo: pair.bmo };
        let q = QuadratureSpec::gauss(16);
        let chunks: Vec<Vec<SharpRow>> = xs
            .par_chunks(xs.len().div_ceil(8).max(1))
            .map(|xs| {
                let b = |x: f64| pair.b.eval(x);
                let f = |x: f64| pair.f.eval(x);
                sharp_maximal_diagnostic(&setup, &cache, &m, &g, &b, &f, xs, &family, &q, &opts).in_suite(SUITE)
            })
            .collect::<Result<_>>()?;
        sharp = chunks.into_iter().flatten().collect();
        sharp_bmo = pair.bmo;
    }
    Ok(KResult { k, cells, controls, sharp, sharp_bmo, sharp_s: started.elapsed().as_secs_f64() })
}

fn status(s: &CellStatus) -> String {
    match s {
        CellStatus::Ok => "ok".into(),
        CellStatus::Degenerate => "degenerate".into(),
        CellStatus::Failed(e) => format!("failed: {e}"),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let cc = &cfg.commutator;
    let mut report = SuiteReport::new(SUITE, cc.time_budget_s);
    let results: Vec<KResult> =
        cc.multiplicities.iter().enumerate().map(|(i, &k)| run_k(cfg, k, 600 + 16 * i as u64)).collect::<Result<_>>()?;

    let mut table = Table::new(
        "commutator_norm.csv",
        &["k", "b_id", "f_id", "p", "m_star", "commutator_norm", "f_norm", "bmo", "ratio", "status"],
    );
    let mut sharp = Table::new(
        "sharp_maximal.csv",
        &["k", "x", "lhs", "rhs", "ratio", "ball_center", "ball_radius", "partition_defect", "s", "m", "bmo"],
    );
    for res in &results {
        let k = res.k;
        for c in res.cells.iter().map(|(_, c)| c).chain(&res.controls) {
            table.push(vec![
                num(k),
                c.b_id.clone(),
                c.f_id.clone(),
                num(c.p),
                c.m_star.map_or(String::new(), int),
                num(c.commutator_norm),
                num(c.f_norm),
                num(c.bmo),
                num(c.ratio),
                status(&c.status),
            ]);
        }
        let first: Vec<NormCell> = res.cells.iter().filter(|(i, _)| *i < cc.pairs).map(|(_, c)| c.clone()).collect();
        let all: Vec<NormCell> = res.cells.iter().map(|(_, c)| c.clone()).collect();
        let (half, full) = (sup_ratio(&first), sup_ratio(&all));
        let growth = if full == 0.0 { 0.0 } else { full / half - 1.0 };
        report.constant(format!("k={k}/sup_ratio_{}", cc.pairs), half);
        report.constant(format!("k={k}/sup_ratio_{}", 2 * cc.pairs), full);
        report.constant(format!("k={k}/family_growth"), growth);
        report.constant(format!("k={k}/max_m_star"), max_of(all.iter().filter_map(|c| c.m_star).map(f64::from)));
        report.gate(Gate::finite(&format!("k={k}/sup_ratio"), full));
        report.gate(Gate::below(&format!("k={k}/family_growth"), growth, cc.growth_bound));
        let failed = all.iter().chain(&res.controls).filter(|c| matches!(c.status, CellStatus::Failed(_))).count();
        report.gate(Gate::holds(&format!("k={k}/cells_converged"), failed == 0, format!("{failed} cells failed to converge")));
        let constant_gap = max_of(res.controls.iter().map(|c| c.commutator_norm / c.f_norm));
        let degenerate = res.controls.iter().all(|c| c.status == CellStatus::Degenerate);
        report.constant(format!("k={k}/constant_symbol_output"), constant_gap);
        report.gate(Gate::below(&format!("k={k}/constant_symbols_vanish"), constant_gap, cc.constant_tolerance));
        report.gate(Gate::holds(&format!("k={k}/constant_symbols_degenerate"), degenerate, "constant-symbol cells flagged degenerate"));

        for row in &res.sharp {
            sharp.push(vec![
                num(k),
                num(row.x),
                num(row.lhs),
                num(row.rhs),
                num(row.ratio),
                num(row.ball.center[0]),
                num(row.ball.radius),
                num(row.partition_defect),
                num(0.5 * (1.0 + cc.sharp_p)),
                int(cc.sharp_level),
                num(res.sharp_bmo),
            ]);
        }
        if !res.sharp.is_empty() {
            let defect = max_of(res.sharp.iter().map(|r| r.partition_defect));
            let ratio = max_of(res.sharp.iter().map(|r| r.ratio));
            report.constant(format!("k={k}/sharp_max_ratio"), ratio);
            report.gate(Gate::at_most(&format!("k={k}/partition_identity"), defect, 1e-12));
            report.gate(Gate::finite(&format!("k={k}/sharp_ratio"), ratio));
            report.gate(Gate::holds(
                &format!("k={k}/sharp_samples"),
                res.sharp.len() == cc.sharp_samples,
                format!("{} sample points", res.sharp.len()),
            ));
        }
    }
    let sharp_s: f64 = results.iter().map(|r| r.sharp_s).sum();
    report.constant("sharp_runtime_s", sharp_s);
    report.gate(Gate::below("sharp_runtime_s", sharp_s, cc.sharp_time_budget_s));
    report.tables.push(table);
    report.tables.push(sharp);
    Ok(report)
}
