//! Truncated commutators on the line,
//!
//! `C_m f(x) = sum_{|l| <= m} int (b(x) - b(y)) K_l(x, y) f(y) dw(y)`,
//!
//! their `L^{p0}` limits, the norm harness and the diagnostics built on them.
//!
//! Every computation runs on the level tables of a [`CommutatorSetup`]: for
//! each output node `x` and level `l`, quadrature nodes `y` adapted to
//! `supp K_l(x, .)` with weights `K_l(x, y) dw(y)`.

mod apply;
mod diagnostics;
mod grid;
mod tables;

pub use apply::{direct_operator_at, operator_apply};
pub use diagnostics::{
    cauchy_tail, compactness_probe, covering_number, decompose, regression_slope, sharp_maximal_diagnostic, tail_bounds_probe, CompactnessOptions,
    CompactnessReport, Decomposition, SharpOptions, SharpRow, TailBoundReport, TailRow,
};
pub use grid::{PanelGrid, PanelLayout};
pub use tables::{CommutatorSetup, LazyLevels, LevelSource, LevelTable, PrebuiltLevels, TableLayout};

use crate::error::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub type RealFn<'a> = &'a dyn Fn(f64) -> f64;

#[derive(Clone, Copy)]
pub struct CommutatorConfig<'a> {
    pub setup: &'a CommutatorSetup,
    pub levels: &'a dyn LevelSource,
    pub b: RealFn<'a>,
    pub p: f64,
    pub m: u32,
}

impl CommutatorConfig<'_> {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument("p must lie in (1, inf)".into()));
        }
        Ok(())
    }
}

/// Values on the output grid of a setup.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFunction {
    pub grid: Arc<PanelGrid>,
    pub values: Vec<f64>,
}

impl OutputFunction {
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.grid.lp_norm(&self.values, p)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `sum_j kw_j (b(x_i) - b(y_j)) f(y_j)` for every output node.
pub fn level_contribution(setup: &CommutatorSetup, table: &LevelTable, b: RealFn<'_>, f: RealFn<'_>) -> Vec<f64> {
    let nodes = setup.output().nodes();
    (0..table.rows())
        .map(|i| {
            let (ys, kw) = table.row(i);
            if ys.is_empty() {
                return 0.0;
            }
            let bx = b(nodes[i]);
            ys.iter().zip(kw).map(|(&y, &w)| w * (bx - b(y)) * f(y)).sum()
        })
        .collect()
}

/// `sum_j kw_j g(y_j)`: level `l` of the singular integral applied to `g`.
pub fn operator_level(table: &LevelTable, g: RealFn<'_>) -> Vec<f64> {
    (0..table.rows())
        .map(|i| {
            let (ys, kw) = table.row(i);
            ys.iter().zip(kw).map(|(&y, &w)| w * g(y)).sum()
        })
        .collect()
}

pub fn commutator_truncated(cfg: &CommutatorConfig<'_>, f: RealFn<'_>) -> Result<OutputFunction> {
    cfg.validate()?;
    let mut series = CommutatorSeries::new(cfg.setup, cfg.levels, cfg.b, f);
    series.partial_sum(cfg.m)
}

/// `T_m g = sum_{|l| <= m} K_l * g` on the output grid.
pub fn operator_truncated(setup: &CommutatorSetup, levels: &dyn LevelSource, g: RealFn<'_>, m: u32) -> Result<OutputFunction> {
    let mut values = vec![0.0; setup.output().len()];
    let m = m as i32;
    for l in -m..=m {
        for (v, c) in values.iter_mut().zip(operator_level(&*levels.level(l)?, g)) {
            *v += c;
        }
    }
    Ok(OutputFunction { grid: setup.output().clone(), values })
}

/// Per-level contributions for one `(b, f)` pair, computed on demand.
pub struct CommutatorSeries<'a> {
    setup: &'a CommutatorSetup,
    levels: &'a dyn LevelSource,
    b: RealFn<'a>,
    f: RealFn<'a>,
    contributions: BTreeMap<i32, Vec<f64>>,
}

impl<'a> CommutatorSeries<'a> {
    pub fn new(setup: &'a CommutatorSetup, levels: &'a dyn LevelSource, b: RealFn<'a>, f: RealFn<'a>) -> Self {
        Self { setup, levels, b, f, contributions: BTreeMap::new() }
    }

    pub fn setup(&self) -> &CommutatorSetup {
        self.setup
    }

    pub fn level(&mut self, l: i32) -> Result<&[f64]> {
        if !self.contributions.contains_key(&l) {
            let table = self.levels.level(l)?;
            let c = level_contribution(self.setup, &table, self.b, self.f);
            self.contributions.insert(l, c);
        }
        Ok(&self.contributions[&l])
    }

    fn accumulate(&mut self, levels: impl Iterator<Item = i32>) -> Result<OutputFunction> {
        let mut values = vec![0.0; self.setup.output().len()];
        for l in levels {
            for (v, c) in values.iter_mut().zip(self.level(l)?) {
                *v += c;
            }
        }
        Ok(OutputFunction { grid: self.setup.output().clone(), values })
    }

    pub fn partial_sum(&mut self, m: u32) -> Result<OutputFunction> {
        let m = m as i32;
        self.accumulate(-m..=m)
    }

    /// `C_{hi} f - C_{lo} f`.
    pub fn band(&mut self, lo: u32, hi: u32) -> Result<OutputFunction> {
        let (lo, hi) = (lo as i32, hi as i32);
        self.accumulate((-hi..-lo).chain(lo + 1..=hi))
    }

    /// Sum over `-hi <= l < -lo`.
    pub fn small_band(&mut self, lo: u32, hi: u32) -> Result<OutputFunction> {
        self.accumulate(-(hi as i32)..-(lo as i32))
    }

    /// Sum over `lo < l <= hi`.
    pub fn large_band(&mut self, lo: u32, hi: u32) -> Result<OutputFunction> {
        self.accumulate(lo as i32 + 1..=hi as i32)
    }

    /// Adds levels until the relative Cauchy differences in `L^{p0}` stay
    /// below `tolerance` for two consecutive steps.
    pub fn limit(&mut self, opts: &LimitOptions) -> Result<Convergence> {
        opts.validate()?;
        let cap = opts.cap.min(self.setup.max_level().max(0) as u32);
        let mut sum = self.partial_sum(0)?.values;
        let grid = self.setup.output().clone();
        let mut norms = vec![grid.lp_norm(&sum, opts.p0)];
        let mut differences = Vec::new();
        let small = |d: f64, n: f64| d == 0.0 || d < opts.tolerance * n;
        for m in 1..=cap {
            let l = m as i32;
            let step: Vec<f64> = {
                let hi = self.level(l)?.to_vec();
                let lo = self.level(-l)?;
                hi.iter().zip(lo).map(|(a, b)| a + b).collect()
            };
            differences.push(grid.lp_norm(&step, opts.p0));
            sum.iter_mut().zip(&step).for_each(|(s, d)| *s += d);
            norms.push(grid.lp_norm(&sum, opts.p0));
            let n = differences.len();
            if n >= 2 && small(differences[n - 2], norms[n - 2]) && small(differences[n - 1], norms[n - 1]) {
                let m_star = m - 2;
                return Ok(Convergence { m_star, p0: opts.p0, differences, norms });
            }
        }
        Err(Error::NotConverged { diffs: differences })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub p0: f64,
    pub tolerance: f64,
    pub cap: u32,
}

impl LimitOptions {
    /// `p0 = (1 + p) / 2`, relative tolerance `1e-4`.
    pub fn for_exponent(p: f64) -> Self {
        Self { p0: 0.5 * (1.0 + p), tolerance: 1e-4, cap: 46 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p0 > 1.0 && self.p0.is_finite()) || !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("limit needs p0 > 1 and a positive tolerance".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub m_star: u32,
    pub p0: f64,
    /// `|C_m f - C_{m-1} f|_{p0}` for `m = 1, 2, ...`.
    pub differences: Vec<f64>,
    /// `|C_m f|_{p0}` for `m = 0, 1, ...`.
    pub norms: Vec<f64>,
}

/// `C_{m*} f` and its convergence record.
pub fn commutator_limit(cfg: &CommutatorConfig<'_>, f: RealFn<'_>, opts: &LimitOptions) -> Result<(OutputFunction, Convergence)> {
    cfg.validate()?;
    if !(opts.p0 < cfg.p) {
        return Err(Error::InvalidArgument("p0 must be smaller than p".into()));
    }
    let mut series = CommutatorSeries::new(cfg.setup, cfg.levels, cfg.b, f);
    let conv = series.limit(opts)?;
    Ok((series.partial_sum(conv.m_star)?, conv))
}

pub struct NamedFn<'a> {
    pub id: String,
    pub f: RealFn<'a>,
}

pub struct Symbol<'a> {
    pub id: String,
    pub b: RealFn<'a>,
    /// BMO norm estimate of `b`.
    pub bmo: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Constant symbol: the ratio is `0/0` and the cell is skipped.
    Degenerate,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormCell {
    pub b_id: String,
    pub f_id: String,
    pub p: f64,
    pub m_star: Option<u32>,
    pub commutator_norm: f64,
    pub f_norm: f64,
    pub bmo: f64,
    pub ratio: f64,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    /// Largest `|C f|_p / |f|_p` over the evaluated cells.
    pub measured_norm: f64,
    /// Largest `|C f|_p / (|b|_BMO |f|_p)`.
    pub bmo_ratio: f64,
    pub family: String,
    pub cells: Vec<NormCell>,
}

impl NormEstimate {
    pub fn from_cells(family: String, cells: Vec<NormCell>) -> Self {
        let ok = cells.iter().filter(|c| c.status == CellStatus::Ok);
        let measured_norm = ok.clone().map(|c| c.commutator_norm / c.f_norm).fold(0.0, f64::max);
        let bmo_ratio = ok.map(|c| c.ratio).fold(0.0, f64::max);
        Self { measured_norm, bmo_ratio, family, cells }
    }
}

/// The cells for one `(b, f)` pair at every exponent in `ps`, sharing the
/// level contributions.
pub fn norm_cells(
    setup: &CommutatorSetup,
    levels: &dyn LevelSource,
    b: &Symbol<'_>,
    f: &NamedFn<'_>,
    ps: &[f64],
    tolerance: f64,
) -> Vec<NormCell> {
    let mut series = CommutatorSeries::new(setup, levels, b.b, f.f);
    let grid = setup.output();
    let f_values: Vec<f64> = grid.nodes().iter().map(|&x| (f.f)(x)).collect();
    ps.iter()
        .map(|&p| {
            let f_norm = grid.lp_norm(&f_values, p);
            let mut cell = NormCell {
                b_id: b.id.clone(),
                f_id: f.id.clone(),
                p,
                m_star: None,
                commutator_norm: 0.0,
                f_norm,
                bmo: b.bmo,
                ratio: 0.0,
                status: CellStatus::Ok,
            };
            let opts = LimitOptions { tolerance, ..LimitOptions::for_exponent(p) };
            match series.limit(&opts).and_then(|c| Ok((c.m_star, series.partial_sum(c.m_star)?))) {
                Ok((m_star, out)) => {
                    cell.m_star = Some(m_star);
                    cell.commutator_norm = out.lp_norm(p);
                    if b.bmo <= 1e-12 {
                        cell.status = CellStatus::Degenerate;
                    } else {
                        cell.ratio = cell.commutator_norm / (b.bmo * f_norm);
                    }
                }
                Err(e) => cell.status = CellStatus::Failed(alloc::format!("{e}")),
            }
            cell
        })
        .collect()
}

/// Tabulates `|C_{m*} f|_p / (|b|_BMO |f|_p)` over the product of the families.
pub fn estimate_operator_norm(
    setup: &CommutatorSetup,
    levels: &dyn LevelSource,
    b_family: &[Symbol<'_>],
    f_family: &[NamedFn<'_>],
    ps: &[f64],
    tolerance: f64,
) -> Result<NormEstimate> {
    if b_family.is_empty() || f_family.is_empty() || ps.is_empty() {
        return Err(Error::InvalidArgument("norm harness needs nonempty families".into()));
    }
    let mut cells = Vec::new();
    for b in b_family {
        for f in f_family {
            cells.extend(norm_cells(setup, levels, b, f, ps, tolerance));
        }
    }
    let family = alloc::format!("{} symbols x {} functions", b_family.len(), f_family.len());
    Ok(NormEstimate::from_cells(family, cells))
}
