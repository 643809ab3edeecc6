use super::grid::{PanelGrid, PanelLayout};
use crate::error::{Error, Result};
use crate::kernels::{dyadic_piece, DyadicKernel, KernelSpec};
use crate::measure::WeightedMeasure;
use crate::quadrature::GaussLegendre;
use crate::spectral::{axis_density, ProductFormula, TranslationNode};
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableLayout {
    pub output: PanelLayout,
    /// Inputs are supported in `[-input_radius, input_radius]`.
    pub input_radius: f64,
    /// The `y` quadrature is split at multiples of this width.
    pub input_panel: f64,
    pub piece_nodes: usize,
    pub translation_step: f64,
    pub translation_nodes: usize,
}

impl Default for TableLayout {
    fn default() -> Self {
        Self {
            output: PanelLayout::default(),
            input_radius: 4.0,
            input_panel: 0.5,
            piece_nodes: 10,
            translation_step: 1.0 / 8.0,
            translation_nodes: 16,
        }
    }
}

/// Rank-one discretization shared by every commutator computation: the output
/// grid and the rule producing, for each output node `x` and level `l`, the
/// nodes `y` and weights `K_l(x, y) dw(y)`.
#[derive(Debug, Clone)]
pub struct CommutatorSetup {
    kernel: KernelSpec,
    k: f64,
    layout: TableLayout,
    output: Arc<PanelGrid>,
    translation: ProductFormula,
    pieces: GaussLegendre,
    max_level: i32,
}

impl CommutatorSetup {
    pub fn new(measure: &WeightedMeasure, kernel: KernelSpec, layout: TableLayout) -> Result<Self> {
        let ks = measure.root_system().axis_multiplicities();
        let k = match ks.as_deref() {
            Some([k]) => *k,
            _ => return Err(Error::InvalidArgument("commutator tables support rank-one systems only".into())),
        };
        if !(layout.input_radius > 0.0 && layout.input_panel > 0.0) || layout.piece_nodes < 2 {
            return Err(Error::InvalidArgument("invalid input layout".into()));
        }
        let output = Arc::new(PanelGrid::new(layout.output, k)?);
        let spare = output.outer_radius() - layout.input_radius;
        if !(spare > 1.0) {
            return Err(Error::InvalidArgument("output grid must extend past the input support".into()));
        }
        let max_level = libm::floor(libm::log2(spare)) as i32;
        Ok(Self {
            kernel,
            k,
            layout,
            output,
            translation: ProductFormula::new(k, layout.translation_step, layout.translation_nodes),
            pieces: GaussLegendre::new(layout.piece_nodes),
            max_level,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn multiplicity(&self) -> f64 {
        self.k
    }

    pub fn homogeneous_dimension(&self) -> f64 {
        1.0 + 2.0 * self.k
    }

    pub fn layout(&self) -> &TableLayout {
        &self.layout
    }

    pub fn input_radius(&self) -> f64 {
        self.layout.input_radius
    }

    pub fn output(&self) -> &Arc<PanelGrid> {
        &self.output
    }

    /// Largest level whose contributions stay inside the output grid.
    pub fn max_level(&self) -> i32 {
        self.max_level
    }

    /// `K_l(x, y)` by the product formula restricted to the support of `K_l`.
    pub fn two_point(&self, dk: &DyadicKernel, x: f64, y: f64, buf: &mut Vec<TranslationNode>) -> f64 {
        let t = dk.scale();
        self.translation.nodes_in(x, -y, &dk.breakpoints(), (0.25 * t, t), buf);
        let mut acc = 0.0;
        for n in buf.iter() {
            if n.a <= 0.25 * t || n.a >= t {
                continue;
            }
            if n.plus != 0.0 {
                acc += dk.eval(&[n.a]).re * n.plus;
            }
            if n.minus != 0.0 {
                acc += dk.eval(&[-n.a]).re * n.minus;
            }
        }
        acc
    }

    /// Nodes `y` and weights `K_l(x, y) dw(y)` covering `supp K_l(x, .)`
    /// within the input support.
    pub fn row(&self, dk: &DyadicKernel, x: f64, out: &mut Vec<(f64, f64)>, buf: &mut Vec<TranslationNode>) {
        out.clear();
        let t = dk.scale();
        let ax = x.abs();
        let r = self.layout.input_radius;
        let lo = (ax - t).max(0.25 * t - ax).max(0.0);
        let hi = (ax + t).min(r);
        if !(hi > lo) {
            return;
        }
        let mut cuts: Vec<f64> = Vec::with_capacity(32);
        cuts.push(lo);
        cuts.push(hi);
        for j in -4..=4 {
            cuts.push(ax + 0.25 * t * j as f64);
        }
        for j in 1..=4 {
            cuts.push(0.25 * t * j as f64 - ax);
        }
        let pw = self.layout.input_panel;
        let first = libm::ceil(lo / pw) as i64;
        let last = libm::floor(hi / pw) as i64;
        for j in first..=last {
            cuts.push(j as f64 * pw);
        }
        cuts.retain(|&c| c >= lo && c <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * hi);
        for w in cuts.windows(2) {
            for (s, gw) in self.pieces.mapped(w[0], w[1]) {
                let dens = gw * axis_density(self.k, s);
                for y in [s, -s] {
                    let kv = self.two_point(dk, x, y, buf);
                    if kv != 0.0 {
                        out.push((y, kv * dens));
                    }
                }
            }
        }
    }

    pub fn build_level(&self, level: i32) -> Result<LevelTable> {
        self.check_level(level)?;
        let dk = dyadic_piece(&self.kernel, level);
        let mut offsets = Vec::with_capacity(self.output.len() + 1);
        let (mut ys, mut kw) = (Vec::new(), Vec::new());
        let (mut row, mut buf) = (Vec::new(), Vec::new());
        offsets.push(0u32);
        for &x in self.output.nodes() {
            self.row(&dk, x, &mut row, &mut buf);
            for &(y, v) in &row {
                ys.push(y);
                kw.push(v);
            }
            offsets.push(ys.len() as u32);
        }
        Ok(LevelTable { level, offsets, y: ys, kw })
    }

    pub fn check_level(&self, level: i32) -> Result<()> {
        if level > self.max_level || level < -60 {
            Err(Error::MissingLevel(level))
        } else {
            Ok(())
        }
    }
}

/// `K_l(x_i, y) dw(y)` quadrature rows for one level, one per output node.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    level: i32,
    offsets: Vec<u32>,
    y: Vec<f64>,
    kw: Vec<f64>,
}

impl LevelTable {
    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn entries(&self) -> usize {
        self.y.len()
    }

    /// Nodes and weights of the row for output node `i`.
    pub fn row(&self, i: usize) -> (&[f64], &[f64]) {
        let (a, b) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
        (&self.y[a..b], &self.kw[a..b])
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Where commutator computations obtain their level tables.
pub trait LevelSource {
    fn level(&self, level: i32) -> Result<Arc<LevelTable>>;
}

/// A fixed set of prebuilt levels; other levels are reported missing.
#[derive(Debug, Clone, Default)]
pub struct PrebuiltLevels {
    tables: BTreeMap<i32, Arc<LevelTable>>,
}

impl PrebuiltLevels {
    pub fn build(setup: &CommutatorSetup, levels: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for l in levels {
            tables.insert(l, Arc::new(setup.build_level(l)?));
        }
        Ok(Self { tables })
    }

    pub fn insert(&mut self, table: LevelTable) {
        self.tables.insert(table.level, Arc::new(table));
    }
}

impl LevelSource for PrebuiltLevels {
    fn level(&self, level: i32) -> Result<Arc<LevelTable>> {
        self.tables.get(&level).cloned().ok_or(Error::MissingLevel(level))
    }
}

/// Builds levels on first use and keeps them. Single-threaded; the lab crate
/// supplies a synchronized cache.
pub struct LazyLevels<'a> {
    setup: &'a CommutatorSetup,
    tables: RefCell<BTreeMap<i32, Arc<LevelTable>>>,
}

impl<'a> LazyLevels<'a> {
    pub fn new(setup: &'a CommutatorSetup) -> Self {
        Self { setup, tables: RefCell::new(BTreeMap::new()) }
    }

    pub fn built(&self) -> usize {
        self.tables.borrow().len()
    }
}

impl LevelSource for LazyLevels<'_> {
    fn level(&self, level: i32) -> Result<Arc<LevelTable>> {
        if let Some(t) = self.tables.borrow().get(&level) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.setup.build_level(level)?);
        self.tables.borrow_mut().insert(level, t.clone());
        Ok(t)
    }
}
