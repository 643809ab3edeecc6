use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// A symmetric composite Gauss–Legendre grid on `[-extent, extent]` with
/// panels of equal width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub extent: f64,
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl GridSpec {
    pub fn new(extent: f64, panel_width: f64, nodes_per_panel: usize) -> Self {
        Self { extent, panel_width, nodes_per_panel }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisGrid {
    spec: GridSpec,
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    reference: Vec<f64>,
    barycentric: Vec<f64>,
}

impl AxisGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let ratio = spec.extent / spec.panel_width;
        let panels = libm::round(ratio) as usize;
        if !(spec.extent > 0.0 && spec.panel_width > 0.0)
            || (ratio - panels as f64).abs() > 1e-9
            || spec.nodes_per_panel < 2
        {
            return Err(Error::InvalidArgument("grid extent must be a positive multiple of the panel width".into()));
        }
        let rule = GaussLegendre::new(spec.nodes_per_panel);
        let reference = rule.nodes().to_vec();
        let mut nodes = Vec::with_capacity(2 * panels * spec.nodes_per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in 0..2 * panels {
            let a = -spec.extent + p as f64 * spec.panel_width;
            for (x, w) in rule.mapped(a, a + spec.panel_width) {
                nodes.push(x);
                weights.push(w);
            }
        }
        // enforce exact mirror symmetry
        let n = nodes.len();
        for i in 0..n / 2 {
            let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -v;
            nodes[n - 1 - i] = v;
            let w = 0.5 * (weights[i] + weights[n - 1 - i]);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        let barycentric = barycentric_weights(&reference);
        Ok(Self { spec, panels, nodes, weights, reference, barycentric })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Plain Gauss–Legendre weights (Lebesgue measure).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node at `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    /// Panel boundaries in `[0, extent]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        (0..=self.panels).map(|p| p as f64 * self.spec.panel_width).collect()
    }

    /// Interpolation weights at `x`: value `≈ sum w_j f(node_j)`. Points
    /// outside the grid get no weights (the function is taken as zero there).
    pub fn interpolation_weights(&self, x: f64, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let e = self.spec.extent;
        if !(x >= -e && x <= e) {
            return;
        }
        let pw = self.spec.panel_width;
        let p = (libm::floor((x + e) / pw) as usize).min(2 * self.panels - 1);
        let a = -e + p as f64 * pw;
        let t = 2.0 * (x - a) / pw - 1.0;
        let m = self.reference.len();
        let base = p * m;
        for (j, &r) in self.reference.iter().enumerate() {
            if t == r {
                out.push((base + j, 1.0));
                return;
            }
        }
        let mut denom = 0.0;
        for (j, &r) in self.reference.iter().enumerate() {
            let c = self.barycentric[j] / (t - r);
            denom += c;
            out.push((base + j, c));
        }
        for entry in out.iter_mut() {
            entry.1 /= denom;
        }
    }
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.iter().map(|v| v / scale).collect()
}

/// Tensor product of axis grids with quadrature weights against the product
/// weight `prod_i 2^{k_i} |x_i|^{2 k_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    axes: Vec<AxisGrid>,
    multiplicities: Vec<f64>,
    axis_weights: Vec<Vec<f64>>,
    shape: Vec<usize>,
    len: usize,
    weights: Vec<f64>,
}

impl TensorGrid {
    pub fn new(axes: Vec<AxisGrid>, multiplicities: &[f64]) -> Result<Self> {
        if axes.len() != multiplicities.len() || axes.is_empty() {
            return Err(Error::DimensionMismatch { expected: axes.len(), found: multiplicities.len() });
        }
        let axis_weights = axes
            .iter()
            .zip(multiplicities)
            .map(|(a, &k)| {
                a.nodes()
                    .iter()
                    .zip(a.weights())
                    .map(|(&x, &w)| w * axis_density(k, x))
                    .collect()
            })
            .collect();
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let len = shape.iter().product();
        let mut grid = Self { axes, multiplicities: multiplicities.to_vec(), axis_weights, shape, len, weights: Vec::new() };
        grid.weights = (0..len)
            .map(|i| {
                grid.multi_index(i)
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| grid.axis_weights[a][j])
                    .product()
            })
            .collect();
        Ok(grid)
    }

    pub fn uniform(spec: GridSpec, multiplicities: &[f64]) -> Result<Self> {
        let axis = AxisGrid::new(spec)?;
        Self::new(vec![axis; multiplicities.len()], multiplicities)
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.multiplicities
    }

    /// Per-axis weights including the measure density.
    pub fn axis_weights(&self, axis: usize) -> &[f64] {
        &self.axis_weights[axis]
    }

    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            idx[a] = i % self.shape[a];
            i /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .iter()
            .enumerate()
            .map(|(a, &j)| self.axes[a].nodes()[j])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// Quadrature weight of node `i` against `dw`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node at `-x`.
    pub fn mirror(&self, i: usize) -> usize {
        let idx: Vec<usize> = self
            .multi_index(i)
            .iter()
            .enumerate()
            .map(|(a, &j)| self.axes[a].mirror(j))
            .collect();
        self.flat_index(&idx)
    }
}

/// `2^k |x|^{2k}`, the density of `dw` on one axis of a product system.
pub fn axis_density(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        libm::pow(2.0, k) * libm::pow(x.abs(), 2.0 * k)
    }
}

/// Complex samples on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<TensorGrid>,
    values: Vec<Complex64>,
    support_radius: Option<f64>,
    aliased: bool,
}

impl GridFunction {
    pub fn new(grid: Arc<TensorGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("value count differs from grid size".into()));
        }
        Ok(Self { grid, values, support_radius: None, aliased: false })
    }

    /// Samples `f`; with a support radius, values outside the ball are set to zero.
    pub fn from_fn<F>(grid: Arc<TensorGrid>, support_radius: Option<f64>, mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                match support_radius {
                    Some(r) if crate::geometry::norm(&x) > r => Complex64::new(0.0, 0.0),
                    _ => f(&x),
                }
            })
            .collect();
        Self { grid, values, support_radius, aliased: false }
    }

    pub fn zeros(grid: Arc<TensorGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n], support_radius: None, aliased: false }
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.grid.points()
    }

    pub fn quad_weights(&self) -> &[f64] {
        self.grid.weights()
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn with_support_radius(mut self, r: Option<f64>) -> Self {
        self.support_radius = r;
        self
    }

    /// Set when a transform detected spectral mass beyond its frequency grid.
    pub fn aliased(&self) -> bool {
        self.aliased
    }

    pub(crate) fn set_aliased(&mut self, flag: bool) {
        self.aliased = flag;
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn integral(&self) -> Complex64 {
        self.values.iter().enumerate().map(|(i, v)| v * self.grid.weight(i)).sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| libm::pow(v.norm(), p) * self.grid.weight(i))
            .sum();
        libm::pow(s, 1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    /// `<f, g> = int f conj(g) dw`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("inner product of functions on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * self.grid.weight(i))
            .sum())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("sum of functions on different grids".into()));
        }
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
        out.support_radius = match (self.support_radius, other.support_radius) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        out.aliased = self.aliased || other.aliased;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Relative `L^2(dw)` distance `|f - g| / |g|`.
    pub fn relative_l2_distance(&self, reference: &Self) -> Result<f64> {
        Ok(self.sub(reference)?.l2_norm() / reference.l2_norm())
    }

    /// Value at `y` by panel-wise polynomial interpolation.
    pub fn interpolate(&self, y: &[f64]) -> Complex64 {
        let d = self.grid.dimension();
        let mut per_axis: Vec<Vec<(usize, f64)>> = Vec::with_capacity(d);
        for (a, axis) in self.grid.axes().iter().enumerate() {
            let mut w = Vec::new();
            axis.interpolation_weights(y[a], &mut w);
            if w.is_empty() {
                return Complex64::new(0.0, 0.0);
            }
            per_axis.push(w);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; d];
        let mut flat = vec![0usize; d];
        loop {
            let mut w = 1.0;
            for a in 0..d {
                let (j, wj) = per_axis[a][idx[a]];
                flat[a] = j;
                w *= wj;
            }
            acc += self.values[self.grid.flat_index(&flat)] * w;
            let mut a = 0;
            loop {
                idx[a] += 1;
                if idx[a] < per_axis[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
                if a == d {
                    return acc;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_grid_is_symmetric_and_integrates() {
        let g = AxisGrid::new(GridSpec::new(4.0, 0.5, 12)).unwrap();
        assert_eq!(g.len(), 16 * 12);
        for i in 0..g.len() {
            assert_eq!(g.nodes()[i], -g.nodes()[g.mirror(i)]);
        }
        let s: f64 = g.nodes().iter().zip(g.weights()).map(|(x, w)| x * x * w).sum();
        assert!((s - 2.0 * 64.0 / 3.0).abs() < 1e-12);
        assert!(AxisGrid::new(GridSpec::new(4.0, 0.3, 12)).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_panel_polynomials() {
        let g = AxisGrid::new(GridSpec::new(2.0, 0.5, 10)).unwrap();
        let grid = Arc::new(TensorGrid::new(vec![g], &[0.0]).unwrap());
        let f = |x: f64| libm::pow(1.0 - x * x / 4.0, 4.0);
        let gf = GridFunction::from_fn(grid, None, |p| Complex64::new(f(p[0]), 0.0));
        for y in [-1.99, -0.31, 0.0, 0.25, 1.234] {
            assert!((gf.interpolate(&[y]).re - f(y)).abs() < 1e-13);
        }
        assert_eq!(gf.interpolate(&[2.5]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tensor_weights_include_density() {
        let grid = TensorGrid::uniform(GridSpec::new(1.0, 0.5, 8), &[1.0, 0.0]).unwrap();
        // int_{[-1,1]^2} 2 x^2 dx dy = 8/3
        let s: f64 = grid.weights().iter().sum();
        assert!((s - 8.0 / 3.0).abs() < 1e-13);
        for i in [0, 7, 100, grid.len() - 1] {
            let p = grid.point(i);
            let q = grid.point(grid.mirror(i));
            assert_eq!(p[0], -q[0]);
            assert_eq!(p[1], -q[1]);
            assert_eq!(grid.flat_index(&grid.multi_index(i)), i);
        }
    }
}
