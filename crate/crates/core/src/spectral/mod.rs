//! Dunkl kernel, operator, transform, translation and convolution for rank-one
//! root systems and their orthogonal products, where everything factorizes
//! over coordinates.

mod grid;
mod kernel;
mod product_formula;

pub use grid::{axis_density, AxisGrid, GridFunction, GridSpec, TensorGrid};
pub use kernel::{dunkl_kernel, dunkl_operator, DunklKernel};
pub use product_formula::{ProductFormula, ProductTranslation, TranslationNode};

use crate::error::{Error, Result};
use crate::measure::WeightedMeasure;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Relative Plancherel defect above which a transform is flagged as aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationMethod {
    /// Multiplier `E(i xi, x)` on the Dunkl transform.
    Spectral,
    /// Rank-one product formula, with panel-wise interpolation of the samples.
    ProductFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMode {
    Spectral,
    Translation,
}

/// `c_k = int e^{-|x|^2/2} dw` for `dw = prod_i 2^{k_i} |x_i|^{2 k_i} dx_i`.
pub fn normalization_constant(ks: &[f64]) -> f64 {
    ks.iter()
        .map(|&k| libm::pow(2.0, 2.0 * k + 0.5) * libm::tgamma(k + 0.5))
        .product()
}

#[derive(Debug, Clone)]
pub struct SpectralContext {
    measure: WeightedMeasure,
    ks: Vec<f64>,
    c_k: f64,
    space: Arc<TensorGrid>,
    frequency: Arc<TensorGrid>,
    kernel: DunklKernel,
    translation: ProductTranslation,
    /// Per axis, `forward[a][j * n_space + i] = E_k(-i xi_j x_i)`.
    forward: Vec<Arc<Vec<Complex64>>>,
}

impl SpectralContext {
    pub fn new(measure: WeightedMeasure, space: GridSpec, frequency: GridSpec) -> Result<Self> {
        let ks = measure.root_system().axis_multiplicities().ok_or(Error::NoClosedForm)?;
        let space = Arc::new(TensorGrid::uniform(space, &ks)?);
        let frequency = Arc::new(TensorGrid::uniform(frequency, &ks)?);
        let kernel = DunklKernel::from_multiplicities(&ks);
        let mut forward: Vec<Arc<Vec<Complex64>>> = Vec::with_capacity(ks.len());
        for a in 0..ks.len() {
            if let Some(b) = (0..a).find(|&b| ks[b] == ks[a]) {
                forward.push(forward[b].clone());
                continue;
            }
            forward.push(Arc::new(forward_matrix(
                kernel.axis(a),
                &frequency.axes()[a],
                &space.axes()[a],
            )));
        }
        let translation = ProductTranslation::new(&ks, 1.0 / 16.0, space.axes()[0].spec().nodes_per_panel);
        Ok(Self { c_k: normalization_constant(&ks), measure, ks, space, frequency, kernel, translation, forward })
    }

    pub fn measure(&self) -> &WeightedMeasure {
        &self.measure
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.ks
    }

    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    pub fn space_grid(&self) -> &Arc<TensorGrid> {
        &self.space
    }

    pub fn frequency_grid(&self) -> &Arc<TensorGrid> {
        &self.frequency
    }

    pub fn kernel(&self) -> &DunklKernel {
        &self.kernel
    }

    pub fn product_translation(&self) -> &ProductTranslation {
        &self.translation
    }

    pub fn dimension(&self) -> usize {
        self.ks.len()
    }

    /// Samples `f` on the space grid.
    pub fn sample<F>(&self, support_radius: Option<f64>, f: F) -> GridFunction
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        GridFunction::from_fn(self.space.clone(), support_radius, f)
    }

    fn check_on(&self, f: &GridFunction, grid: &Arc<TensorGrid>, what: &str) -> Result<()> {
        if Arc::ptr_eq(f.grid(), grid) || **f.grid() == **grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(alloc::format!("function is not on the {what} grid")))
        }
    }

    /// `Ff(xi) = c_k^{-1} int f(x) E(x, -i xi) dw(x)` on the frequency grid.
    pub fn dunkl_transform(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check_on(f, &self.space, "space")?;
        let weighted: Vec<Complex64> = f
            .values()
            .iter()
            .zip(self.space.weights())
            .map(|(v, w)| v * (w / self.c_k))
            .collect();
        let mut data = weighted;
        let mut shape = self.space.shape().to_vec();
        for a in 0..self.dimension() {
            let n_out = self.frequency.shape()[a];
            data = apply_along_axis(&data, &shape, a, &self.forward[a], n_out, false);
            shape[a] = n_out;
        }
        let mut out = GridFunction::new(self.frequency.clone(), data)?;
        let before = f.l2_norm();
        let after = out.l2_norm();
        let defect = if before > 0.0 { (before * before - after * after).abs() / (before * before) } else { 0.0 };
        out.set_aliased(f.aliased() || defect > ALIASING_THRESHOLD);
        Ok(out)
    }

    /// `F^{-1} g(x) = c_k^{-1} int g(xi) E(i xi, x) dw(xi)` on the space grid.
    pub fn inverse_transform(&self, g: &GridFunction) -> Result<GridFunction> {
        self.check_on(g, &self.frequency, "frequency")?;
        let mut data: Vec<Complex64> = g
            .values()
            .iter()
            .zip(self.frequency.weights())
            .map(|(v, w)| v * (w / self.c_k))
            .collect();
        let mut shape = self.frequency.shape().to_vec();
        for a in 0..self.dimension() {
            let n_out = self.space.shape()[a];
            data = apply_along_axis(&data, &shape, a, &self.forward[a], n_out, true);
            shape[a] = n_out;
        }
        let mut out = GridFunction::new(self.space.clone(), data)?;
        out.set_aliased(g.aliased());
        Ok(out)
    }

    /// `F^{-1} g` at arbitrary points.
    pub fn inverse_transform_at(&self, g: &GridFunction, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.check_on(g, &self.frequency, "frequency")?;
        let weighted: Vec<Complex64> = g
            .values()
            .iter()
            .zip(self.frequency.weights())
            .map(|(v, w)| v * (w / self.c_k))
            .collect();
        points
            .iter()
            .map(|x| {
                if x.len() != self.dimension() {
                    return Err(Error::DimensionMismatch { expected: self.dimension(), found: x.len() });
                }
                let mut data = weighted.clone();
                let mut shape = self.frequency.shape().to_vec();
                for (a, &xa) in x.iter().enumerate() {
                    let row: Vec<Complex64> = self.frequency.axes()[a]
                        .nodes()
                        .iter()
                        .map(|&xi| self.kernel.axis(a).eval(Complex64::new(0.0, xi * xa)))
                        .collect();
                    data = apply_along_axis(&data, &shape, a, &row, 1, false);
                    shape[a] = 1;
                }
                Ok(data[0])
            })
            .collect()
    }

    /// The values `y -> tau_x f(-y)` on the space grid.
    pub fn translate(&self, x: &[f64], f: &GridFunction, method: TranslationMethod) -> Result<GridFunction> {
        self.check_on(f, &self.space, "space")?;
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: x.len() });
        }
        match method {
            TranslationMethod::Spectral => {
                let mut ff = self.dunkl_transform(f)?;
                let aliased = ff.aliased();
                for (i, v) in ff.values_mut().iter_mut().enumerate() {
                    let xi = self.frequency.point(i);
                    let mult = self.kernel.eval(x, &xi.iter().map(|&t| Complex64::new(0.0, t)).collect::<Vec<_>>());
                    *v *= mult;
                }
                let h = self.inverse_transform(&ff)?;
                let values = (0..self.space.len()).map(|i| h.values()[self.space.mirror(i)]).collect();
                let mut out = GridFunction::new(self.space.clone(), values)?;
                out.set_aliased(aliased);
                Ok(out)
            }
            TranslationMethod::ProductFormula => {
                let mut data = f.values().to_vec();
                let shape = self.space.shape().to_vec();
                for (a, &xa) in x.iter().enumerate() {
                    let m = self.translation_matrix(a, xa);
                    data = apply_along_axis(&data, &shape, a, &m, shape[a], false);
                }
                let mut out = GridFunction::new(self.space.clone(), data)?;
                out.set_aliased(f.aliased());
                Ok(out)
            }
        }
    }

    /// Dense matrix on axis `a` mapping samples of `g` to `tau_x g(-y_r)` at
    /// the axis nodes `y_r`.
    pub fn translation_matrix(&self, a: usize, x: f64) -> Vec<Complex64> {
        let axis = &self.space.axes()[a];
        let n = axis.len();
        let breaks = axis.breakpoints();
        let pf = self.translation.axis(a);
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        let mut nodes = Vec::new();
        let mut interp = Vec::new();
        for r in 0..n {
            let z = -axis.nodes()[r];
            pf.nodes(x, z, &breaks, &mut nodes);
            let row = &mut m[r * n..(r + 1) * n];
            for node in &nodes {
                for (pt, w) in [(node.a, node.plus), (-node.a, node.minus)] {
                    if w == 0.0 {
                        continue;
                    }
                    axis.interpolation_weights(pt, &mut interp);
                    for &(j, c) in &interp {
                        row[j] += Complex64::new(w * c, 0.0);
                    }
                }
            }
        }
        m
    }

    /// `f * g = c_k F^{-1}(Ff Fg)` on the space grid.
    pub fn convolve(&self, f: &GridFunction, g: &GridFunction, mode: ConvolutionMode) -> Result<GridFunction> {
        if !f.same_grid(g) {
            return Err(Error::GridMismatch("convolution operands live on different grids".into()));
        }
        match mode {
            ConvolutionMode::Spectral => {
                let mut prod = self.product_spectrum(f, g)?;
                prod.values_mut().iter_mut().for_each(|v| *v *= self.c_k);
                self.inverse_transform(&prod)
            }
            ConvolutionMode::Translation => {
                let points: Vec<Vec<f64>> = self.space.points().collect();
                let values = self.convolve_at(f, g, mode, &points)?;
                GridFunction::new(self.space.clone(), values)
            }
        }
    }

    fn product_spectrum(&self, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
        let ff = self.dunkl_transform(f)?;
        let fg = self.dunkl_transform(g)?;
        let values = ff.values().iter().zip(fg.values()).map(|(a, b)| a * b).collect();
        let mut out = GridFunction::new(self.frequency.clone(), values)?;
        out.set_aliased(ff.aliased() || fg.aliased());
        Ok(out)
    }

    /// `f * g` at the given points. Translation mode evaluates
    /// `int f(y) tau_x g(-y) dw(y)` with product-formula translations.
    pub fn convolve_at(
        &self,
        f: &GridFunction,
        g: &GridFunction,
        mode: ConvolutionMode,
        points: &[Vec<f64>],
    ) -> Result<Vec<Complex64>> {
        if !f.same_grid(g) {
            return Err(Error::GridMismatch("convolution operands live on different grids".into()));
        }
        self.check_on(f, &self.space, "space")?;
        match mode {
            ConvolutionMode::Spectral => {
                let mut prod = self.product_spectrum(f, g)?;
                prod.values_mut().iter_mut().for_each(|v| *v *= self.c_k);
                self.inverse_transform_at(&prod, points)
            }
            ConvolutionMode::Translation => {
                let fw: Vec<Complex64> = f.values().iter().zip(self.space.weights()).map(|(v, w)| v * w).collect();
                points
                    .iter()
                    .map(|x| {
                        let t = self.translate(x, g, TranslationMethod::ProductFormula)?;
                        Ok(t.values().iter().zip(&fw).map(|(a, b)| a * b).sum())
                    })
                    .collect()
            }
        }
    }
}

fn forward_matrix(kernel: &crate::special::Rank1Kernel, freq: &AxisGrid, space: &AxisGrid) -> Vec<Complex64> {
    let (nf, ns) = (freq.len(), space.len());
    let mut m = vec![Complex64::new(0.0, 0.0); nf * ns];
    // E(-i t) = conj E(i t); fill the four sign quadrants from one
    for j in nf / 2..nf {
        let xi = freq.nodes()[j];
        for i in ns / 2..ns {
            let x = space.nodes()[i];
            let v = kernel.eval(Complex64::new(0.0, -xi * x));
            let (mj, mi) = (freq.mirror(j), space.mirror(i));
            m[j * ns + i] = v;
            m[mj * ns + mi] = v;
            m[mj * ns + i] = v.conj();
            m[j * ns + mi] = v.conj();
        }
    }
    m
}

/// Contracts axis `a` of a row-major array with `m` (`n_out x n_in`, or its
/// conjugate transpose when `adjoint`).
fn apply_along_axis(
    data: &[Complex64],
    shape: &[usize],
    a: usize,
    m: &[Complex64],
    n_out: usize,
    adjoint: bool,
) -> Vec<Complex64> {
    let n_in = shape[a];
    let outer: usize = shape[..a].iter().product();
    let inner: usize = shape[a + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * n_out * inner];
    let mut column = vec![Complex64::new(0.0, 0.0); n_in];
    for o in 0..outer {
        for s in 0..inner {
            for (i, c) in column.iter_mut().enumerate() {
                *c = data[(o * n_in + i) * inner + s];
            }
            for r in 0..n_out {
                let mut acc = Complex64::new(0.0, 0.0);
                if adjoint {
                    // m is n_in x n_out here
                    for (i, c) in column.iter().enumerate() {
                        acc += m[i * n_out + r].conj() * c;
                    }
                } else {
                    let row = &m[r * n_in..(r + 1) * n_in];
                    for (mv, c) in row.iter().zip(&column) {
                        acc += mv * c;
                    }
                }
                out[(o * n_out + r) * inner + s] = acc;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RootSystem;

    fn bump(c: f64, r: f64) -> impl Fn(&[f64]) -> Complex64 {
        move |x: &[f64]| {
            let t = (x[0] - c) / r;
            Complex64::new(if t.abs() < 1.0 { libm::pow(1.0 - t * t, 8.0) } else { 0.0 }, 0.0)
        }
    }

    fn context(k: f64) -> SpectralContext {
        let m = WeightedMeasure::new(RootSystem::rank1(k).unwrap());
        SpectralContext::new(m, GridSpec::new(8.0, 0.5, 20), GridSpec::new(48.0, 2.0, 20)).unwrap()
    }

    #[test]
    fn gaussian_is_fixed_and_plancherel_holds() {
        for k in [0.0, 0.5, 1.0] {
            let ctx = context(k);
            let g = ctx.sample(None, |x| Complex64::new(libm::exp(-0.5 * x[0] * x[0]), 0.0));
            let fg = ctx.dunkl_transform(&g).unwrap();
            for (xi, v) in ctx.frequency_grid().points().zip(fg.values()).step_by(37) {
                assert!((v - libm::exp(-0.5 * xi[0] * xi[0])).norm() < 1e-10, "k={k}");
            }
            let f = ctx.sample(Some(2.0), bump(0.7, 1.3));
            let ff = ctx.dunkl_transform(&f).unwrap();
            assert!(!ff.aliased());
            assert!((ff.l2_norm() - f.l2_norm()).abs() < 1e-8 * f.l2_norm());
            let back = ctx.inverse_transform(&ff).unwrap();
            assert!(back.relative_l2_distance(&f).unwrap() < 1e-8);
        }
    }

    #[test]
    fn translation_routes_agree() {
        for k in [0.5, 1.0] {
            let ctx = context(k);
            let f = ctx.sample(Some(2.0), bump(0.7, 1.3));
            for x in [0.9, -1.4] {
                let a = ctx.translate(&[x], &f, TranslationMethod::Spectral).unwrap();
                let b = ctx.translate(&[x], &f, TranslationMethod::ProductFormula).unwrap();
                let d = a.relative_l2_distance(&b).unwrap();
                assert!(d < 1e-6, "k={k} x={x} d={d}");
            }
        }
    }

    #[test]
    fn convolution_modes_agree() {
        let ctx = context(1.0);
        let f = ctx.sample(Some(2.0), bump(0.7, 1.3));
        let g = ctx.sample(Some(2.0), bump(-0.4, 0.9));
        let pts = [vec![0.3], vec![-1.1], vec![2.0]];
        let a = ctx.convolve_at(&f, &g, ConvolutionMode::Spectral, &pts).unwrap();
        let b = ctx.convolve_at(&f, &g, ConvolutionMode::Translation, &pts).unwrap();
        let c = ctx.convolve_at(&g, &f, ConvolutionMode::Spectral, &pts).unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-6, "{} {}", a[i], b[i]);
            assert!((a[i] - c[i]).norm() < 1e-10);
        }
    }
}
