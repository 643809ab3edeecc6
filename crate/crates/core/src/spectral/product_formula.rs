//! Rank-one Dunkl translation as an integral over the segment
//! `A in [||x| - |z||, |x| + |z|]`:
//!
//! `tau_x f(z) = int f(A) (1 + (x+z)/A)/2 + f(-A) (1 - (x+z)/A)/2 dmu_{x,z}(A)`
//!
//! where `mu_{x,z}` is the image of `c (1+t)^k (1-t)^{k-1} dt` on `[-1, 1]`
//! under `A = sqrt(x^2 + z^2 + 2xzt)`. Products of rank-one systems use the
//! tensor product of these measures.

use crate::quadrature::{GaussLegendre, TanhSinh};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// A quadrature node of the translation measure: `f(A) plus + f(-A) minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationNode {
    pub a: f64,
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Clone)]
pub struct ProductFormula {
    k: f64,
    c: f64,
    ends: Option<TanhSinh>,
    interior: GaussLegendre,
}

impl ProductFormula {
    /// `h` is the tanh-sinh step used on segments touching the endpoints.
    pub fn new(k: f64, h: f64, interior_nodes: usize) -> Self {
        assert!(k >= 0.0);
        if k == 0.0 {
            return Self { k, c: 0.0, ends: None, interior: GaussLegendre::new(1) };
        }
        let c = libm::tgamma(k + 0.5) / (libm::sqrt(PI) * libm::tgamma(k));
        Self {
            k,
            c,
            ends: Some(TanhSinh::for_exponent(h, (k - 1.0).min(0.0))),
            interior: GaussLegendre::new(interior_nodes.max(2)),
        }
    }

    pub fn multiplicity(&self) -> f64 {
        self.k
    }

    /// Nodes of the translation measure for `tau_x f(z)`; `breaks` lists the
    /// positive radii where `f` fails to be smooth.
    pub fn nodes(&self, x: f64, z: f64, breaks: &[f64], out: &mut Vec<TranslationNode>) {
        self.nodes_in(x, z, breaks, (0.0, f64::INFINITY), out);
    }

    /// As [`ProductFormula::nodes`] for `f` vanishing when `|A|` lies outside `window`.
    pub fn nodes_in(&self, x: f64, z: f64, breaks: &[f64], window: (f64, f64), out: &mut Vec<TranslationNode>) {
        out.clear();
        let s = x + z;
        if self.k == 0.0 || x == 0.0 || z == 0.0 {
            // point mass at x + z
            let (plus, minus) = if s >= 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
            out.push(TranslationNode { a: s.abs(), plus, minus });
            return;
        }
        let k = self.k;
        let xz = x * z;
        let axz = xz.abs();
        let lo = (x.abs() - z.abs()).abs();
        let hi = x.abs() + z.abs();
        // endpoint equal to |x + z|
        let s_at_lo = xz < 0.0;
        let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
        cuts.push(lo);
        cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pieces = cuts.len() - 1;
        let mut push = |a: f64, d_lo: f64, d_hi: f64, w: f64| {
            if !(a > 0.0) {
                return;
            }
            // 1 + t and 1 - t in terms of the distances to the endpoints
            let near_lo = d_lo * (a + lo) / (2.0 * axz);
            let near_hi = d_hi * (hi + a) / (2.0 * axz);
            let (one_plus, one_minus) = if xz > 0.0 { (near_lo, near_hi) } else { (near_hi, near_lo) };
            if one_plus <= 0.0 || one_minus <= 0.0 {
                return;
            }
            let density = self.c * libm::pow(one_plus, k) * libm::pow(one_minus, k - 1.0) * a / axz * w;
            // A - |x + z| and A + |x + z|
            let (diff, sum) = if s_at_lo { (d_lo, a + lo) } else { (-d_hi, a + hi) };
            let (big, small) = (0.5 * sum / a, 0.5 * diff / a);
            let (plus, minus) = if s >= 0.0 { (big, small) } else { (small, big) };
            out.push(TranslationNode { a, plus: density * plus, minus: density * minus });
        };
        for p in 0..pieces {
            let (a, b) = (cuts[p], cuts[p + 1]);
            if !(b > a) || b <= window.0 || a >= window.1 {
                continue;
            }
            // pieces near an endpoint see its singularity
            let width = b - a;
            if p == 0 || p + 1 == pieces || a - lo < width || hi - b < width {
                let rule = self.ends.as_ref().expect("k > 0");
                for node in rule.nodes() {
                    let half = 0.5 * (b - a);
                    let (da, db) = if node.x < 0.0 {
                        (half * node.complement, half * (2.0 - node.complement))
                    } else {
                        (half * (2.0 - node.complement), half * node.complement)
                    };
                    let pos = if node.x < 0.0 { a + da } else { b - db };
                    let d_lo = if p == 0 { da } else { (a - lo) + da };
                    let d_hi = if p + 1 == pieces { db } else { (hi - b) + db };
                    push(pos, d_lo, d_hi, half * node.weight);
                }
            } else {
                for (pos, w) in self.interior.mapped(a, b) {
                    push(pos, pos - lo, hi - pos, w);
                }
            }
        }
    }

    pub fn translate<F>(&self, x: f64, z: f64, breaks: &[f64], mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let mut nodes = Vec::new();
        self.nodes(x, z, breaks, &mut nodes);
        nodes
            .iter()
            .map(|n| {
                let mut v = Complex64::new(0.0, 0.0);
                if n.plus != 0.0 {
                    v += f(n.a) * n.plus;
                }
                if n.minus != 0.0 {
                    v += f(-n.a) * n.minus;
                }
                v
            })
            .sum()
    }
}

/// Tensor product of rank-one product formulas.
#[derive(Debug, Clone)]
pub struct ProductTranslation {
    axes: Vec<ProductFormula>,
}

impl ProductTranslation {
    pub fn new(multiplicities: &[f64], h: f64, interior_nodes: usize) -> Self {
        Self { axes: multiplicities.iter().map(|&k| ProductFormula::new(k, h, interior_nodes)).collect() }
    }

    pub fn axis(&self, i: usize) -> &ProductFormula {
        &self.axes[i]
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    /// `tau_x f(z)` for `f` whose non-smoothness is confined to the spheres
    /// `|.| = r` for `r` in `radii`.
    pub fn translate<F>(&self, x: &[f64], z: &[f64], radii: &[f64], mut f: F) -> Complex64
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        match self.axes.len() {
            1 => self.axes[0].translate(x[0], z[0], radii, |a| f(&[a])),
            2 => {
                let mut outer = Vec::new();
                self.axes[0].nodes(x[0], z[0], radii, &mut outer);
                let mut inner = Vec::new();
                let mut inner_breaks = Vec::with_capacity(radii.len());
                let mut acc = Complex64::new(0.0, 0.0);
                for n0 in &outer {
                    inner_breaks.clear();
                    inner_breaks.extend(radii.iter().filter(|&&r| r > n0.a).map(|r| libm::sqrt(r * r - n0.a * n0.a)));
                    self.axes[1].nodes(x[1], z[1], &inner_breaks, &mut inner);
                    for (s0, w0) in [(1.0, n0.plus), (-1.0, n0.minus)] {
                        if w0 == 0.0 {
                            continue;
                        }
                        for n1 in &inner {
                            for (s1, w1) in [(1.0, n1.plus), (-1.0, n1.minus)] {
                                if w1 != 0.0 {
                                    acc += f(&[s0 * n0.a, s1 * n1.a]) * (w0 * w1);
                                }
                            }
                        }
                    }
                }
                acc
            }
            _ => {
                // general tensor product without adapted breakpoints
                let tables: Vec<Vec<TranslationNode>> = self
                    .axes
                    .iter()
                    .enumerate()
                    .map(|(i, ax)| {
                        let mut t = Vec::new();
                        ax.nodes(x[i], z[i], radii, &mut t);
                        t
                    })
                    .collect();
                let d = self.axes.len();
                let mut idx = alloc::vec![0usize; 2 * d];
                let sizes: Vec<usize> = tables.iter().map(|t| 2 * t.len()).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                let mut p = alloc::vec![0.0; d];
                loop {
                    let mut w = 1.0;
                    for a in 0..d {
                        let n = &tables[a][idx[a] / 2];
                        let (sign, wa) = if idx[a] % 2 == 0 { (1.0, n.plus) } else { (-1.0, n.minus) };
                        p[a] = sign * n.a;
                        w *= wa;
                    }
                    if w != 0.0 {
                        acc += f(&p) * w;
                    }
                    let mut a = 0;
                    loop {
                        idx[a] += 1;
                        if idx[a] < sizes[a] {
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
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::Rank1Kernel;

    #[test]
    fn measure_has_unit_mass() {
        for k in [0.3, 0.5, 1.0, 2.2] {
            let pf = ProductFormula::new(k, 1.0 / 16.0, 20);
            for (x, z) in [(1.0, 0.5), (-0.7, 2.0), (3.0, -3.0), (0.2, 0.2)] {
                let mut nodes = Vec::new();
                pf.nodes(x, z, &[0.5, 1.0], &mut nodes);
                let mass: f64 = nodes.iter().map(|n| n.plus + n.minus).sum();
                assert!((mass - 1.0).abs() < 1e-12, "k={k} x={x} z={z} mass={mass}");
            }
        }
    }

    #[test]
    fn translates_kernel_exponentials() {
        // tau_x E(., i l)(z) = E(x, i l) E(z, i l)
        for k in [0.4, 0.5, 1.0, 1.7] {
            let pf = ProductFormula::new(k, 1.0 / 16.0, 20);
            let ker = Rank1Kernel::new(k);
            for (x, z, l) in [(1.0, 0.5, 2.0), (-0.7, 2.0, 3.5), (2.5, -1.5, -1.2)] {
                let lhs = pf.translate(x, z, &[], |a| ker.eval(Complex64::new(0.0, a * l)));
                let rhs = ker.eval(Complex64::new(0.0, x * l)) * ker.eval(Complex64::new(0.0, z * l));
                assert!((lhs - rhs).norm() < 1e-11, "k={k} {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn classical_limit_and_degenerate_points() {
        let pf = ProductFormula::new(0.0, 0.1, 8);
        let v = pf.translate(1.5, -0.25, &[], |a| Complex64::new(a * a, 0.0));
        assert!((v.re - 1.5625).abs() < 1e-15);
        let pf = ProductFormula::new(1.0, 0.1, 8);
        let v = pf.translate(0.0, -0.75, &[], |a| Complex64::new(a, 0.0));
        assert_eq!(v.re, -0.75);
    }

    #[test]
    fn tensor_product_matches_factorized_translation() {
        let pt = ProductTranslation::new(&[1.0, 0.5], 1.0 / 16.0, 20);
        let k1 = Rank1Kernel::new(1.0);
        let k2 = Rank1Kernel::new(0.5);
        let (x, z, l) = ([0.6, -1.1], [1.3, 0.4], [1.5, -2.0]);
        let e = |p: &[f64]| k1.eval(Complex64::new(0.0, p[0] * l[0])) * k2.eval(Complex64::new(0.0, p[1] * l[1]));
        let lhs = pt.translate(&x, &z, &[], e);
        let rhs = e(&x) * e(&z);
        assert!((lhs - rhs).norm() < 1e-11);
    }
}
