use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spectral::axis_density;
use alloc::vec::Vec;

/// Composite Gauss–Legendre grid on the line: uniform panels on
/// `[-inner_radius, inner_radius]`, then geometric panels out to
/// `inner_radius * 2^octaves` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    k: f64,
    edges: Vec<f64>,
    reference: Vec<f64>,
    barycentric: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelLayout {
    pub inner_radius: f64,
    pub inner_panel: f64,
    pub octaves: u32,
    pub panels_per_octave: usize,
    pub nodes_per_panel: usize,
}

impl Default for PanelLayout {
    fn default() -> Self {
        Self { inner_radius: 8.0, inner_panel: 0.5, octaves: 44, panels_per_octave: 3, nodes_per_panel: 8 }
    }
}

impl PanelGrid {
    /// `k` is the multiplicity of the rank-one weight `2^k |x|^{2k}`.
    pub fn new(layout: PanelLayout, k: f64) -> Result<Self> {
        let r = layout.inner_radius;
        let ratio = r / layout.inner_panel;
        let inner = libm::round(ratio) as usize;
        if !(r > 0.0 && layout.inner_panel > 0.0) || (ratio - inner as f64).abs() > 1e-9 {
            return Err(Error::InvalidArgument("inner radius must be a positive multiple of the panel width".into()));
        }
        if layout.nodes_per_panel < 2 || layout.panels_per_octave == 0 {
            return Err(Error::InvalidArgument("panels need at least two nodes".into()));
        }
        let mut right = Vec::new();
        for i in 0..=inner {
            right.push(i as f64 * layout.inner_panel);
        }
        let q = libm::pow(2.0, 1.0 / layout.panels_per_octave as f64);
        for o in 0..layout.octaves {
            let base = r * libm::ldexp(1.0, o as i32);
            for j in 1..=layout.panels_per_octave {
                right.push(if j == layout.panels_per_octave { 2.0 * base } else { base * libm::pow(q, j as f64) });
            }
        }
        let mut edges: Vec<f64> = right.iter().rev().map(|e| -e).collect();
        edges.pop();
        edges.extend(right);
        let rule = GaussLegendre::new(layout.nodes_per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(wt * axis_density(k, x));
            }
        }
        let reference = rule.nodes().to_vec();
        let barycentric = barycentric(&reference);
        Ok(Self { k, edges, reference, barycentric, nodes, weights })
    }

    pub fn multiplicity(&self) -> f64 {
        self.k
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights against `dw`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn outer_radius(&self) -> f64 {
        *self.edges.last().expect("grid has panels")
    }

    /// `(int |g|^p dw)^{1/p}` over the nodes selected by `keep`.
    pub fn lp_norm_where(&self, values: &[f64], p: f64, keep: impl Fn(f64) -> bool) -> f64 {
        let s: f64 = values
            .iter()
            .zip(&self.nodes)
            .zip(&self.weights)
            .filter(|((_, &x), _)| keep(x))
            .map(|((v, _), w)| libm::pow(v.abs(), p) * w)
            .sum();
        libm::pow(s, 1.0 / p)
    }

    pub fn lp_norm(&self, values: &[f64], p: f64) -> f64 {
        self.lp_norm_where(values, p, |_| true)
    }

    /// Panel-wise polynomial interpolation; zero outside the grid.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let (lo, hi) = (self.edges[0], self.outer_radius());
        if !(x >= lo && x <= hi) {
            return 0.0;
        }
        let p = self.edges.partition_point(|&e| e <= x).clamp(1, self.edges.len() - 1) - 1;
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        let t = 2.0 * (x - a) / (b - a) - 1.0;
        let n = self.reference.len();
        let vals = &values[p * n..(p + 1) * n];
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let d = t - self.reference[j];
            if d == 0.0 {
                return vals[j];
            }
            let c = self.barycentric[j] / d;
            num += c * vals[j];
            den += c;
        }
        num / den
    }
}

fn barycentric(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|j| {
            let mut w = 1.0;
            for k in 0..n {
                if k != j {
                    w /= nodes[j] - nodes[k];
                }
            }
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_the_weight_and_interpolates() {
        let layout = PanelLayout { octaves: 3, ..PanelLayout::default() };
        let g = PanelGrid::new(layout, 1.0).unwrap();
        assert_eq!(g.outer_radius(), 64.0);
        // int_{-64}^{64} 2 x^2 dx
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0 * 64f64.powi(3) / 3.0).abs() < 1e-9 * total);
        let values: Vec<f64> = g.nodes().iter().map(|x| x * x * x - x).collect();
        for x in [-50.0, -7.3, 0.01, 3.3, 17.0] {
            assert!((g.interpolate(&values, x) - (x * x * x - x)).abs() < 1e-9 * (1.0 + x.abs().powi(3)));
        }
        assert_eq!(g.interpolate(&values, 65.0), 0.0);
    }
}
