//! One-dimensional quadrature rules: Gauss–Legendre, composite midpoint and
//! the double-exponential (tanh-sinh) rule used for endpoint singularities.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{AddAssign, Mul};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
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

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Default + AddAssign + Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        let mut acc = T::default();
        for (x, w) in self.mapped(a, b) {
            acc += f(x) * w;
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over the panels delimited by `breaks` (sorted, at least two).
pub fn composite<T, F>(rule: &GaussLegendre, breaks: &[f64], mut f: F) -> T
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let mut acc = T::default();
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            acc += rule.integrate(pair[0], pair[1], &mut f);
        }
    }
    acc
}

/// Composite midpoint rule with `n` cells on [a, b].
pub fn midpoint<T, F>(a: f64, b: f64, n: usize, mut f: F) -> T
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let h = (b - a) / n as f64;
    let mut acc = T::default();
    for i in 0..n {
        acc += f(a + (i as f64 + 0.5) * h) * h;
    }
    acc
}

/// A node of the tanh-sinh rule on [-1, 1]: abscissa, weight, and the
/// distance `1 - |x|` to the nearest endpoint computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeNode {
    pub x: f64,
    pub weight: f64,
    pub complement: f64,
}

/// Double-exponential rule. Integrands may carry integrable algebraic
/// singularities at either endpoint; the closure receives the distances to
/// both endpoints so singular factors can be formed accurately.
#[derive(Debug, Clone, PartialEq)]
pub struct TanhSinh {
    nodes: Vec<DeNode>,
}

impl TanhSinh {
    /// Step `h` in the t-variable, nodes for |t| <= `t_max`.
    pub fn new(h: f64, t_max: f64) -> Self {
        let steps = libm::floor(t_max / h) as i64;
        let mut nodes = Vec::with_capacity(2 * steps as usize + 1);
        for j in -steps..=steps {
            let t = j as f64 * h;
            let u = 0.5 * PI * libm::sinh(t);
            let au = u.abs();
            let e = libm::exp(-2.0 * au);
            let complement = 2.0 * e / (1.0 + e);
            let weight = h * 0.5 * PI * libm::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if complement <= 0.0 || weight <= 0.0 {
                continue;
            }
            let x = if u >= 0.0 { 1.0 - complement } else { complement - 1.0 };
            nodes.push(DeNode { x, weight, complement });
        }
        Self { nodes }
    }

    /// A rule whose truncation is safe for endpoint factors `d^(s)` with `s > -1`,
    /// `s >= smallest_exponent`.
    pub fn for_exponent(h: f64, smallest_exponent: f64) -> Self {
        // need (1 - |x|)^(1 + s) ~ exp(-2u(1 + s)) below 1e-18
        let margin = (1.0 + smallest_exponent).max(0.02);
        let u_needed = 42.0 / (2.0 * margin);
        let t_max = libm::asinh(2.0 * u_needed / PI).max(3.0);
        Self::new(h, t_max)
    }

    pub fn nodes(&self) -> &[DeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates over [a, b]; `f(x, x - a, b - x)`.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Default + AddAssign + Mul<f64, Output = T>,
        F: FnMut(f64, f64, f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mut acc = T::default();
        for node in &self.nodes {
            let (da, db) = if node.x < 0.0 {
                (half * node.complement, half * (2.0 - node.complement))
            } else {
                (half * (2.0 - node.complement), half * node.complement)
            };
            let x = if node.x < 0.0 { a + da } else { b - db };
            acc += f(x, da, db) * (half * node.weight);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // degree 15 is exact
        let v: f64 = rule.integrate(-1.0, 2.0, |x| libm::pow(x, 15.0) - 3.0 * x * x);
        let exact = (libm::pow(2.0, 16.0) - 1.0) / 16.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-9 * exact.abs());
        let s: f64 = rule.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_count_has_centre_node() {
        let rule = GaussLegendre::new(7);
        assert_eq!(rule.nodes()[3], 0.0);
        let v: f64 = rule.integrate(0.0, PI, libm::sin);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let rule = TanhSinh::for_exponent(1.0 / 8.0, -0.5);
        // int_0^1 x^{-1/2} (1-x)^{-1/2} dx = pi
        let v: f64 = rule.integrate(0.0, 1.0, |_, da, db| 1.0 / libm::sqrt(da * db));
        assert!((v - PI).abs() < 1e-12, "{v}");
        // int_0^2 sqrt(x) dx
        let w: f64 = rule.integrate(0.0, 2.0, |_, da, _| libm::sqrt(da));
        assert!((w - 2.0 / 3.0 * libm::pow(2.0, 1.5)).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_small_exponent() {
        let s = -0.9;
        let rule = TanhSinh::for_exponent(1.0 / 8.0, s);
        let v: f64 = rule.integrate(0.0, 1.0, |_, da, _| libm::pow(da, s));
        assert!((v - 10.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn midpoint_second_order() {
        let v: f64 = midpoint(0.0, 1.0, 1000, |x| x * x);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }
}
