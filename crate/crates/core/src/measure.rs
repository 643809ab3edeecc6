//! The weight `w(x) = prod_alpha |<x, alpha>|^{k(alpha)}`, quadrature against
//! `dw`, and ball-volume diagnostics.
//!
//! Balls and annuli are integrated in polar coordinates about their centre.
//! Each ray is split where it meets a reflection hyperplane, so the weight is
//! smooth on every radial piece; in the plane the angular range is split at
//! the directions where that splitting changes.

use crate::error::{Error, Result};
use crate::geometry::{dot, Ball, RootSystem};
use crate::quadrature::GaussLegendre;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    root_system: RootSystem,
    homogeneous_dimension: f64,
}

impl WeightedMeasure {
    pub fn new(root_system: RootSystem) -> Self {
        let homogeneous_dimension = root_system.homogeneous_dimension();
        Self { root_system, homogeneous_dimension }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn dimension(&self) -> usize {
        self.root_system.dimension()
    }

    /// The homogeneous dimension `N + sum_alpha k(alpha)`.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.homogeneous_dimension
    }

    pub fn weight(&self, x: &[f64]) -> f64 {
        let rs = &self.root_system;
        let mut w = 1.0;
        for (alpha, &k) in rs.roots().iter().zip(rs.multiplicities()) {
            if k != 0.0 {
                w *= libm::pow(dot(alpha, x).abs(), k);
            }
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Midpoint,
    GaussLegendre,
    /// Gauss–Legendre panels graded geometrically toward the hyperplanes.
    AdaptiveDyadic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// Nodes per panel and direction.
    pub resolution: usize,
    /// Radius at which integrals over all of space are cut off.
    pub truncation_radius: f64,
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { scheme: Scheme::GaussLegendre, resolution: 32, truncation_radius: 16.0, tolerance: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn gauss(resolution: usize) -> Self {
        Self { resolution, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 8 {
            return Err(Error::InvalidQuadrature("resolution must be at least 8".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidQuadrature("tolerance must be positive".into()));
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::InvalidQuadrature("truncation radius must be positive".into()));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        Self { resolution: 2 * self.resolution, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ball(Ball),
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Region::Ball(Ball::new(center, radius))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball(b) => b.contains(x),
            Region::Annulus { center, inner, outer } => {
                let r = crate::geometry::distance(center, x);
                *inner <= r && r <= *outer
            }
            Region::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l <= v && v <= u)
            }
        }
    }

    fn dimension(&self) -> usize {
        match self {
            Region::Ball(b) => b.center.len(),
            Region::Annulus { center, .. } => center.len(),
            Region::Box { lower, .. } => lower.len(),
        }
    }
}

struct Rules {
    scheme: Scheme,
    resolution: usize,
    gauss: GaussLegendre,
}

impl Rules {
    fn new(q: &QuadratureSpec) -> Self {
        let n = match q.scheme {
            Scheme::AdaptiveDyadic => (q.resolution / 2).max(8),
            _ => q.resolution,
        };
        Self { scheme: q.scheme, resolution: q.resolution, gauss: GaussLegendre::new(n) }
    }

    /// Nodes and weights on `[a, b]`. `near` holds, for each endpoint, the
    /// distance to the closest singularity of the integrand beyond it.
    fn nodes(&self, a: f64, b: f64, near: (Option<f64>, Option<f64>), out: &mut Vec<(f64, f64)>) {
        if !(b > a) {
            return;
        }
        match self.scheme {
            Scheme::Midpoint => {
                let h = (b - a) / self.resolution as f64;
                out.extend((0..self.resolution).map(|i| (a + (i as f64 + 0.5) * h, h)));
            }
            Scheme::GaussLegendre => out.extend(self.gauss.mapped(a, b)),
            Scheme::AdaptiveDyadic => {
                let len = b - a;
                let close = |d: Option<f64>| d.is_some_and(|d| d < len);
                match (close(near.0), close(near.1)) {
                    (false, false) => out.extend(self.gauss.mapped(a, b)),
                    (true, true) => {
                        let mid = 0.5 * (a + b);
                        self.nodes(a, mid, (near.0, None), out);
                        self.nodes(mid, b, (None, near.1), out);
                    }
                    (left, _) => {
                        const LEVELS: usize = 48;
                        let d = if left { near.0 } else { near.1 }.unwrap_or(0.0);
                        let mut hi = 1.0;
                        for _ in 0..LEVELS {
                            if hi * len <= d {
                                break;
                            }
                            let lo = 0.5 * hi;
                            let (s, t) = if left { (a + lo * len, a + hi * len) } else { (b - hi * len, b - lo * len) };
                            out.extend(self.gauss.mapped(s, t));
                            hi = lo;
                        }
                        let (s, t) = if left { (a, a + hi * len) } else { (b - hi * len, b) };
                        out.extend(self.gauss.mapped(s, t));
                    }
                }
            }
        }
    }
}

fn sample<F>(m: &WeightedMeasure, f: &mut F, x: &[f64]) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let w = m.weight(x);
    if w == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let v = f(x);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    Ok(v * w)
}

/// `int_region f dw`.
pub fn integrate<F>(m: &WeightedMeasure, mut f: F, region: &Region, q: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    visit_nodes(m, region, q, &mut |x, w| {
        total += sample(m, &mut f, x)? * w;
        Ok(())
    })?;
    Ok(total)
}

fn visit_nodes(m: &WeightedMeasure, region: &Region, q: &QuadratureSpec, visit: &mut Visitor<'_>) -> Result<()> {
    q.validate()?;
    let n = m.dimension();
    if region.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, found: region.dimension() });
    }
    let rules = Rules::new(q);
    match region {
        Region::Ball(b) => polar(m, visit, &b.center, 0.0, b.radius, &rules),
        Region::Annulus { center, inner, outer } => polar(m, visit, center, *inner, *outer, &rules),
        Region::Box { lower, upper } => boxed(m, visit, lower, upper, &rules),
    }
}

/// Quadrature nodes for `dw` on `region`, with the weight folded into the
/// node weights. Nodes where the weight vanishes are dropped.
pub fn quadrature_nodes(m: &WeightedMeasure, region: &Region, q: &QuadratureSpec) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut out = Vec::new();
    visit_nodes(m, region, q, &mut |x, w| {
        let d = m.weight(x);
        if d != 0.0 {
            out.push((x.to_vec(), w * d));
        }
        Ok(())
    })?;
    Ok(out)
}

/// `int f dw` over all of space, cut off at the truncation radius and checked
/// against the integral over twice that radius.
pub fn integrate_whole_space<F>(m: &WeightedMeasure, mut f: F, q: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let origin = vec![0.0; m.dimension()];
    let r = q.truncation_radius;
    let inner = integrate(m, &mut f, &Region::ball(origin.clone(), r), q)?;
    let shell = integrate(m, &mut f, &Region::Annulus { center: origin, inner: r, outer: 2.0 * r }, q)?;
    let total = inner + shell;
    let delta = shell.norm();
    if delta > q.tolerance * total.norm().max(1.0) {
        return Err(Error::TruncationNotConverged { delta });
    }
    Ok(total)
}

type Visitor<'a> = dyn FnMut(&[f64], f64) -> Result<()> + 'a;

fn polar(m: &WeightedMeasure, visit: &mut Visitor<'_>, c: &[f64], lo: f64, hi: f64, rules: &Rules) -> Result<()> {
    let n = m.dimension();
    if !(hi > lo) || lo < 0.0 {
        return Ok(());
    }
    let rs = m.root_system();
    let positive: Vec<&Vec<f64>> = rs
        .positive_roots()
        .iter()
        .filter(|&&i| rs.multiplicity(i) != 0.0)
        .map(|&i| &rs.roots()[i])
        .collect();
    let directions = directions(n, c, lo, hi, &positive, rules);
    let mut radial = Vec::new();
    let mut x = vec![0.0; n];
    for (u, dw) in directions {
        let mut crossings = Vec::new();
        for alpha in &positive {
            let ua = dot(&u, alpha);
            if ua != 0.0 {
                crossings.push(-dot(c, alpha) / ua);
            }
        }
        let mut breaks = vec![lo, hi];
        breaks.extend(crossings.iter().copied().filter(|&r| r > lo && r < hi));
        breaks.sort_by(f64::total_cmp);
        radial.clear();
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let left = crossings.iter().filter(|&&r| r <= a + 1e-14 * (1.0 + a)).map(|r| (a - r).max(0.0)).reduce(f64::min);
            let right = crossings.iter().filter(|&&r| r >= b - 1e-14 * (1.0 + b)).map(|r| (r - b).max(0.0)).reduce(f64::min);
            rules.nodes(a, b, (left, right), &mut radial);
        }
        for &(rho, w) in &radial {
            for i in 0..n {
                x[i] = c[i] + rho * u[i];
            }
            visit(&x, w * libm::pow(rho, (n - 1) as f64) * dw)?;
        }
    }
    Ok(())
}

/// Unit directions with surface weights.
fn directions(n: usize, c: &[f64], lo: f64, hi: f64, positive: &[&Vec<f64>], rules: &Rules) -> Vec<(Vec<f64>, f64)> {
    match n {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let mut breaks = vec![0.0, 2.0 * PI];
            let mut push = |t: f64| {
                let t = libm::fmod(libm::fmod(t, 2.0 * PI) + 2.0 * PI, 2.0 * PI);
                breaks.push(t);
            };
            for alpha in positive {
                let phi = libm::atan2(alpha[1], alpha[0]);
                let an = libm::sqrt(dot(alpha, alpha));
                push(phi + 0.5 * PI);
                push(phi - 0.5 * PI);
                for rho in [lo, hi] {
                    if rho > 0.0 {
                        let s = -dot(c, alpha) / (rho * an);
                        if s.abs() < 1.0 {
                            let d = libm::acos(s);
                            push(phi + d);
                            push(phi - d);
                        }
                    }
                }
            }
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let mut nodes = Vec::new();
            for pair in breaks.windows(2) {
                rules.nodes(pair[0], pair[1], (Some(0.0), Some(0.0)), &mut nodes);
            }
            nodes
                .into_iter()
                .map(|(t, w)| (vec![libm::cos(t), libm::sin(t)], w))
                .collect()
        }
        _ => {
            // product rule on the sphere: Gauss in cos(polar angle), uniform in azimuth
            let mut cos_nodes = Vec::new();
            rules.nodes(-1.0, 0.0, (None, None), &mut cos_nodes);
            rules.nodes(0.0, 1.0, (None, None), &mut cos_nodes);
            let az = 2 * rules.resolution;
            let h = 2.0 * PI / az as f64;
            let mut out = Vec::with_capacity(cos_nodes.len() * az);
            for &(t, wt) in &cos_nodes {
                let s = libm::sqrt((1.0 - t * t).max(0.0));
                for j in 0..az {
                    let phi = (j as f64 + 0.5) * h;
                    let mut u = vec![0.0; n];
                    u[0] = s * libm::cos(phi);
                    u[1] = s * libm::sin(phi);
                    u[2] = t;
                    out.push((u, wt * h));
                }
            }
            out
        }
    }
}

fn boxed(m: &WeightedMeasure, visit: &mut Visitor<'_>, lower: &[f64], upper: &[f64], rules: &Rules) -> Result<()> {
    let n = m.dimension();
    let axes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            let (a, b) = (lower[i], upper[i]);
            let mut nodes = Vec::new();
            if a < 0.0 && b > 0.0 {
                rules.nodes(a, 0.0, (None, Some(0.0)), &mut nodes);
                rules.nodes(0.0, b, (Some(0.0), None), &mut nodes);
            } else {
                let (l, r) = if b <= 0.0 { (None, Some(-b)) } else { (Some(a), None) };
                rules.nodes(a, b, (l, r), &mut nodes);
            }
            nodes
        })
        .collect();
    if axes.iter().any(|a| a.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for i in 0..n {
            let (xi, wi) = axes[i][idx[i]];
            x[i] = xi;
            w *= wi;
        }
        visit(&x, w)?;
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                return Ok(());
            }
        }
    }
}

/// `w(B(x, r))`.
pub fn ball_volume(m: &WeightedMeasure, x: &[f64], r: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("ball radius must be positive".into()));
    }
    if m.dimension() == 1 {
        if x.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: x.len() });
        }
        let k = m.homogeneous_dimension() - 1.0;
        let c = m.weight(&[1.0]) / (k + 1.0);
        let prim = |t: f64| libm::copysign(libm::pow(t.abs(), k + 1.0), t);
        return Ok(c * (prim(x[0] + r) - prim(x[0] - r)));
    }
    Ok(integrate(m, |_| Complex64::new(1.0, 0.0), &Region::ball(x.to_vec(), r), q)?.re)
}

/// Extremes of `w(B(x, r)) / (r^N prod_alpha (|<x, alpha>| + r)^{k(alpha)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeRatioReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

pub fn check_volume_asymptotics(
    m: &WeightedMeasure,
    samples: &[(Vec<f64>, f64)],
    q: &QuadratureSpec,
) -> Result<VolumeRatioReport> {
    let rs = m.root_system();
    let n = m.dimension() as f64;
    let mut report = VolumeRatioReport { min_ratio: f64::INFINITY, max_ratio: 0.0, samples: samples.len() };
    for (x, r) in samples {
        let vol = ball_volume(m, x, *r, q)?;
        let mut model = libm::pow(*r, n);
        for (alpha, &k) in rs.roots().iter().zip(rs.multiplicities()) {
            model *= libm::pow(dot(alpha, x).abs() + r, k);
        }
        let ratio = vol / model;
        report.min_ratio = report.min_ratio.min(ratio);
        report.max_ratio = report.max_ratio.max(ratio);
    }
    Ok(report)
}

/// `(ratio / (r2/r1)^N, ratio / (r2/r1)^𝐍)` with `ratio = w(B(x,r2)) / w(B(x,r1))`.
pub fn check_growth(m: &WeightedMeasure, x: &[f64], r1: f64, r2: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(r2 >= r1 && r1 > 0.0) {
        return Err(Error::InvalidArgument("growth check needs r2 >= r1 > 0".into()));
    }
    if r1 == r2 {
        return Ok((1.0, 1.0));
    }
    let ratio = ball_volume(m, x, r2, q)? / ball_volume(m, x, r1, q)?;
    let s = r2 / r1;
    Ok((
        ratio / libm::pow(s, m.dimension() as f64),
        ratio / libm::pow(s, m.homogeneous_dimension()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank1(k: f64) -> WeightedMeasure {
        WeightedMeasure::new(RootSystem::rank1(k).unwrap())
    }

    #[test]
    fn weight_examples() {
        let m = rank1(1.0);
        assert!((m.weight(&[1.5]) - 2.0 * 2.25).abs() < 1e-14);
        assert_eq!(m.homogeneous_dimension(), 3.0);
        assert_eq!(rank1(0.0).weight(&[3.0]), 1.0);
        let p = WeightedMeasure::new(RootSystem::product(&[1.0, 1.0]).unwrap());
        assert!((p.weight(&[1.0, 2.0]) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn rank1_ball_volume_closed_form() {
        let m = rank1(1.0);
        for scheme in [Scheme::GaussLegendre, Scheme::AdaptiveDyadic] {
            let q = QuadratureSpec { scheme, ..QuadratureSpec::gauss(16) };
            for r in [0.25, 1.0, 3.0] {
                let v = ball_volume(&m, &[0.0], r, &q).unwrap();
                assert!((v - 4.0 / 3.0 * r * r * r).abs() < 1e-12 * r * r * r);
            }
        }
        let v = ball_volume(&rank1(0.0), &[5.0], 0.7, &QuadratureSpec::gauss(8)).unwrap();
        assert!((v - 1.4).abs() < 1e-14);
    }

    #[test]
    fn off_centre_ball_crossing_the_wall() {
        // int_{-0.5}^{2.5} 2 x^2 dx
        let m = rank1(1.0);
        let v = ball_volume(&m, &[1.0], 1.5, &QuadratureSpec::gauss(8)).unwrap();
        let exact = 2.0 / 3.0 * (2.5f64.powi(3) + 0.5f64.powi(3));
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn fractional_multiplicity_graded_rule() {
        // int_{-1}^{1} 2^k |x|^{2k} dx = 2^{k+1} / (2k+1)
        let k = 0.3;
        let m = rank1(k);
        let q = QuadratureSpec { scheme: Scheme::AdaptiveDyadic, ..QuadratureSpec::gauss(16) };
        let v = ball_volume(&m, &[0.2], 1.2, &q).unwrap();
        let anti = |x: f64| libm::pow(2.0, k) * libm::pow(x.abs(), 2.0 * k + 1.0) / (2.0 * k + 1.0);
        let exact = anti(1.4) + anti(-1.0);
        assert!((v - exact).abs() < 1e-12, "{v} {exact}");
    }

    #[test]
    fn planar_product_ball() {
        // k = (1, 1): w = 4 x^2 y^2; int over unit disc = 4 * pi / 24
        let m = WeightedMeasure::new(RootSystem::product(&[1.0, 1.0]).unwrap());
        let v = ball_volume(&m, &[0.0, 0.0], 1.0, &QuadratureSpec::gauss(16)).unwrap();
        assert!((v - PI / 6.0).abs() < 1e-12, "{v}");
        // unit box [0,1]^2: 4/9
        let b = integrate(&m, |_| Complex64::new(1.0, 0.0), &Region::Box { lower: vec![0.0, 0.0], upper: vec![1.0, 1.0] }, &QuadratureSpec::gauss(8)).unwrap();
        assert!((b.re - 4.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let m = rank1(1.0);
        let v = integrate(&m, |x| Complex64::new(x[0], 0.0), &Region::ball(vec![0.0], 1.0), &QuadratureSpec::gauss(16)).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn whole_space_gaussian() {
        // int e^{-x^2/2} 2|x|^2 dx = 2 sqrt(2 pi)
        let m = rank1(1.0);
        let q = QuadratureSpec { resolution: 48, truncation_radius: 12.0, ..QuadratureSpec::default() };
        let v = integrate_whole_space(&m, |x| Complex64::new(libm::exp(-0.5 * x[0] * x[0]), 0.0), &q).unwrap();
        assert!((v.re - 2.0 * libm::sqrt(2.0 * PI)).abs() < 1e-10);
        let short = QuadratureSpec { truncation_radius: 1.0, ..q };
        assert!(matches!(
            integrate_whole_space(&m, |x| Complex64::new(libm::exp(-0.5 * x[0] * x[0]), 0.0), &short),
            Err(Error::TruncationNotConverged { .. })
        ));
    }

    #[test]
    fn non_finite_samples_are_errors() {
        let m = rank1(0.0);
        let r = integrate(&m, |x| Complex64::new(1.0 / (x[0] - 0.3), 0.0), &Region::ball(vec![0.3], 0.5), &QuadratureSpec { scheme: Scheme::Midpoint, resolution: 10, ..QuadratureSpec::default() });
        assert!(r.is_ok());
        let r = integrate(&m, |_| Complex64::new(f64::NAN, 0.0), &Region::ball(vec![0.3], 0.5), &QuadratureSpec::gauss(8));
        assert_eq!(r, Err(Error::NonFiniteSample));
    }

    #[test]
    fn growth_and_asymptotics() {
        let m = rank1(1.0);
        let q = QuadratureSpec::gauss(16);
        let (a, b) = check_growth(&m, &[0.0], 0.5, 2.0, &q).unwrap();
        assert!((b - 1.0).abs() < 1e-12 && a > 1.0);
        assert_eq!(check_growth(&m, &[1.0], 1.0, 1.0, &q).unwrap(), (1.0, 1.0));
        let rep = check_volume_asymptotics(&m, &[(vec![0.0], 0.7)], &q).unwrap();
        assert!((rep.min_ratio - 4.0 / 3.0).abs() < 1e-12);
        let flat = check_volume_asymptotics(&rank1(0.0), &[(vec![3.0], 0.2), (vec![-1.0], 5.0)], &q).unwrap();
        assert!((flat.min_ratio - 2.0).abs() < 1e-13 && (flat.max_ratio - 2.0).abs() < 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::gauss(4).validate().is_err());
        let q = QuadratureSpec { tolerance: 0.0, ..QuadratureSpec::default() };
        assert!(q.validate().is_err());
    }
}
