//! Means, maximal functions, `L^p` norms and BMO estimates over discrete,
//! refinable ball families.
//!
//! BMO suprema over all balls are replaced by maxima over a lattice family.
//! Refining the family keeps every previous ball, so each estimate is a lower
//! bound that can only grow, and the growth on the last refinement is
//! reported next to it.

use crate::error::{Error, Result};
use crate::geometry::{distance, norm, Ball, CoxeterGroup};
use crate::measure::{quadrature_nodes, QuadratureSpec, Region, WeightedMeasure};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A ball, or a union of balls such as a `G`-orbit `O(B)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Set {
    Ball(Ball),
    Union(Vec<Ball>),
}

impl Set {
    pub fn orbit(g: &CoxeterGroup, ball: &Ball) -> Self {
        Set::Union(g.orbit_ball(ball))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Set::Ball(b) => b.contains(x),
            Set::Union(bs) => bs.iter().any(|b| b.contains(x)),
        }
    }
}

/// Quadrature nodes for `dw` restricted to `e`. Overlapping balls of a union
/// share their nodes through the covering multiplicity, except on the line
/// where unions of intervals are merged exactly.
pub fn set_nodes(m: &WeightedMeasure, e: &Set, q: &QuadratureSpec) -> Result<Vec<(Vec<f64>, f64)>> {
    let nodes = match e {
        Set::Ball(b) => quadrature_nodes(m, &Region::Ball(b.clone()), q)?,
        Set::Union(bs) if m.dimension() == 1 => {
            let mut iv: Vec<(f64, f64)> = bs.iter().map(|b| (b.center[0] - b.radius, b.center[0] + b.radius)).collect();
            iv.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut merged: Vec<(f64, f64)> = Vec::new();
            for (a, b) in iv {
                match merged.last_mut() {
                    Some(last) if a <= last.1 => last.1 = last.1.max(b),
                    _ => merged.push((a, b)),
                }
            }
            let mut out = Vec::new();
            for (a, b) in merged {
                out.extend(quadrature_nodes(m, &Region::Box { lower: vec![a], upper: vec![b] }, q)?);
            }
            out
        }
        Set::Union(bs) => {
            let mut distinct: Vec<&Ball> = Vec::new();
            for b in bs {
                if !distinct.iter().any(|d| d.radius == b.radius && distance(&d.center, &b.center) < 1e-12) {
                    distinct.push(b);
                }
            }
            let mut out = Vec::new();
            for b in &distinct {
                for (x, w) in quadrature_nodes(m, &Region::Ball((*b).clone()), q)? {
                    let cover = distinct.iter().filter(|d| d.contains(&x)).count().max(1);
                    out.push((x, w / cover as f64));
                }
            }
            out
        }
    };
    let mass: f64 = nodes.iter().map(|n| n.1).sum();
    if !(mass > 0.0) {
        return Err(Error::DegenerateSet);
    }
    Ok(nodes)
}

fn mass(nodes: &[(Vec<f64>, f64)]) -> f64 {
    nodes.iter().map(|n| n.1).sum()
}

/// `f_E = w(E)^{-1} int_E f dw`.
pub fn mean_on_set<F>(m: &WeightedMeasure, mut f: F, e: &Set, q: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let nodes = set_nodes(m, e, q)?;
    let total: Complex64 = nodes.iter().map(|(x, w)| f(x) * *w).sum();
    Ok(total / mass(&nodes))
}

/// Balls `B(c, 2^j r0)` with centres on `pitch Z^N` inside `[-extent, extent]^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPolicy {
    pub extent: f64,
    pub pitch: f64,
    pub r0: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for FamilyPolicy {
    fn default() -> Self {
        Self { extent: 4.0, pitch: 0.25, r0: 0.125, j_min: -6, j_max: 6 }
    }
}

impl FamilyPolicy {
    /// Halves the pitch and widens the radius range by one step on each side.
    pub fn refined(&self) -> Self {
        Self { pitch: 0.5 * self.pitch, j_min: self.j_min - 1, j_max: self.j_max + 1, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallFamily {
    centers: Vec<Vec<f64>>,
    radii: Vec<f64>,
    policy: Option<FamilyPolicy>,
}

impl BallFamily {
    pub fn lattice(dimension: usize, policy: FamilyPolicy) -> Result<Self> {
        if !(policy.pitch > 0.0 && policy.r0 > 0.0 && policy.extent >= 0.0) || policy.j_min > policy.j_max {
            return Err(Error::InvalidArgument("invalid ball family policy".into()));
        }
        let steps = libm::floor(policy.extent / policy.pitch + 1e-9) as i64;
        let side: Vec<f64> = (-steps..=steps).map(|i| i as f64 * policy.pitch).collect();
        let mut centers = vec![Vec::new()];
        for _ in 0..dimension {
            centers = centers
                .into_iter()
                .flat_map(|c: Vec<f64>| {
                    side.iter().map(move |&s| {
                        let mut c = c.clone();
                        c.push(s);
                        c
                    })
                })
                .collect();
        }
        let radii = (policy.j_min..=policy.j_max).map(|j| libm::ldexp(policy.r0, j)).collect();
        Ok(Self { centers, radii, policy: Some(policy) })
    }

    pub fn custom(centers: Vec<Vec<f64>>, radii: Vec<f64>) -> Result<Self> {
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidArgument("ball radii must be positive".into()));
        }
        Ok(Self { centers, radii, policy: None })
    }

    pub fn policy(&self) -> Option<FamilyPolicy> {
        self.policy
    }

    /// The lattice family with the refined policy; custom families are returned unchanged.
    pub fn refined(&self) -> Result<Self> {
        match self.policy {
            Some(p) => Self::lattice(self.centers.first().map_or(0, Vec::len), p.refined()),
            None => Ok(self.clone()),
        }
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn balls(&self) -> impl Iterator<Item = Ball> + '_ {
        self.centers.iter().flat_map(move |c| self.radii.iter().map(move |&r| Ball::new(c.clone(), r)))
    }

    pub fn containing<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = Ball> + 'a {
        self.balls().filter(move |b| b.contains(x))
    }
}

/// Uncentred maximal function `sup_{B ∋ x} |f|_B` over the family.
pub fn maximal_function<F>(m: &WeightedMeasure, mut f: F, x: &[f64], family: &BallFamily, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let mut best: Option<f64> = None;
    for b in family.containing(x) {
        let v = mean_on_set(m, |y| Complex64::new(f(y).norm(), 0.0), &Set::Ball(b), q)?.re;
        best = Some(best.map_or(v, |c| c.max(v)));
    }
    best.ok_or(Error::UncoveredPoint)
}

/// `inf_c w(B)^{-1} int_B |g - c| dw` by golden-section search on `[min g, max g]`.
pub fn best_constant_oscillation(values: &[(f64, f64)]) -> f64 {
    let total: f64 = values.iter().map(|v| v.1).sum();
    let objective = |c: f64| values.iter().map(|(g, w)| (g - c).abs() * w).sum::<f64>() / total;
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.0), b.max(v.0)));
    if !(hi > lo) {
        return 0.0;
    }
    let mean = values.iter().map(|(g, w)| g * w).sum::<f64>() / total;
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (objective(a), objective(b));
    for _ in 0..90 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = objective(b);
        }
    }
    fa.min(fb).min(objective(mean))
}

/// `g^#(x) = sup_{B ∋ x} inf_c |g - c|_B` over the family.
pub fn sharp_maximal<F>(m: &WeightedMeasure, mut g: F, x: &[f64], family: &BallFamily, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best: Option<f64> = None;
    for b in family.containing(x) {
        let values: Vec<(f64, f64)> = set_nodes(m, &Set::Ball(b), q)?.into_iter().map(|(y, w)| (g(&y), w)).collect();
        let v = best_constant_oscillation(&values);
        best = Some(best.map_or(v, |c| c.max(v)));
    }
    best.ok_or(Error::UncoveredPoint)
}

/// `(int_region |f|^p dw)^{1/p}`.
pub fn lp_norm<F>(m: &WeightedMeasure, mut f: F, p: f64, region: &Region, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(&[f64]) -> Complex64,
{
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument("p must lie in (1, inf)".into()));
    }
    let s: f64 = quadrature_nodes(m, region, q)?.iter().map(|(x, w)| libm::pow(f(x).norm(), p) * w).sum();
    Ok(libm::pow(s, 1.0 / p))
}

/// Mean and mean oscillation `|b - b_E|_E` of a real function.
pub fn oscillation<F>(m: &WeightedMeasure, mut b: F, e: &Set, q: &QuadratureSpec) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    let nodes = set_nodes(m, e, q)?;
    let values: Vec<(f64, f64)> = nodes.iter().map(|(x, w)| (b(x), *w)).collect();
    let total = mass(&nodes);
    let mean = values.iter().map(|(v, w)| v * w).sum::<f64>() / total;
    let osc = values.iter().map(|(v, w)| (v - mean).abs() * w).sum::<f64>() / total;
    Ok((mean, osc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallOscillation {
    pub ball: Ball,
    pub oscillation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmoReport {
    pub norm_estimate: f64,
    pub argmax: Option<Ball>,
    /// Oscillations over the final family, in family order.
    pub table: Vec<BallOscillation>,
    /// Growth of the estimate on the last refinement.
    pub refinement_delta: f64,
    /// Estimate after each round, starting with the unrefined family.
    pub history: Vec<f64>,
    pub policy: Option<FamilyPolicy>,
}

fn bmo_over<F, S>(
    m: &WeightedMeasure,
    mut b: F,
    family: &BallFamily,
    rounds: usize,
    q: &QuadratureSpec,
    set_of: S,
) -> Result<BmoReport>
where
    F: FnMut(&[f64]) -> f64,
    S: Fn(&Ball) -> Set,
{
    let mut fam = family.clone();
    let mut history = Vec::with_capacity(rounds + 1);
    let mut table = Vec::new();
    for round in 0..=rounds {
        if round > 0 {
            fam = fam.refined()?;
        }
        table.clear();
        for ball in fam.balls() {
            let (_, osc) = oscillation(m, &mut b, &set_of(&ball), q)?;
            table.push(BallOscillation { ball, oscillation: osc });
        }
        history.push(table.iter().map(|t| t.oscillation).fold(0.0, f64::max));
    }
    let argmax = table
        .iter()
        .fold(None::<&BallOscillation>, |best, t| match best {
            Some(b) if b.oscillation >= t.oscillation => Some(b),
            _ => Some(t),
        })
        .map(|t| t.ball.clone());
    let n = history.len();
    Ok(BmoReport {
        norm_estimate: history[n - 1],
        argmax,
        table,
        refinement_delta: if n > 1 { (history[n - 1] - history[n - 2]).max(0.0) } else { 0.0 },
        history,
        policy: fam.policy(),
    })
}

/// Lower estimate of `sup_B |b - b_B|_B`.
pub fn bmo_norm<F>(m: &WeightedMeasure, b: F, family: &BallFamily, rounds: usize, q: &QuadratureSpec) -> Result<BmoReport>
where
    F: FnMut(&[f64]) -> f64,
{
    bmo_over(m, b, family, rounds, q, |ball| Set::Ball(ball.clone()))
}

/// Lower estimate of `sup_B |b - b_{O(B)}|_{O(B)}`.
pub fn bmo_d_norm<F>(
    g: &CoxeterGroup,
    m: &WeightedMeasure,
    b: F,
    family: &BallFamily,
    rounds: usize,
    q: &QuadratureSpec,
) -> Result<BmoReport>
where
    F: FnMut(&[f64]) -> f64,
{
    bmo_over(m, b, family, rounds, q, |ball| Set::orbit(g, ball))
}

/// One sample for the four inequalities of the logarithmic lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct JohnNirenbergSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: f64,
    pub r1: f64,
    /// Index of `sigma` in the group.
    pub sigma: usize,
    pub j: u32,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JohnNirenbergInequality {
    /// `|b_{B(x,r)} - b_{B(x,r1)}| <= C log(r1/r) |b|`.
    RadiusChange,
    /// `|b_{B(x,r)} - b_{B(y,r)}| <= C |b|` when `|x - y| <= 2r`.
    NearbyCentres,
    /// `|b_{B(x,r)} - b_{B(sigma x,r)}| <= C log(|sigma x - x|/r + 4) |b|`.
    Reflected,
    /// `(|b - b_{B(x,r)}|^s)_{B(x,2^j r)}^{1/s} <= C_s j |b|`.
    JohnNirenberg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohnNirenbergRow {
    pub inequality: JohnNirenbergInequality,
    pub sample: usize,
    pub lhs: f64,
    /// Right-hand side without the constant.
    pub shape: f64,
    pub implied_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohnNirenbergTable {
    pub bmo_norm: f64,
    pub rows: Vec<JohnNirenbergRow>,
}

impl JohnNirenbergTable {
    pub fn max_constant(&self, which: JohnNirenbergInequality) -> Option<f64> {
        self.rows.iter().filter(|r| r.inequality == which).map(|r| r.implied_constant).reduce(f64::max)
    }
}

/// Implied constants `lhs / shape` of the logarithmic lemma for a function
/// with BMO norm (estimate) `bmo`.
pub fn john_nirenberg_suite<F>(
    m: &WeightedMeasure,
    g: &CoxeterGroup,
    mut b: F,
    bmo: f64,
    samples: &[JohnNirenbergSample],
    q: &QuadratureSpec,
) -> Result<JohnNirenbergTable>
where
    F: FnMut(&[f64]) -> f64,
{
    use JohnNirenbergInequality::*;
    if !(bmo > 0.0) {
        return Err(Error::InvalidArgument("the BMO norm must be positive".into()));
    }
    let mut rows = Vec::new();
    let mean = |c: &[f64], r: f64, b: &mut F| -> Result<f64> {
        let nodes = set_nodes(m, &Set::Ball(Ball::new(c.to_vec(), r)), q)?;
        Ok(nodes.iter().map(|(y, w)| b(y) * w).sum::<f64>() / mass(&nodes))
    };
    let ratio = |lhs: f64, shape: f64| if lhs == 0.0 { 0.0 } else { lhs / (shape * bmo) };
    for (i, s) in samples.iter().enumerate() {
        if !(s.r1 >= s.r && s.r > 0.0) || s.j == 0 || !(s.s >= 1.0) || s.sigma >= g.order() {
            return Err(Error::InvalidArgument(alloc::format!("sample {i} is out of range")));
        }
        let bx = mean(&s.x, s.r, &mut b)?;
        let lhs = (bx - mean(&s.x, s.r1, &mut b)?).abs();
        let shape = libm::log(s.r1 / s.r);
        rows.push(JohnNirenbergRow { inequality: RadiusChange, sample: i, lhs, shape, implied_constant: ratio(lhs, shape) });
        if distance(&s.x, &s.y) <= 2.0 * s.r {
            let lhs = (bx - mean(&s.y, s.r, &mut b)?).abs();
            rows.push(JohnNirenbergRow { inequality: NearbyCentres, sample: i, lhs, shape: 1.0, implied_constant: ratio(lhs, 1.0) });
        }
        let sx = g.apply(s.sigma, &s.x);
        let lhs = (bx - mean(&sx, s.r, &mut b)?).abs();
        let shape = libm::log(distance(&sx, &s.x) / s.r + 4.0);
        rows.push(JohnNirenbergRow { inequality: Reflected, sample: i, lhs, shape, implied_constant: ratio(lhs, shape) });
        let big = Set::Ball(Ball::new(s.x.clone(), libm::ldexp(s.r, s.j as i32)));
        let nodes = set_nodes(m, &big, q)?;
        let acc: f64 = nodes.iter().map(|(y, w)| libm::pow((b(y) - bx).abs(), s.s) * w).sum();
        let lhs = libm::pow(acc / mass(&nodes), 1.0 / s.s);
        let shape = s.j as f64;
        rows.push(JohnNirenbergRow { inequality: JohnNirenberg, sample: i, lhs, shape, implied_constant: ratio(lhs, shape) });
    }
    Ok(JohnNirenbergTable { bmo_norm: bmo, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `h max(0, 1 - |x - c|/rho)`.
    Tent,
    /// `h (1 - |x - c|^2/rho^2)^2` inside the ball.
    Bump,
    /// `h` on `B(c, rho)`, decreasing linearly to 0 at `|x - c| = outer`.
    Plateau,
}

/// A compactly supported Lipschitz function with support radius `r_b` about
/// the origin and Lipschitz constant `l_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzWitness {
    pub kind: WitnessKind,
    pub center: Vec<f64>,
    pub height: f64,
    pub rho: f64,
    pub outer: f64,
    pub r_b: f64,
    pub l_b: f64,
    pub g_invariant: bool,
}

impl LipschitzWitness {
    pub fn new(kind: WitnessKind, center: Vec<f64>, height: f64, rho: f64, outer: f64) -> Result<Self> {
        if !(rho > 0.0) || (kind == WitnessKind::Plateau && !(outer > rho)) {
            return Err(Error::InvalidArgument("witness radii must be positive and increasing".into()));
        }
        let reach = if kind == WitnessKind::Plateau { outer } else { rho };
        let l_b = height.abs()
            * match kind {
                WitnessKind::Tent => 1.0 / rho,
                WitnessKind::Bump => 8.0 / (3.0 * libm::sqrt(3.0) * rho),
                WitnessKind::Plateau => 1.0 / (outer - rho),
            };
        let g_invariant = norm(&center) == 0.0;
        Ok(Self { kind, r_b: norm(&center) + reach, center, height, rho, outer: reach, l_b, g_invariant })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = distance(x, &self.center);
        self.height
            * match self.kind {
                WitnessKind::Tent => (1.0 - d / self.rho).max(0.0),
                WitnessKind::Bump => {
                    let t = d / self.rho;
                    if t < 1.0 {
                        (1.0 - t * t) * (1.0 - t * t)
                    } else {
                        0.0
                    }
                }
                WitnessKind::Plateau => ((self.outer - d) / (self.outer - self.rho)).clamp(0.0, 1.0),
            }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { height: self.height * s, l_b: self.l_b * s.abs(), ..self.clone() }
    }
}

/// Deterministic mixture of tents, bumps and plateaus. The first member is
/// the unit tent at the origin and the second an off-centre bump.
pub fn lipschitz_family(dimension: usize, seed: u64, count: usize) -> Vec<LipschitzWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let w = match i {
            0 => LipschitzWitness::new(WitnessKind::Tent, vec![0.0; dimension], 1.0, 1.0, 1.0),
            1 => {
                let mut c = vec![0.0; dimension];
                c[0] = 0.75;
                LipschitzWitness::new(WitnessKind::Bump, c, 1.0, 1.0, 1.0)
            }
            _ => {
                let centred = rng.gen_bool(1.0 / 3.0);
                let c: Vec<f64> = (0..dimension).map(|_| if centred { 0.0 } else { rng.gen_range(-1.5..1.5) }).collect();
                let h = rng.gen_range(0.5..2.0);
                let rho = rng.gen_range(0.5..2.0);
                let kind = [WitnessKind::Tent, WitnessKind::Bump, WitnessKind::Plateau][i % 3];
                LipschitzWitness::new(kind, c, h, rho, rho + rng.gen_range(0.25..1.5))
            }
        };
        out.push(w.expect("generated radii are positive"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RootSystem;

    fn rank1(k: f64) -> WeightedMeasure {
        WeightedMeasure::new(RootSystem::rank1(k).unwrap())
    }

    #[test]
    fn means_of_simple_functions() {
        let m = rank1(1.0);
        let q = QuadratureSpec::gauss(16);
        let e = Set::Ball(Ball::new(vec![0.0], 1.0));
        assert!((mean_on_set(&m, |_| Complex64::new(3.0, 0.0), &e, &q).unwrap().re - 3.0).abs() < 1e-14);
        assert!(mean_on_set(&m, |x| Complex64::new(x[0], 0.0), &e, &q).unwrap().norm() < 1e-15);
        let ind = |x: &[f64]| Complex64::new(if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }, 0.0);
        let n = lp_norm(&m, ind, 3.0, &Region::ball(vec![0.0], 1.0), &q).unwrap();
        assert!((n - libm::pow(4.0 / 3.0, 1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn orbit_sets_merge_on_the_line() {
        let m = rank1(0.5);
        let q = QuadratureSpec::gauss(16);
        let g = crate::geometry::generate_group(m.root_system()).unwrap();
        let e = Set::orbit(&g, &Ball::new(vec![0.5], 1.0));
        let nodes = set_nodes(&m, &e, &q).unwrap();
        // [-1.5, 1.5] with density 2^{1/2} |x|
        assert!((mass(&nodes) - libm::sqrt(2.0) * 2.25).abs() < 1e-12);
    }

    #[test]
    fn sharp_maximal_of_constants_vanishes() {
        let m = rank1(1.0);
        let q = QuadratureSpec::gauss(16);
        let fam = BallFamily::lattice(1, FamilyPolicy { extent: 1.0, pitch: 0.5, r0: 0.25, j_min: 0, j_max: 2 }).unwrap();
        assert_eq!(sharp_maximal(&m, |_| 2.5, &[0.1], &fam, &q).unwrap(), 0.0);
        assert_eq!(sharp_maximal(&m, |_| 2.5, &[9.0], &fam, &q), Err(Error::UncoveredPoint));
        let v = sharp_maximal(&m, |x| x[0], &[0.1], &fam, &q).unwrap();
        let w = sharp_maximal(&m, |x| x[0] + 7.0, &[0.1], &fam, &q).unwrap();
        assert!(v > 0.0 && (v - w).abs() < 1e-9);
    }

    #[test]
    fn unit_tent() {
        let fam = lipschitz_family(1, 5, 7);
        assert_eq!(fam.len(), 7);
        assert_eq!((fam[0].l_b, fam[0].r_b), (1.0, 1.0));
        assert!(fam.iter().any(|w| w.g_invariant) && fam.iter().any(|w| !w.g_invariant));
        assert_eq!(fam[3].scaled(2.0).l_b, 2.0 * fam[3].l_b);
    }
}
