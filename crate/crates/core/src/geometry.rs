//! Root systems, the reflection groups they generate, orbits and Weyl chambers.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

const ROOT_NORM_SQ: f64 = 2.0;
const MATCH_TOL: f64 = 1e-10;
const GROUP_TOL: f64 = 1e-9;
/// Default bound on the order of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 1024;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `sigma_alpha(x) = x - 2 <x, alpha> / |alpha|^2 alpha`.
pub fn reflect(alpha: &[f64], x: &[f64]) -> Vec<f64> {
    let s = 2.0 * dot(x, alpha) / dot(alpha, alpha);
    x.iter().zip(alpha).map(|(xi, ai)| xi - s * ai).collect()
}

/// A normalized root system with a multiplicity per root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    dimension: usize,
    roots: Vec<Vec<f64>>,
    multiplicity: Vec<f64>,
    positive: Vec<usize>,
}

/// Validates raw roots and multiplicities (one per raw root, or a single value
/// shared by all) and completes them to a root system.
pub fn build_root_system(raw_roots: &[Vec<f64>], multiplicities: &[f64]) -> Result<RootSystem> {
    let first = raw_roots
        .first()
        .ok_or_else(|| Error::InvalidRootSystem("no roots given".into()))?;
    let dimension = first.len();
    if dimension == 0 {
        return Err(Error::InvalidRootSystem("roots must have positive dimension".into()));
    }
    let ks: Vec<f64> = match multiplicities.len() {
        1 => vec![multiplicities[0]; raw_roots.len()],
        n if n == raw_roots.len() => multiplicities.to_vec(),
        n => {
            return Err(Error::DimensionMismatch { expected: raw_roots.len(), found: n });
        }
    };
    if let Some(bad) = ks.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
        return Err(Error::InvalidRootSystem(format!("multiplicity {bad} is not a nonnegative real")));
    }

    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    for (raw, &k) in raw_roots.iter().zip(&ks) {
        if raw.len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, found: raw.len() });
        }
        let n = norm(raw);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidRootSystem("roots must be finite and nonzero".into()));
        }
        let scale = libm::sqrt(ROOT_NORM_SQ) / n;
        let alpha: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        let mut merged = false;
        for (existing, &ek) in roots.iter().zip(&mult) {
            let cos = dot(existing, &alpha) / ROOT_NORM_SQ;
            if cos > 1.0 - 1e-12 {
                return Err(Error::InvalidRootSystem("parallel duplicate root".into()));
            }
            if cos < -1.0 + 1e-12 {
                if (ek - k).abs() > 1e-12 {
                    return Err(Error::NonInvariantMultiplicity(format!(
                        "antipodal roots carry multiplicities {ek} and {k}"
                    )));
                }
                merged = true;
                break;
            }
        }
        if !merged {
            let neg: Vec<f64> = alpha.iter().map(|v| -v).collect();
            roots.push(alpha);
            mult.push(k);
            roots.push(neg);
            mult.push(k);
        }
    }

    let find = |roots: &[Vec<f64>], v: &[f64]| roots.iter().position(|r| distance(r, v) < MATCH_TOL);
    for a in 0..roots.len() {
        for b in 0..roots.len() {
            let image = reflect(&roots[a], &roots[b]);
            match find(&roots, &image) {
                None => {
                    return Err(Error::InvalidRootSystem(
                        "root set is not closed under its reflections".into(),
                    ))
                }
                Some(c) if (mult[c] - mult[b]).abs() > 1e-12 => {
                    return Err(Error::NonInvariantMultiplicity(format!(
                        "reflection maps a root of multiplicity {} to one of multiplicity {}",
                        mult[b], mult[c]
                    )));
                }
                Some(_) => {}
            }
        }
    }

    let probe = generic_vector(dimension, &roots);
    let positive = (0..roots.len()).filter(|&i| dot(&roots[i], &probe) > 0.0).collect();
    Ok(RootSystem { dimension, roots, multiplicity: mult, positive })
}

fn generic_vector(dimension: usize, roots: &[Vec<f64>]) -> Vec<f64> {
    let base = [1.0, 0.577_215_664_901_532_9, 0.318_309_886_183_790_7, 0.141_421_356_237_309_5];
    let mut v: Vec<f64> = (0..dimension).map(|i| base[i % base.len()] / (1 + i / base.len()) as f64).collect();
    let mut bump = 1e-3;
    while roots.iter().any(|r| dot(r, &v).abs() < 1e-9) {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi += bump * (i as f64 + 1.0);
        }
        bump *= 1.7;
    }
    v
}

impl RootSystem {
    /// `{±sqrt(2)}` in one dimension.
    pub fn rank1(k: f64) -> Result<Self> {
        build_root_system(&[vec![1.0]], &[k])
    }

    /// The product system `Z_2^N` with one multiplicity per axis.
    pub fn product(ks: &[f64]) -> Result<Self> {
        let n = ks.len();
        let raw: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        build_root_system(&raw, ks)
    }

    /// The dihedral system of order 6 in the plane.
    pub fn a2(k: f64) -> Result<Self> {
        let s = libm::sqrt(3.0) / 2.0;
        build_root_system(&[vec![1.0, 0.0], vec![0.5, s], vec![-0.5, s]], &[k])
    }

    /// The dihedral system of order 8, short roots `e_i` and long roots `e_1 ± e_2`.
    pub fn b2(k_short: f64, k_long: f64) -> Result<Self> {
        build_root_system(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, -1.0]],
            &[k_short, k_short, k_long, k_long],
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn roots(&self) -> &[Vec<f64>] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.multiplicity
    }

    pub fn multiplicity(&self, root: usize) -> f64 {
        self.multiplicity[root]
    }

    /// Indices of the positive roots.
    pub fn positive_roots(&self) -> &[usize] {
        &self.positive
    }

    /// `N + sum_alpha k(alpha)`.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.dimension as f64 + self.multiplicity.iter().sum::<f64>()
    }

    /// For a product system, the multiplicity of each coordinate axis.
    pub fn axis_multiplicities(&self) -> Option<Vec<f64>> {
        let n = self.dimension;
        if self.roots.len() != 2 * n {
            return None;
        }
        let mut ks = vec![f64::NAN; n];
        for (alpha, &k) in self.roots.iter().zip(&self.multiplicity) {
            let axis = alpha.iter().position(|v| v.abs() > 1e-12)?;
            if alpha.iter().enumerate().any(|(i, v)| i != axis && v.abs() > 1e-12) {
                return None;
            }
            ks[axis] = k;
        }
        if ks.iter().any(|k| k.is_nan()) {
            return None;
        }
        Some(ks)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: x.len() });
        }
        Ok(())
    }
}

/// Row-major `N x N` orthogonal matrix.
pub type Matrix = Vec<f64>;

/// The finite group generated by the reflections of a root system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxeterGroup {
    dimension: usize,
    elements: Vec<Matrix>,
    words: Vec<Vec<usize>>,
    generators: Vec<usize>,
}

pub fn generate_group(rs: &RootSystem) -> Result<CoxeterGroup> {
    generate_group_with_cap(rs, DEFAULT_GROUP_CAP)
}

/// Breadth-first closure of the positive-root reflections.
pub fn generate_group_with_cap(rs: &RootSystem, cap: usize) -> Result<CoxeterGroup> {
    let n = rs.dimension();
    let generators: Vec<usize> = rs.positive_roots().to_vec();
    let gen_mats: Vec<Matrix> = generators.iter().map(|&i| reflection_matrix(&rs.roots()[i])).collect();
    let mut elements = vec![identity(n)];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut head = 0;
    while head < elements.len() {
        for (gi, s) in gen_mats.iter().enumerate() {
            let candidate = matmul(&elements[head], s, n);
            if !elements.iter().any(|e| matrix_distance(e, &candidate) < GROUP_TOL) {
                if elements.len() >= cap {
                    return Err(Error::GroupCapExceeded { cap });
                }
                let mut word = words[head].clone();
                word.push(gi);
                elements.push(candidate);
                words.push(word);
            }
        }
        head += 1;
    }
    Ok(CoxeterGroup { dimension: n, elements, words, generators })
}

fn identity(n: usize) -> Matrix {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn reflection_matrix(alpha: &[f64]) -> Matrix {
    let n = alpha.len();
    let a2 = dot(alpha, alpha);
    let mut m = identity(n);
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] -= 2.0 * alpha[i] * alpha[j] / a2;
        }
    }
    m
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Matrix {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn matrix_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl CoxeterGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Elements as row-major matrices; the identity comes first.
    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    /// `words()[g] = [i_1, .., i_m]` with element `g` equal to the product
    /// `sigma_{i_1} .. sigma_{i_m}` of generator reflections.
    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Root indices of the generating reflections, in word-index order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn apply(&self, g: usize, x: &[f64]) -> Vec<f64> {
        let n = self.dimension;
        let m = &self.elements[g];
        (0..n).map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum()).collect()
    }

    /// Index of the stored element closest to `m`, if within tolerance.
    pub fn find(&self, m: &[f64]) -> Option<usize> {
        self.elements.iter().position(|e| matrix_distance(e, m) < GROUP_TOL)
    }

    pub fn compose(&self, a: usize, b: usize) -> Matrix {
        matmul(&self.elements[a], &self.elements[b], self.dimension)
    }

    /// Checks closure under composition and inverses.
    pub fn is_closed(&self) -> bool {
        let n = self.dimension;
        (0..self.order()).all(|a| {
            let t = transpose(&self.elements[a], n);
            self.find(&t).is_some() && (0..self.order()).all(|b| self.find(&self.compose(a, b)).is_some())
        })
    }

    /// Distinct images of a point.
    pub fn orbit(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for g in 0..self.order() {
            let y = self.apply(g, x);
            if !out.iter().any(|z| distance(z, &y) < 1e-12) {
                out.push(y);
            }
        }
        out
    }

    /// Distinct images of a ball.
    pub fn orbit_ball(&self, ball: &Ball) -> Vec<Ball> {
        self.orbit(&ball.center)
            .into_iter()
            .map(|center| Ball { center, radius: ball.radius })
            .collect()
    }

    /// `min_sigma |x - sigma(y)|`.
    pub fn orbit_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.order())
            .map(|g| distance(x, &self.apply(g, y)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn transpose(m: &[f64], n: usize) -> Matrix {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = m[i * n + j];
        }
    }
    t
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.radius
    }

    pub fn dilate(&self, factor: f64) -> Self {
        Self { center: self.center.clone(), radius: self.radius * factor }
    }
}

/// A closed Weyl chamber, identified by the signs of `<x, alpha>` over the
/// positive roots.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylChamber {
    positive_roots: Vec<Vec<f64>>,
    signs: Vec<i8>,
    on_wall: bool,
}

impl WeylChamber {
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Whether the point used to select the chamber lay on a reflection hyperplane.
    pub fn on_wall(&self) -> bool {
        self.on_wall
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.positive_roots
            .iter()
            .zip(&self.signs)
            .all(|(a, &s)| f64::from(s) * dot(a, x) >= -1e-12)
    }
}

pub fn chamber_of(rs: &RootSystem, x: &[f64]) -> WeylChamber {
    let positive_roots: Vec<Vec<f64>> = rs.positive_roots().iter().map(|&i| rs.roots()[i].clone()).collect();
    let probe = generic_vector(rs.dimension(), rs.roots());
    let mut on_wall = false;
    let signs = positive_roots
        .iter()
        .map(|a| {
            let v = dot(a, x);
            if v.abs() <= 1e-14 * (1.0 + norm(x)) {
                on_wall = true;
                // break the tie toward the fundamental side
                if dot(a, &probe) >= 0.0 {
                    1
                } else {
                    -1
                }
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    WeylChamber { positive_roots, signs, on_wall }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank1_rescales_and_closes() {
        let rs = build_root_system(&[vec![1.0]], &[0.5]).unwrap();
        let mut r: Vec<f64> = rs.roots().iter().map(|v| v[0]).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + libm::sqrt(2.0)).abs() < 1e-15 && (r[1] - libm::sqrt(2.0)).abs() < 1e-15);
        assert!(rs.multiplicities().iter().all(|&k| k == 0.5));
    }

    #[test]
    fn product_system_has_four_roots() {
        let rs = build_root_system(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0]).unwrap();
        assert_eq!(rs.roots().len(), 4);
        assert_eq!(rs.axis_multiplicities(), Some(vec![1.0, 1.0]));
    }

    #[test]
    fn antipodal_multiplicity_mismatch_is_rejected() {
        let err = build_root_system(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NonInvariantMultiplicity(_)));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(build_root_system(&[vec![1.0], vec![2.0]], &[1.0]).is_err());
        assert!(build_root_system(&[vec![1.0]], &[-1.0]).is_err());
        assert!(build_root_system(&[], &[]).is_err());
        // two roots at 60 degrees without the third
        let s = libm::sqrt(3.0) / 2.0;
        assert!(build_root_system(&[vec![1.0, 0.0], vec![0.5, s]], &[1.0]).is_err());
        // A2 with unequal multiplicities breaks invariance
        let err = build_root_system(&[vec![1.0, 0.0], vec![0.5, s], vec![-0.5, s]], &[1.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NonInvariantMultiplicity(_)));
    }

    #[test]
    fn reflection_examples() {
        let a = [libm::sqrt(2.0)];
        assert_eq!(reflect(&a, &[3.0]), vec![-3.0]);
        let e1 = [libm::sqrt(2.0), 0.0];
        let y = reflect(&e1, &[1.0, 2.0]);
        assert!((y[0] + 1.0).abs() < 1e-15 && (y[1] - 2.0).abs() < 1e-15);
        assert_eq!(reflect(&e1, &[0.0, 5.0]), vec![0.0, 5.0]);
    }

    #[test]
    fn group_orders() {
        assert_eq!(generate_group(&RootSystem::rank1(1.0).unwrap()).unwrap().order(), 2);
        let z2 = generate_group(&RootSystem::product(&[1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(z2.order(), 4);
        for m in z2.elements() {
            assert!(m[1] == 0.0 && m[2] == 0.0 && m[0].abs() == 1.0 && m[3].abs() == 1.0);
        }
        assert_eq!(generate_group(&RootSystem::a2(1.0).unwrap()).unwrap().order(), 6);
        assert_eq!(generate_group(&RootSystem::b2(1.0, 0.5).unwrap()).unwrap().order(), 8);
        assert_eq!(generate_group(&RootSystem::product(&[1.0, 1.0, 1.0]).unwrap()).unwrap().order(), 8);
    }

    #[test]
    fn group_cap_is_enforced() {
        let rs = RootSystem::b2(1.0, 1.0).unwrap();
        assert_eq!(generate_group_with_cap(&rs, 5), Err(Error::GroupCapExceeded { cap: 5 }));
    }

    #[test]
    fn words_reproduce_elements() {
        let rs = RootSystem::a2(1.0).unwrap();
        let g = generate_group(&rs).unwrap();
        let n = 2;
        for (m, w) in g.elements().iter().zip(g.words()) {
            let mut acc = identity(n);
            for &i in w {
                acc = matmul(&acc, &reflection_matrix(&rs.roots()[g.generators()[i]]), n);
            }
            assert!(matrix_distance(&acc, m) < 1e-12);
        }
    }

    #[test]
    fn orbits_and_distances() {
        let g1 = generate_group(&RootSystem::rank1(1.0).unwrap()).unwrap();
        let mut o: Vec<f64> = g1.orbit(&[2.0]).iter().map(|v| v[0]).collect();
        o.sort_by(f64::total_cmp);
        assert_eq!(o, vec![-2.0, 2.0]);
        assert_eq!(g1.orbit(&[0.0]).len(), 1);
        assert_eq!(g1.orbit_distance(&[1.0], &[-3.0]), 2.0);

        let g2 = generate_group(&RootSystem::product(&[1.0, 1.0]).unwrap()).unwrap();
        let balls = g2.orbit_ball(&Ball::new(vec![1.0, 1.0], 0.5));
        assert_eq!(balls.len(), 4);
        assert!(balls.iter().all(|b| b.center[0].abs() == 1.0 && b.center[1].abs() == 1.0));
        assert_eq!(g2.orbit_distance(&[1.0, 1.0], &[-1.0, 1.0]), 0.0);
    }

    #[test]
    fn chambers() {
        let rs = RootSystem::rank1(1.0).unwrap();
        let c = chamber_of(&rs, &[3.0]);
        assert!(c.contains(&[1.0]) && c.contains(&[2.0]) && !c.contains(&[-1.0]));
        assert!(!c.on_wall());
        let g = generate_group(&rs).unwrap();
        assert_eq!(g.orbit_distance(&[1.0], &[2.0]), 1.0);
        assert!(chamber_of(&rs, &[0.0]).on_wall());

        let rs2 = RootSystem::product(&[1.0, 1.0]).unwrap();
        let c2 = chamber_of(&rs2, &[1.0, -2.0]);
        assert!(c2.contains(&[3.0, -0.5]) && c2.contains(&[0.0, -1.0]));
        assert!(!c2.contains(&[1.0, 2.0]) && !c2.contains(&[-1.0, -2.0]));
    }
}
