use super::{operator_level, operator_truncated, CommutatorSeries, CommutatorSetup, LevelSource, OutputFunction, RealFn};
use crate::error::{Error, Result};
use crate::function_spaces::{best_constant_oscillation, maximal_function, mean_on_set, set_nodes, BallFamily, LipschitzWitness, Set};
use crate::geometry::{distance, Ball, CoxeterGroup};
use crate::measure::{QuadratureSpec, WeightedMeasure};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// The pieces `f_1 = f 1_{5B}`, `f_2 = f 1_{O(5B)^c}` and `f_{sigma_j} = f 1_{U_j}`
/// attached to a ball `B(x0, r)`, where
/// `U_j = {|z - x0| > 5r, |z - sigma_j x0| <= 5r}` minus the earlier `U_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `sigma_j x0` for the non-identity elements, in group order.
    pub images: Vec<Vec<f64>>,
}

impl Decomposition {
    pub fn new(g: &CoxeterGroup, ball: &Ball) -> Self {
        let images = (1..g.order()).map(|j| g.apply(j, &ball.center)).collect();
        Self { center: ball.center.clone(), radius: 5.0 * ball.radius, images }
    }

    pub fn near(&self, z: &[f64]) -> f64 {
        if distance(z, &self.center) <= self.radius {
            1.0
        } else {
            0.0
        }
    }

    pub fn far(&self, z: &[f64]) -> f64 {
        let outside = distance(z, &self.center) > self.radius && self.images.iter().all(|c| distance(z, c) > self.radius);
        if outside {
            1.0
        } else {
            0.0
        }
    }

    /// Indicator of `U_j`, `j` counted from 1.
    pub fn reflected(&self, j: usize, z: &[f64]) -> f64 {
        let inside = |i: usize| distance(z, &self.images[i - 1]) <= self.radius;
        if distance(z, &self.center) > self.radius && inside(j) && !(1..j).any(inside) {
            1.0
        } else {
            0.0
        }
    }

    pub fn pieces(&self) -> usize {
        self.images.len() + 2
    }

    /// `|f_1 + f_2 + sum_j f_{sigma_j} - f|` at `z`.
    pub fn partition_defect<F: Fn(&[f64]) -> f64>(&self, f: F, z: &[f64]) -> f64 {
        let v = f(z);
        let mut sum = v * self.near(z) + v * self.far(z);
        for j in 1..=self.images.len() {
            sum += v * self.reflected(j, z);
        }
        (sum - v).abs()
    }
}

pub fn decompose(g: &CoxeterGroup, ball: &Ball) -> Decomposition {
    Decomposition::new(g, ball)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpOptions {
    /// Exponent `s` in `M(|g|^s)^{1/s}`; `(1 + p)/2` in the reports.
    pub s: f64,
    /// Truncation level used for `C` and `T`.
    pub m: u32,
    pub bmo: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpRow {
    pub x: f64,
    /// `sup_B inf_c |Cf - c|_B` over the family balls containing `x`.
    pub lhs: f64,
    /// Majorant for the ball attaining the largest ratio.
    pub rhs: f64,
    pub ratio: f64,
    pub ball: Ball,
    /// Largest partition defect over the sampled points.
    pub partition_defect: f64,
}

fn power_maximal(m: &WeightedMeasure, g: &OutputFunction, s: f64, x: f64, family: &BallFamily, q: &QuadratureSpec) -> Result<f64> {
    let v = maximal_function(m, |y| Complex64::new(libm::pow(g.eval(y[0]).abs(), s), 0.0), &[x], family, q)?;
    Ok(libm::pow(v, 1.0 / s))
}

/// `(Cf)^#(x)` against the majorant
/// `|b|_BMO ( M(|T f_1|^s)^{1/s}(x) + M(|T f_2|^s)^{1/s}(x) + sum_j M(|T f_{sigma_j}|^s)^{1/s}(x)
///  + sum_sigma (M f(sigma x) + M(|f|^s)^{1/s}(sigma x)) )`,
/// taken ball by ball.
#[allow(clippy::too_many_arguments)]
pub fn sharp_maximal_diagnostic(
    setup: &CommutatorSetup,
    levels: &dyn LevelSource,
    measure: &WeightedMeasure,
    group: &CoxeterGroup,
    b: RealFn<'_>,
    f: RealFn<'_>,
    samples: &[f64],
    family: &BallFamily,
    q: &QuadratureSpec,
    opts: &SharpOptions,
) -> Result<Vec<SharpRow>> {
    if !(opts.s > 1.0) {
        return Err(Error::InvalidArgument("s must exceed 1".into()));
    }
    let mut series = CommutatorSeries::new(setup, levels, b, f);
    let cf = series.partial_sum(opts.m)?;
    let grid = setup.output();
    let fx = |y: &[f64]| f(y[0]);
    let mut rows = Vec::with_capacity(samples.len());
    for &x in samples {
        let mut orbit_terms = 0.0;
        for j in 0..group.order() {
            let sx = group.apply(j, &[x]);
            let mf = maximal_function(measure, |y| Complex64::new(f(y[0]).abs(), 0.0), &sx, family, q)?;
            let ms = maximal_function(measure, |y| Complex64::new(libm::pow(f(y[0]).abs(), opts.s), 0.0), &sx, family, q)?;
            orbit_terms += mf + libm::pow(ms, 1.0 / opts.s);
        }
        let mut best: Option<SharpRow> = None;
        let mut lhs = 0.0f64;
        for ball in family.containing(&[x]) {
            let values: Vec<(f64, f64)> =
                set_nodes(measure, &Set::Ball(ball.clone()), q)?.into_iter().map(|(y, w)| (cf.eval(y[0]), w)).collect();
            let osc = best_constant_oscillation(&values);
            lhs = lhs.max(osc);
            let d = Decomposition::new(group, &ball);
            let mut defect = 0.0f64;
            for &z in grid.nodes().iter().filter(|z| z.abs() <= setup.input_radius()) {
                defect = defect.max(d.partition_defect(fx, &[z]));
            }
            let mut rhs = orbit_terms;
            let near = |y: f64| f(y) * d.near(&[y]);
            let far = |y: f64| f(y) * d.far(&[y]);
            rhs += power_maximal(measure, &operator_truncated(setup, levels, &near, opts.m)?, opts.s, x, family, q)?;
            rhs += power_maximal(measure, &operator_truncated(setup, levels, &far, opts.m)?, opts.s, x, family, q)?;
            for j in 1..=d.images.len() {
                let piece = |y: f64| f(y) * d.reflected(j, &[y]);
                rhs += power_maximal(measure, &operator_truncated(setup, levels, &piece, opts.m)?, opts.s, x, family, q)?;
            }
            rhs *= opts.bmo;
            let ratio = if rhs > 0.0 { osc / rhs } else if osc == 0.0 { 0.0 } else { f64::INFINITY };
            if best.as_ref().is_none_or(|r| ratio > r.ratio) {
                best = Some(SharpRow { x, lhs: osc, rhs, ratio, ball, partition_defect: defect });
            } else if let Some(r) = best.as_mut() {
                r.partition_defect = r.partition_defect.max(defect);
            }
        }
        let mut row = best.ok_or(Error::UncoveredPoint)?;
        row.lhs = lhs;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub x: f64,
    /// `sum_{l < -m} |int (b(x) - b(y)) K_l(x, y) f(y) dw(y)|`.
    pub small: f64,
    /// `L_b 2^{-eps m} sum_sigma M f(sigma x)`.
    pub small_shape: f64,
    /// `sum_{l > m} |b(x) int K_l(x, y) f(y) dw(y)|`.
    pub bx: f64,
    /// `|b|_inf 2^{-m/p} 1_{B(0, r_b)}(x) |f|_p`.
    pub bx_shape: f64,
    /// `sum_{l > m} |int K_l(x, y) b(y) f(y) dw(y)|`.
    pub by: f64,
    /// `|b|_inf (1_{|x| <= 2^m} 2^{-mN} + 1_{|x| > 2^m} |x|^{-N}) |f|_p`.
    pub by_shape: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundReport {
    pub m: u32,
    pub rows: Vec<TailRow>,
    /// Largest `lhs / shape` over rows with a positive shape, per tail.
    pub small_constant: f64,
    pub bx_constant: f64,
    pub by_constant: f64,
    /// Largest `bx` among samples outside `B(0, r_b)`.
    pub bx_outside: f64,
}

/// Uncentred maximal function of `|f|` at `x` over balls meeting `x`, with
/// radii from `r_min` up to the scale of `|x| + reach`.
fn maximal_at(m: &WeightedMeasure, f: RealFn<'_>, x: f64, reach: f64, q: &QuadratureSpec) -> Result<f64> {
    let mut best = 0.0f64;
    let top = 2.0 * (x.abs() + reach);
    let mut r = 1.0 / 16.0;
    while r <= top {
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let ball = Ball::new(vec![x + t * r], r);
            best = best.max(mean_on_set(m, |y| Complex64::new(f(y[0]).abs(), 0.0), &Set::Ball(ball), q)?.re);
        }
        r *= libm::sqrt(2.0);
    }
    Ok(best)
}

/// The three tails of the truncated commutator at the sample points, against
/// their envelopes without constants.
#[allow(clippy::too_many_arguments)]
pub fn tail_bounds_probe(
    setup: &CommutatorSetup,
    levels: &dyn LevelSource,
    measure: &WeightedMeasure,
    b: &LipschitzWitness,
    f: RealFn<'_>,
    p: f64,
    m: u32,
    samples: &[f64],
    q: &QuadratureSpec,
) -> Result<TailBoundReport> {
    if libm::ldexp(1.0, m as i32) < 2.0 * b.r_b {
        return Err(Error::Precondition(alloc::format!("2^m = {} is below 2 r_b = {}", libm::ldexp(1.0, m as i32), 2.0 * b.r_b)));
    }
    let bf = |y: f64| b.eval(&[y]);
    let grid = setup.output();
    let f_norm = grid.lp_norm(&grid.nodes().iter().map(|&x| f(x)).collect::<Vec<_>>(), p);
    let eps = setup.kernel().epsilon;
    let n_hom = setup.homogeneous_dimension();
    let sup_b = b.height.abs();
    let mi = m as i32;
    let mut small = vec![0.0; samples.len()];
    let mut series = CommutatorSeries::new(setup, levels, &bf, f);
    for l in (-mi - 40..-mi).rev() {
        let c = series.level(l)?;
        for (acc, &x) in small.iter_mut().zip(samples) {
            *acc += grid.interpolate(c, x).abs();
        }
    }
    let bfun = |y: f64| bf(y) * f(y);
    let (mut bx, mut by) = (vec![0.0; samples.len()], vec![0.0; samples.len()]);
    for l in mi + 1..=setup.max_level() {
        let table = levels.level(l)?;
        let tf = operator_level(&table, f);
        let tbf = operator_level(&table, &bfun);
        for (i, &x) in samples.iter().enumerate() {
            bx[i] += (bf(x) * grid.interpolate(&tf, x)).abs();
            by[i] += grid.interpolate(&tbf, x).abs();
        }
    }
    let reach = setup.input_radius();
    let two_m = libm::ldexp(1.0, mi);
    let mut rows = Vec::with_capacity(samples.len());
    for (i, &x) in samples.iter().enumerate() {
        let mf = maximal_at(measure, f, x, reach, q)? + maximal_at(measure, f, -x, reach, q)?;
        let inside = x.abs() < b.r_b;
        rows.push(TailRow {
            x,
            small: small[i],
            small_shape: b.l_b * libm::pow(2.0, -eps * m as f64) * mf,
            bx: bx[i],
            bx_shape: if inside { sup_b * libm::pow(2.0, -(m as f64) / p) * f_norm } else { 0.0 },
            by: by[i],
            by_shape: sup_b
                * f_norm
                * if x.abs() <= two_m { libm::pow(two_m, -n_hom) } else { libm::pow(x.abs(), -n_hom) },
        });
    }
    let constant = |pick: fn(&TailRow) -> (f64, f64)| {
        rows.iter().map(pick).filter(|(_, s)| *s > 0.0).map(|(l, s)| l / s).fold(0.0, f64::max)
    };
    Ok(TailBoundReport {
        m,
        small_constant: constant(|r| (r.small, r.small_shape)),
        bx_constant: constant(|r| (r.bx, r.bx_shape)),
        by_constant: constant(|r| (r.by, r.by_shape)),
        bx_outside: rows.iter().filter(|r| r.x.abs() >= b.r_b).map(|r| r.bx).fold(0.0, f64::max),
        rows,
    })
}

/// `|(C_M - C_m) f|_{p0}` for each `m` in `ms`, with `C_M` standing in for the limit.
pub fn cauchy_tail(series: &mut CommutatorSeries<'_>, ms: &[u32], reference: u32, p0: f64) -> Result<Vec<f64>> {
    ms.iter().map(|&m| Ok(series.band(m, reference)?.lp_norm(p0))).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessOptions {
    pub m: u32,
    pub p: f64,
    /// Covering radii as fractions of the uniform bound.
    pub delta_fractions: Vec<f64>,
    /// Basis prefixes whose covering numbers are reported.
    pub prefixes: Vec<usize>,
    /// Levels `m'` for the per-function tail slopes and the reference level.
    pub tail_levels: Vec<u32>,
    pub tail_reference: u32,
    /// Node stride for the Hölder pairs.
    pub holder_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport {
    pub omega_radius: f64,
    /// Largest `|C_m f|_{L^p(Omega^c)} / |C_m f|_p`.
    pub leakage: f64,
    /// Largest `sup |C_m f - C_m(f 1_{B(0, r_b + 2^m)})|`.
    pub input_localization: f64,
    pub uniform_bound: f64,
    /// Largest per-function Hölder quotient.
    pub holder_modulus: f64,
    pub holder_moduli: Vec<f64>,
    /// `(delta, [(prefix, N(delta))])`.
    pub covering_numbers: Vec<(f64, Vec<(usize, usize)>)>,
    pub tail_slopes: Vec<f64>,
}

impl CompactnessReport {
    pub fn holder_spread(&self) -> f64 {
        let mut v = self.holder_moduli.clone();
        v.sort_by(f64::total_cmp);
        let med = if v.is_empty() { 0.0 } else { v[v.len() / 2] };
        let max = v.last().copied().unwrap_or(0.0);
        if med > 0.0 {
            max / med
        } else {
            f64::INFINITY
        }
    }
}

/// Size of a greedy `delta`-net of `points` in the sup metric, taken in order.
pub fn covering_number(points: &[&[f64]], delta: f64) -> usize {
    let mut centers: Vec<&[f64]> = Vec::new();
    for p in points {
        let covered = centers.iter().any(|c| c.iter().zip(p.iter()).all(|(a, b)| (a - b).abs() <= delta));
        if !covered {
            centers.push(p);
        }
    }
    centers.len()
}

/// Localization, uniform and Hölder bounds, covering numbers and tail slopes
/// for `C_m` on a normalized basis.
pub fn compactness_probe(
    setup: &CommutatorSetup,
    levels: &dyn LevelSource,
    b: &LipschitzWitness,
    basis: &[RealFn<'_>],
    opts: &CompactnessOptions,
) -> Result<CompactnessReport> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("compactness probe needs a basis".into()));
    }
    let bf = |y: f64| b.eval(&[y]);
    let grid = setup.output();
    let mi = opts.m as i32;
    let omega = b.r_b + libm::ldexp(2.0, mi);
    let input_ball = b.r_b + libm::ldexp(1.0, mi);
    let eps = setup.kernel().epsilon;
    let inside: Vec<usize> = (0..grid.len()).filter(|&i| grid.nodes()[i].abs() < omega).collect();
    let holder_nodes: Vec<usize> = inside.iter().copied().step_by(opts.holder_stride.max(1)).collect();
    let mut report = CompactnessReport {
        omega_radius: omega,
        leakage: 0.0,
        input_localization: 0.0,
        uniform_bound: 0.0,
        holder_modulus: 0.0,
        holder_moduli: Vec::new(),
        covering_numbers: Vec::new(),
        tail_slopes: Vec::new(),
    };
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for f in basis {
        let norm = grid.lp_norm(&grid.nodes().iter().map(|&x| f(x)).collect::<Vec<_>>(), opts.p);
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("basis functions must be nonzero".into()));
        }
        let g = |y: f64| f(y) / norm;
        let cut = |y: f64| if y.abs() < input_ball { g(y) } else { 0.0 };
        let mut series = CommutatorSeries::new(setup, levels, &bf, &g);
        let out = series.partial_sum(opts.m)?;
        let total = out.lp_norm(opts.p);
        let outside = grid.lp_norm_where(&out.values, opts.p, |x| x.abs() >= omega);
        if total > 0.0 {
            report.leakage = report.leakage.max(outside / total);
        }
        let mut cut_series = CommutatorSeries::new(setup, levels, &bf, &cut);
        let cut_out = cut_series.partial_sum(opts.m)?;
        let diff = out.values.iter().zip(&cut_out.values).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        report.input_localization = report.input_localization.max(diff);
        let values: Vec<f64> = inside.iter().map(|&i| out.values[i]).collect();
        report.uniform_bound = report.uniform_bound.max(values.iter().fold(0.0, |a, v| a.max(v.abs())));
        let mut modulus = 0.0f64;
        for (a, &i) in holder_nodes.iter().enumerate() {
            for &j in &holder_nodes[a + 1..] {
                let h = (grid.nodes()[i] - grid.nodes()[j]).abs();
                if h > 0.0 {
                    modulus = modulus.max((out.values[i] - out.values[j]).abs() / libm::pow(h, eps));
                }
            }
        }
        report.holder_moduli.push(modulus);
        if !opts.tail_levels.is_empty() {
            let tails = cauchy_tail(&mut series, &opts.tail_levels, opts.tail_reference, opts.p)?;
            let xs: Vec<f64> = opts.tail_levels.iter().map(|&m| m as f64).collect();
            let ys: Vec<f64> = tails.iter().map(|t| libm::log2(t.max(f64::MIN_POSITIVE))).collect();
            report.tail_slopes.push(regression_slope(&xs, &ys));
        }
        images.push(values);
    }
    report.holder_modulus = report.holder_moduli.iter().fold(0.0, |a, &v| a.max(v));
    let views: Vec<&[f64]> = images.iter().map(|v| v.as_slice()).collect();
    let mut running: Vec<Option<usize>> = vec![None; opts.prefixes.len()];
    let mut fractions = opts.delta_fractions.clone();
    fractions.sort_by(f64::total_cmp);
    for frac in fractions {
        let delta = frac * report.uniform_bound;
        let counts: Vec<(usize, usize)> = opts
            .prefixes
            .iter()
            .enumerate()
            .map(|(pi, &n)| {
                let n = n.min(views.len());
                // a finer net also covers at every larger radius
                let c = covering_number(&views[..n], delta);
                let c = running[pi].map_or(c, |r| r.min(c));
                running[pi] = Some(c);
                (n, c)
            })
            .collect();
        report.covering_numbers.push((delta, counts));
    }
    Ok(report)
}
