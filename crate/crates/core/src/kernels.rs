//! Singular convolution kernels: the cancellation, size and limit conditions,
//! smooth truncations, dyadic pieces and their two-point versions.

use crate::error::{Error, Result};
use crate::geometry::{norm, CoxeterGroup};
use crate::measure::{ball_volume, integrate, QuadratureSpec, Region, WeightedMeasure};
use crate::spectral::ProductTranslation;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type GradientEvaluator = Arc<dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync>;
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial cutoff `phi(|x|)`: 1 below 1/2, 0 from 1 on.
#[derive(Clone)]
pub struct CutoffSpec {
    pub name: String,
    pub profile: Profile,
    /// `None` for infinitely smooth profiles.
    pub smoothness: Option<u32>,
}

impl fmt::Debug for CutoffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CutoffSpec").field("name", &self.name).field("smoothness", &self.smoothness).finish()
    }
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { name: "smooth-step".to_string(), profile: Arc::new(smooth_step), smoothness: None }
    }
}

impl CutoffSpec {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.5 {
            1.0
        } else if r >= 1.0 {
            0.0
        } else {
            (self.profile)(r)
        }
    }

    /// Samples the profile and checks the plateau conditions and `0 <= phi <= 1`.
    pub fn validate(&self) -> Result<()> {
        for i in 0..=400 {
            let r = 1.25 * i as f64 / 400.0;
            let v = (self.profile)(r);
            let ok = (0.0..=1.0).contains(&v) && (r >= 0.5 || v == 1.0) && (r < 1.0 || v == 0.0);
            if !ok {
                return Err(Error::InvalidKernel(alloc::format!("cutoff {} violates its plateaus at r = {r}", self.name)));
            }
        }
        Ok(())
    }
}

/// `psi(1 - u) / (psi(1 - u) + psi(u))` with `psi(t) = exp(-1/t)`, `u = 2r - 1`.
pub fn smooth_step(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * r - 1.0;
    let psi = |t: f64| if t > 0.0 { libm::exp(-1.0 / t) } else { 0.0 };
    let (a, b) = (psi(1.0 - u), psi(u));
    a / (a + b)
}

#[derive(Clone)]
pub struct KernelSpec {
    pub name: String,
    pub evaluator: Evaluator,
    pub gradient: Option<GradientEvaluator>,
    pub homogeneous_dimension: f64,
    pub s0: u32,
    /// Declared `C_beta` indexed by `|beta|`.
    pub derivative_bounds: Vec<f64>,
    pub epsilon: f64,
    pub cancellation_limit: Complex64,
    pub cutoff: CutoffSpec,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("s0", &self.s0)
            .field("epsilon", &self.epsilon)
            .field("derivative_bounds", &self.derivative_bounds)
            .field("cancellation_limit", &self.cancellation_limit)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

/// Smallest even integer above `n`.
pub fn default_s0(n: f64) -> u32 {
    let mut s = 2;
    while (s as f64) <= n {
        s += 2;
    }
    s
}

pub fn default_epsilon(n: f64, s0: u32) -> f64 {
    (s0 as f64 - n).min(1.0) / 2.0
}

impl KernelSpec {
    pub fn new(name: impl Into<String>, evaluator: Evaluator, homogeneous_dimension: f64) -> Self {
        let s0 = default_s0(homogeneous_dimension);
        Self {
            name: name.into(),
            evaluator,
            gradient: None,
            homogeneous_dimension,
            s0,
            derivative_bounds: Vec::new(),
            epsilon: default_epsilon(homogeneous_dimension, s0),
            cancellation_limit: Complex64::new(0.0, 0.0),
            cutoff: CutoffSpec::default(),
        }
    }

    pub fn with_gradient(mut self, g: GradientEvaluator) -> Self {
        self.gradient = Some(g);
        self
    }

    pub fn with_s0(mut self, s0: u32) -> Self {
        self.s0 = s0;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_derivative_bounds(mut self, bounds: Vec<f64>) -> Self {
        self.derivative_bounds = bounds;
        self
    }

    pub fn with_cancellation_limit(mut self, l: Complex64) -> Self {
        self.cancellation_limit = l;
        self
    }

    pub fn with_cutoff(mut self, cutoff: CutoffSpec) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.homogeneous_dimension;
        if self.s0 % 2 != 0 || (self.s0 as f64) <= n {
            return Err(Error::InvalidKernel(alloc::format!("s0 = {} must be even and exceed {n}", self.s0)));
        }
        let top = (self.s0 as f64 - n).min(1.0);
        if !(self.epsilon > 0.0 && self.epsilon < top) {
            return Err(Error::InvalidKernel(alloc::format!("epsilon must lie in (0, {top})")));
        }
        self.cutoff.validate()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.evaluator)(x)
    }

    /// The kernel multiplied by `s`, with declared constants scaled alike.
    pub fn scaled(&self, s: f64) -> Self {
        let e = self.evaluator.clone();
        let mut out = self.clone();
        out.evaluator = Arc::new(move |x: &[f64]| e(x) * s);
        if let Some(g) = self.gradient.clone() {
            out.gradient = Some(Arc::new(move |x: &[f64]| g(x).into_iter().map(|v| v * s).collect()));
        }
        out.derivative_bounds = self.derivative_bounds.iter().map(|c| c * s.abs()).collect();
        out.cancellation_limit = self.cancellation_limit * s;
        out.name = alloc::format!("{}*{s}", self.name);
        out
    }
}

/// `K(x) = x_j / |x|^{N+1}`, odd and homogeneous of degree `-N`.
pub fn builtin_riesz_kernel(m: &WeightedMeasure, j: usize) -> Result<KernelSpec> {
    let rs = m.root_system();
    if rs.axis_multiplicities().is_none() {
        return Err(Error::NoClosedForm);
    }
    if j >= m.dimension() {
        return Err(Error::InvalidArgument(alloc::format!("axis {j} out of range")));
    }
    let n = m.homogeneous_dimension();
    let p = n + 1.0;
    let eval: Evaluator = Arc::new(move |x: &[f64]| Complex64::new(x[j] / libm::pow(norm(x), p), 0.0));
    let grad: GradientEvaluator = Arc::new(move |x: &[f64]| {
        let r = norm(x);
        let rp = libm::pow(r, p);
        (0..x.len())
            .map(|i| {
                let d = if i == j { 1.0 } else { 0.0 };
                Complex64::new(d / rp - p * x[j] * x[i] / (rp * r * r), 0.0)
            })
            .collect()
    });
    Ok(KernelSpec::new(alloc::format!("riesz-{j}"), eval, n)
        .with_gradient(grad)
        .with_derivative_bounds(vec![1.0, p + 1.0, p * (p + 5.0)]))
}

/// `K(x) = |x|^{-N}`: even, so the cancellation condition fails.
pub fn builtin_radial_power(m: &WeightedMeasure) -> KernelSpec {
    let n = m.homogeneous_dimension();
    let eval: Evaluator = Arc::new(move |x: &[f64]| Complex64::new(libm::pow(norm(x), -n), 0.0));
    KernelSpec::new("radial-power", eval, n).with_derivative_bounds(vec![1.0, n, n * (n + 3.0)])
}

/// Kernels registered by name.
#[derive(Debug, Clone, Default)]
pub struct KernelRegistry {
    kernels: BTreeMap<String, KernelSpec>,
}

impl KernelRegistry {
    /// `riesz-j` for every axis and `radial-power`.
    pub fn with_builtins(m: &WeightedMeasure) -> Result<Self> {
        let mut reg = Self::default();
        for j in 0..m.dimension() {
            reg.register(builtin_riesz_kernel(m, j)?)?;
        }
        reg.register(builtin_radial_power(m))?;
        Ok(reg)
    }

    pub fn register(&mut self, spec: KernelSpec) -> Result<()> {
        spec.validate()?;
        if self.kernels.contains_key(&spec.name) {
            return Err(Error::InvalidKernel(alloc::format!("kernel {} already registered", spec.name)));
        }
        self.kernels.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&KernelSpec> {
        self.kernels.get(name).ok_or_else(|| Error::InvalidKernel(alloc::format!("unknown kernel {name}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.kernels.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionConfig {
    /// Annulus radii `a < b` range over this many log-spaced points in `[1e-3, 1e3]`.
    pub log_points: usize,
    pub annulus_bound: f64,
    pub shells: Vec<f64>,
    pub directions: usize,
    pub cauchy_levels: u32,
    pub cauchy_tolerance: f64,
}

impl Default for AssumptionConfig {
    fn default() -> Self {
        Self {
            log_points: 13,
            annulus_bound: 1.0,
            shells: vec![0.25, 1.0, 4.0],
            directions: 32,
            cauchy_levels: 20,
            cauchy_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCheck {
    pub order: usize,
    pub measured: f64,
    pub declared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub kernel: String,
    pub cutoff: String,
    pub annulus_sup: f64,
    /// Least-squares slope of `|int_{a<|x|<b} K dw|` against `log(b/a)`.
    pub annulus_log_slope: f64,
    pub a_holds: bool,
    pub derivatives: Vec<DerivativeCheck>,
    pub d_holds: bool,
    /// `|I(2^{-i-1}) - I(2^{-i})|` with `I(e) = int_{e<|x|<1} K dw`.
    pub cauchy_differences: Vec<f64>,
    pub extrapolated_limit: Complex64,
    pub l_holds: bool,
}

fn shell_integral(m: &WeightedMeasure, ks: &KernelSpec, a: f64, b: f64, q: &QuadratureSpec) -> Result<Complex64> {
    let origin = vec![0.0; m.dimension()];
    integrate(m, |x| ks.eval(x), &Region::Annulus { center: origin, inner: a, outer: b }, q)
}

/// Cumulative integrals `int_{r_0<|x|<r_i} K dw` over shells no wider than a factor 4/3.
fn cumulative(m: &WeightedMeasure, ks: &KernelSpec, radii: &[f64], q: &QuadratureSpec) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for w in radii.windows(2) {
        let pieces = libm::ceil(libm::log(w[1] / w[0]) / libm::log(4.0 / 3.0)).max(1.0) as usize;
        let step = libm::pow(w[1] / w[0], 1.0 / pieces as f64);
        let mut acc = *out.last().unwrap();
        let mut r = w[0];
        for p in 0..pieces {
            let next = if p + 1 == pieces { w[1] } else { r * step };
            acc += shell_integral(m, ks, r, next, q)?;
            r = next;
        }
        out.push(acc);
    }
    Ok(out)
}

fn directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = (i as f64 + 0.5) * 2.0 * core::f64::consts::PI / count as f64;
                vec![libm::cos(t), libm::sin(t)]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n = norm(&v);
                    v.into_iter().map(|c| c / n).collect()
                })
                .collect()
        }
    }
}

fn measured_derivatives(ks: &KernelSpec, dim: usize, cfg: &AssumptionConfig) -> Vec<DerivativeCheck> {
    let n = ks.homogeneous_dimension;
    let mut sup = [0.0f64; 3];
    let grad = |x: &[f64], h: f64| -> Vec<Complex64> {
        match &ks.gradient {
            Some(g) => g(x),
            None => (0..dim)
                .map(|i| {
                    let mut p = x.to_vec();
                    let mut q = x.to_vec();
                    p[i] += h;
                    q[i] -= h;
                    (ks.eval(&p) - ks.eval(&q)) / (2.0 * h)
                })
                .collect(),
        }
    };
    for &r in &cfg.shells {
        for u in directions(dim, cfg.directions) {
            let x: Vec<f64> = u.iter().map(|c| c * r).collect();
            sup[0] = sup[0].max(libm::pow(r, n) * ks.eval(&x).norm());
            let g = grad(&x, 1e-5 * r);
            let g_max = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
            sup[1] = sup[1].max(libm::pow(r, n + 1.0) * g_max);
            let h = 1e-4 * r;
            for i in 0..dim {
                let mut p = x.clone();
                let mut q = x.clone();
                p[i] += h;
                q[i] -= h;
                let (gp, gq) = (grad(&p, h), grad(&q, h));
                for jj in 0..dim {
                    let d = ((gp[jj] - gq[jj]) / (2.0 * h)).norm();
                    sup[2] = sup[2].max(libm::pow(r, n + 2.0) * d);
                }
            }
        }
    }
    let top = (ks.s0 as usize).min(2);
    (0..=top)
        .map(|order| DerivativeCheck { order, measured: sup[order], declared: ks.derivative_bounds.get(order).copied() })
        .collect()
}

pub fn verify_assumptions(
    ks: &KernelSpec,
    m: &WeightedMeasure,
    q: &QuadratureSpec,
    cfg: &AssumptionConfig,
) -> Result<AssumptionReport> {
    if cfg.log_points < 2 {
        return Err(Error::InvalidArgument("need at least two annulus radii".into()));
    }
    let radii: Vec<f64> = (0..cfg.log_points)
        .map(|i| libm::pow(10.0, -3.0 + 6.0 * i as f64 / (cfg.log_points - 1) as f64))
        .collect();
    let cum = cumulative(m, ks, &radii, q)?;
    let mut sup = 0.0f64;
    let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            let v = (cum[j] - cum[i]).norm();
            if !v.is_finite() {
                return Err(Error::NonFiniteSample);
            }
            sup = sup.max(v);
            let t = libm::log(radii[j] / radii[i]);
            sx += t;
            sy += v;
            sxx += t * t;
            sxy += t * v;
            cnt += 1.0;
        }
    }
    let slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

    let derivatives = measured_derivatives(ks, m.dimension(), cfg);
    let d_holds = derivatives
        .iter()
        .all(|d| d.measured.is_finite() && d.declared.map_or(true, |c| d.measured <= c * (1.0 + 1e-6)));

    let eps: Vec<f64> = (0..=cfg.cauchy_levels).map(|i| libm::pow(2.0, -(i as f64))).collect();
    let mut rev = eps.clone();
    rev.reverse();
    let cum_eps = cumulative(m, ks, &rev, q)?;
    let total = *cum_eps.last().unwrap();
    // I(2^{-i}) = total - int_{2^{-L} < |x| < 2^{-i}}
    let values: Vec<Complex64> = (0..eps.len()).map(|i| total - cum_eps[eps.len() - 1 - i]).collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let n = values.len();
    let last = values[n - 1];
    let extrapolated = if n >= 3 {
        let (a, b, c) = (values[n - 3], values[n - 2], last);
        let den = c - b * 2.0 + a;
        let aitken = c - (c - b) * (c - b) / den;
        if den.norm() > 1e-14 * c.norm().max(1.0) && aitken.re.is_finite() && aitken.im.is_finite() {
            aitken
        } else {
            last
        }
    } else {
        last
    };
    let l_holds = diffs.last().map_or(false, |&d| d <= cfg.cauchy_tolerance * extrapolated.norm().max(1.0));

    Ok(AssumptionReport {
        kernel: ks.name.clone(),
        cutoff: ks.cutoff.name.clone(),
        annulus_sup: sup,
        annulus_log_slope: slope,
        a_holds: sup <= cfg.annulus_bound,
        derivatives,
        d_holds,
        cauchy_differences: diffs,
        extrapolated_limit: extrapolated,
        l_holds,
    })
}

/// `K^{t}(x) = K(x)(1 - phi(x/t))`.
pub fn truncate(ks: &KernelSpec, t: f64) -> Result<impl Fn(&[f64]) -> Complex64 + '_> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("truncation scale must be positive".into()));
    }
    Ok(move |x: &[f64]| {
        let f = 1.0 - ks.cutoff.eval(norm(x) / t);
        if f == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            ks.eval(x) * f
        }
    })
}

/// `K_l = K^{2^{l-1}} - K^{2^l} = K (phi(2^{-l} x) - phi(2^{1-l} x))`.
#[derive(Debug, Clone)]
pub struct DyadicKernel {
    pub level: i32,
    pub kernel: KernelSpec,
}

impl DyadicKernel {
    pub fn scale(&self) -> f64 {
        libm::ldexp(1.0, self.level)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r = norm(x);
        let t = self.scale();
        let f = self.kernel.cutoff.eval(r / t) - self.kernel.cutoff.eval(2.0 * r / t);
        if f == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.kernel.eval(x) * f
        }
    }

    /// Radii where the profile is not smooth.
    pub fn breakpoints(&self) -> [f64; 3] {
        let t = self.scale();
        [0.25 * t, 0.5 * t, t]
    }
}

pub fn dyadic_piece(ks: &KernelSpec, level: i32) -> DyadicKernel {
    DyadicKernel { level, kernel: ks.clone() }
}

/// Product-formula translation tuned for dyadic kernel pieces.
pub fn kernel_translation(multiplicities: &[f64]) -> ProductTranslation {
    ProductTranslation::new(multiplicities, 1.0 / 16.0, 32)
}

/// `K_l(x, y) = tau_x K_l(-y)`.
pub fn two_point_kernel(pt: &ProductTranslation, dk: &DyadicKernel, x: &[f64], y: &[f64]) -> Result<Complex64> {
    let n = pt.dimension();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if x.len() != n { x.len() } else { y.len() } });
    }
    let z: Vec<f64> = y.iter().map(|v| -v).collect();
    Ok(pt.translate(x, &z, &dk.breakpoints(), |a| dk.eval(a)))
}

/// A sample `(x, y, y')` for the dyadic estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
}

impl DyadicSample {
    pub fn scaled(&self, s: f64) -> Self {
        let f = |v: &[f64]| v.iter().map(|c| c * s).collect();
        Self { x: f(&self.x), y: f(&self.y), y_prime: f(&self.y_prime) }
    }
}

/// Samples at unit scale: `x, y` in the cube `[-2, 2]^N` with `y'` within
/// distance `1/2` of `y`. Rescale by `2^l` for level `l`.
pub fn unit_samples(dim: usize, count: usize, seed: u64) -> Vec<DyadicSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let len = rng.gen_range(0.02..0.5);
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dn = norm(&dir).max(1e-12);
            let y_prime = y.iter().zip(&dir).map(|(v, d)| v + len * d / dn).collect();
            DyadicSample { x, y, y_prime }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicEstimateReport {
    pub level: i32,
    /// `sup |K_l(x,y)| (1 + |x-y|/2^l)^e w(B(x,2^l))^{1/2} w(B(y,2^l))^{1/2}`.
    pub size_constant: f64,
    /// The same with `|K_l(x,y) - K_l(x,y')| (2^l / |y-y'|)^e`, over `|y-y'| <= 2^l`.
    pub holder_constant: f64,
    pub samples: usize,
}

pub fn check_dyadic_estimates(
    pt: &ProductTranslation,
    m: &WeightedMeasure,
    dk: &DyadicKernel,
    samples: &[DyadicSample],
    q: &QuadratureSpec,
) -> Result<DyadicEstimateReport> {
    let t = dk.scale();
    let e = dk.kernel.epsilon;
    let mut report = DyadicEstimateReport { level: dk.level, size_constant: 0.0, holder_constant: 0.0, samples: 0 };
    for s in samples {
        let dist = crate::geometry::distance(&s.x, &s.y);
        let vol = libm::sqrt(ball_volume(m, &s.x, t, q)? * ball_volume(m, &s.y, t, q)?);
        let decay = libm::pow(1.0 + dist / t, e);
        let k = two_point_kernel(pt, dk, &s.x, &s.y)?;
        report.size_constant = report.size_constant.max(k.norm() * decay * vol);
        let h = crate::geometry::distance(&s.y, &s.y_prime);
        if h > 0.0 && h <= t {
            let kp = two_point_kernel(pt, dk, &s.x, &s.y_prime)?;
            report.holder_constant = report.holder_constant.max((k - kp).norm() * libm::pow(t / h, e) * decay * vol);
        }
        report.samples += 1;
    }
    Ok(report)
}

/// `max / min` of a family of measured constants.
pub fn level_stability(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSumReport {
    pub value: Complex64,
    pub orbit_distance: f64,
    /// `sum |K_l(x,y)| w(B(x,d)) (|x-y|/d)^e`.
    pub size_functional: f64,
    /// `sum |K_l(x,y) - K_l(x,y')| w(B(x,d)) (|x-y|/|y-y'|)^e`, when `|y-y'| < d/2`.
    pub holder_functional: Option<f64>,
    pub levels: (i32, i32),
}

pub fn kernel_sum(
    pt: &ProductTranslation,
    g: &CoxeterGroup,
    m: &WeightedMeasure,
    ks: &KernelSpec,
    x: &[f64],
    y: &[f64],
    y_prime: Option<&[f64]>,
    levels: RangeInclusive<i32>,
    q: &QuadratureSpec,
) -> Result<KernelSumReport> {
    let d = g.orbit_distance(x, y);
    if !(d > 0.0) {
        return Err(Error::OrbitDiagonal);
    }
    let e = ks.epsilon;
    let dist = crate::geometry::distance(x, y);
    let vol = ball_volume(m, x, d, q)?;
    let yp = y_prime.filter(|p| crate::geometry::distance(y, p) < 0.5 * d);
    let h = yp.map(|p| crate::geometry::distance(y, p));
    let mut value = Complex64::new(0.0, 0.0);
    let (mut abs_sum, mut diff_sum) = (0.0, 0.0);
    for level in levels.clone() {
        let dk = dyadic_piece(ks, level);
        let k = two_point_kernel(pt, &dk, x, y)?;
        value += k;
        abs_sum += k.norm();
        if let Some(p) = yp {
            if h != Some(0.0) {
                diff_sum += (k - two_point_kernel(pt, &dk, x, p)?).norm();
            }
        }
    }
    let holder = h.map(|h| if h == 0.0 { 0.0 } else { diff_sum * vol * libm::pow(dist / h, e) });
    Ok(KernelSumReport {
        value,
        orbit_distance: d,
        size_functional: abs_sum * vol * libm::pow(dist / d, e),
        holder_functional: holder,
        levels: (*levels.start(), *levels.end()),
    })
}
