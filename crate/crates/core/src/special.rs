//! The rank-one Dunkl kernel `E_k(z)` (so that `E(x, y) = E_k(xy)`) and the
//! normalized Bessel functions it is built from.
//!
//! Evaluation routes:
//!
//! * `k = 0`: the exponential.
//! * `|z| <= 8`: the power series fixed by the defining system.
//! * purely imaginary `z`: normalized Bessel functions by Miller's backward
//!   recurrence, normalized with the Neumann series for `(x/2)^nu`.
//! * otherwise: the Laplace-type integral over `[-1, 1]` by tanh-sinh.

use crate::quadrature::TanhSinh;
use core::f64::consts::PI;
use num_complex::Complex64;

const SERIES_RADIUS: f64 = 8.0;

/// Evaluator of `E_k` for a fixed multiplicity `k >= 0`.
#[derive(Debug, Clone)]
pub struct Rank1Kernel {
    k: f64,
    integral_const: f64,
    rule: Option<TanhSinh>,
}

impl Rank1Kernel {
    pub fn new(k: f64) -> Self {
        assert!(k >= 0.0 && k.is_finite(), "multiplicity must be a nonnegative real");
        if k == 0.0 {
            return Self { k, integral_const: 0.0, rule: None };
        }
        let integral_const = libm::tgamma(k + 0.5) / (libm::sqrt(PI) * libm::tgamma(k));
        let rule = TanhSinh::for_exponent(1.0 / 32.0, (k - 1.0).min(0.0));
        Self { k, integral_const, rule: Some(rule) }
    }

    pub fn multiplicity(&self) -> f64 {
        self.k
    }

    /// `E_k(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// `E_k(z)` together with `dE_k/dz`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        if self.k == 0.0 {
            let e = z.exp();
            return (e, e);
        }
        if z.norm() <= SERIES_RADIUS {
            return series(self.k, z);
        }
        if z.re == 0.0 {
            return imaginary_axis(self.k, z.im);
        }
        self.integral(z)
    }

    fn integral(&self, z: Complex64) -> (Complex64, Complex64) {
        let rule = self.rule.as_ref().expect("integral route requires k > 0");
        let k = self.k;
        let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for node in rule.nodes() {
            // t in [-1, 1]; 1 + t and 1 - t formed from the complement
            let (one_plus, one_minus) = if node.x < 0.0 {
                (node.complement, 2.0 - node.complement)
            } else {
                (2.0 - node.complement, node.complement)
            };
            let t = node.x;
            let density = libm::pow(one_minus, k - 1.0) * libm::pow(one_plus, k);
            let e = (z * t).exp() * (density * node.weight);
            acc.0 += e;
            acc.1 += e * t;
        }
        (acc.0 * self.integral_const, acc.1 * self.integral_const)
    }
}

fn series(k: f64, z: Complex64) -> (Complex64, Complex64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = Complex64::new(0.0, 0.0);
    // coefficient a_n and the running power z^(n-1) for the derivative
    let mut a = 1.0;
    let mut zpow_prev = Complex64::new(1.0, 0.0);
    for n in 1..400usize {
        let nf = n as f64;
        let denom = if n % 2 == 1 { nf + 2.0 * k } else { nf };
        a /= denom;
        dsum += zpow_prev * (a * nf);
        zpow_prev *= z;
        term = zpow_prev * a;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) && n > 4 {
            break;
        }
    }
    (sum, dsum)
}

/// `E_k(i theta)` and its `z`-derivative for real `theta` with `|theta| > 0`.
fn imaginary_axis(k: f64, theta: f64) -> (Complex64, Complex64) {
    let x = theta.abs();
    let nu = k + 0.5;
    let [j_lo, j_mid, j_hi] = normalized_bessel_triple(nu, x);
    // E(i theta) = j_{nu-1}(x) + i theta/(2k+1) j_nu(x)
    let s = 1.0 / (2.0 * k + 1.0);
    let e = Complex64::new(j_lo, theta * s * j_mid);
    // d/dtheta of each part; j_a' = -x/(2(a+1)) j_{a+1}
    let d_even = -theta / (2.0 * nu) * j_mid;
    let d_odd = s * (j_mid - theta * theta / (2.0 * (nu + 1.0)) * j_hi);
    let d_theta = Complex64::new(d_even, d_odd);
    // dz = i dtheta
    (e, d_theta * Complex64::new(0.0, -1.0))
}

/// `[j_{nu-1}(x), j_nu(x), j_{nu+1}(x)]` for `nu > 0`, `x > 0`, where
/// `j_a(x) = Gamma(a + 1) (2/x)^a J_a(x)`.
pub fn normalized_bessel_triple(nu: f64, x: f64) -> [f64; 3] {
    assert!(nu > 0.0 && x > 0.0);
    let top = libm::ceil(x + 30.0 + 12.0 * libm::cbrt(x)) as usize + 2;
    // f[i] proportional to J_{nu + i - 1}(x), i = 0..=top
    let mut f = alloc::vec![0.0f64; top + 2];
    f[top + 1] = 0.0;
    f[top] = 1e-300;
    for i in (1..=top).rev() {
        let order = nu + i as f64 - 1.0;
        let next = 2.0 * order / x * f[i] - f[i + 1];
        f[i - 1] = next;
        if next.abs() > 1e250 {
            for v in f[i - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // (x/2)^nu / Gamma(nu + 1) = sum_n d_n J_{nu+2n}, d_0 = 1,
    // d_n = (nu + 2n)/n * prod_{i<n} (nu + i)/i
    let mut s = f[1];
    let mut prod = 1.0;
    let mut n = 1usize;
    while 2 * n + 1 <= top {
        if n > 1 {
            let i = (n - 1) as f64;
            prod *= (nu + i) / i;
        }
        let d = (nu + 2.0 * n as f64) / n as f64 * prod;
        s += d * f[2 * n + 1];
        n += 1;
    }
    // j_a = Gamma(a+1)(2/x)^a J_a with J_nu = f[1] (x/2)^nu / (Gamma(nu+1) s)
    let j_mid = f[1] / s;
    let j_lo = f[0] * x / (2.0 * nu * s);
    let j_hi = f[2] * 2.0 * (nu + 1.0) / (x * s);
    [j_lo, j_mid, j_hi]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_at_origin_is_one() {
        for k in [0.0, 0.3, 0.5, 1.0, 2.5] {
            let e = Rank1Kernel::new(k).eval(c(0.0, 0.0));
            assert!((e - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_multiplicity_matches_closed_form() {
        // k = 1: E(i t) = sin t / t + i (sin t / t^2 - cos t / t)
        let ker = Rank1Kernel::new(1.0);
        for t in [0.3, 5.0, 9.0, 20.0, 75.0, 310.0] {
            let e = ker.eval(c(0.0, t));
            let even = libm::sin(t) / t;
            let odd = libm::sin(t) / (t * t) - libm::cos(t) / t;
            assert!((e.re - even).abs() < 1e-12, "t={t} {} {}", e.re, even);
            assert!((e.im - odd).abs() < 1e-12, "t={t} {} {}", e.im, odd);
        }
    }

    #[test]
    fn routes_agree_at_switch_radius() {
        for k in [0.2, 0.5, 1.0, 1.7] {
            let ker = Rank1Kernel::new(k);
            for z in [c(7.9, 0.0), c(-7.9, 0.0), c(0.0, 7.9), c(0.0, -7.9), c(5.0, 5.0)] {
                let (s, ds) = series(k, z);
                let (i, di) = ker.integral(z);
                assert!((s - i).norm() < 1e-10 * s.norm().max(1.0), "k={k} z={z} {s} {i}");
                assert!((ds - di).norm() < 1e-9 * ds.norm().max(1.0), "k={k} z={z} {ds} {di}");
                if z.re == 0.0 {
                    let (b, db) = imaginary_axis(k, z.im);
                    assert!((s - b).norm() < 1e-12, "k={k} z={z} {s} {b}");
                    assert!((ds - db).norm() < 1e-11, "k={k} z={z} {ds} {db}");
                }
            }
        }
    }

    #[test]
    fn imaginary_route_matches_integral_far_out() {
        for k in [0.3, 1.0, 2.0] {
            let ker = Rank1Kernel::new(k);
            for t in [12.0, 25.0, -40.0] {
                let (b, db) = imaginary_axis(k, t);
                let (i, di) = ker.integral(c(0.0, t));
                assert!((b - i).norm() < 1e-10, "k={k} t={t} {b} {i}");
                assert!((db - di).norm() < 1e-9, "k={k} t={t} {db} {di}");
            }
        }
    }

    #[test]
    fn defining_identity_holds() {
        // E'(z) = E(z) - k (E(z) - E(-z)) / z
        for k in [0.5, 1.0, 1.3] {
            let ker = Rank1Kernel::new(k);
            for z in [c(3.0, 0.0), c(12.0, 0.0), c(0.0, 50.0), c(-20.0, 0.0), c(2.0, -1.0)] {
                let (e, de) = ker.eval_with_derivative(z);
                let em = ker.eval(-z);
                let rhs = e - (e - em) * k / z;
                assert!((de - rhs).norm() < 1e-9 * e.norm().max(1.0), "k={k} z={z}");
            }
        }
    }

    #[test]
    fn unit_modulus_bound_on_imaginary_axis() {
        for k in [0.5, 1.0] {
            let ker = Rank1Kernel::new(k);
            for i in 0..200 {
                let t = -300.0 + 3.0 * i as f64;
                assert!(ker.eval(c(0.0, t)).norm() <= 1.0 + 1e-12);
            }
        }
    }
}
