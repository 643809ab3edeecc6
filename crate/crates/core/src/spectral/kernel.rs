use crate::error::{Error, Result};
use crate::geometry::{dot, reflect, RootSystem};
use crate::special::Rank1Kernel;
use alloc::vec::Vec;
use num_complex::Complex64;

/// `E(x, y)` for rank-one systems and their orthogonal products, evaluated
/// coordinatewise.
#[derive(Debug, Clone)]
pub struct DunklKernel {
    axes: Vec<Rank1Kernel>,
}

impl DunklKernel {
    pub fn new(rs: &RootSystem) -> Result<Self> {
        let ks = rs.axis_multiplicities().ok_or(Error::NoClosedForm)?;
        Ok(Self::from_multiplicities(&ks))
    }

    pub fn from_multiplicities(ks: &[f64]) -> Self {
        Self { axes: ks.iter().map(|&k| Rank1Kernel::new(k)).collect() }
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, i: usize) -> &Rank1Kernel {
        &self.axes[i]
    }

    pub fn eval(&self, x: &[f64], y: &[Complex64]) -> Complex64 {
        self.axes
            .iter()
            .zip(x.iter().zip(y))
            .map(|(e, (&xi, &yi))| e.eval(yi * xi))
            .product()
    }

    /// Gradient of `x -> E(x, y)`.
    pub fn gradient_x(&self, x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
        let parts: Vec<(Complex64, Complex64)> = self
            .axes
            .iter()
            .zip(x.iter().zip(y))
            .map(|(e, (&xi, &yi))| {
                let (v, d) = e.eval_with_derivative(yi * xi);
                (v, d * yi)
            })
            .collect();
        (0..parts.len())
            .map(|i| {
                parts
                    .iter()
                    .enumerate()
                    .map(|(j, p)| if j == i { p.1 } else { p.0 })
                    .product()
            })
            .collect()
    }
}

/// `E(x, y)` with a complex second argument.
pub fn dunkl_kernel(rs: &RootSystem, x: &[f64], y: &[Complex64]) -> Result<Complex64> {
    rs.check_point(x)?;
    if y.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    Ok(DunklKernel::new(rs)?.eval(x, y))
}

/// The Dunkl operator `T_xi` applied to `f`, given its gradient:
///
/// `T_xi f(x) = d_xi f(x) + sum_alpha k(alpha)/2 <alpha, xi> (f(x) - f(sigma_alpha x)) / <alpha, x>`
///
/// On a hyperplane `<alpha, x> = 0` the quotient is replaced by `<alpha, grad f(x)>`.
pub fn dunkl_operator<'a, F, G>(
    rs: &'a RootSystem,
    xi: &'a [f64],
    f: F,
    grad: Option<G>,
) -> Result<impl Fn(&[f64]) -> Complex64 + 'a>
where
    F: Fn(&[f64]) -> Complex64 + 'a,
    G: Fn(&[f64]) -> Vec<Complex64> + 'a,
{
    let grad = grad.ok_or(Error::MissingDerivative)?;
    rs.check_point(xi)?;
    Ok(move |x: &[f64]| {
        let g = grad(x);
        let fx = f(x);
        let mut out: Complex64 = g.iter().zip(xi).map(|(gi, &v)| gi * v).sum();
        for (alpha, &k) in rs.roots().iter().zip(rs.multiplicities()) {
            if k == 0.0 {
                continue;
            }
            let ax = dot(alpha, x);
            let c = 0.5 * k * dot(alpha, xi);
            let quotient = if ax.abs() < 1e-13 {
                g.iter().zip(alpha).map(|(gi, &a)| gi * a).sum()
            } else {
                (fx - f(&reflect(alpha, x))) / ax
            };
            out += quotient * c;
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn operator_on_monomials() {
        for k in [0.0, 0.5, 1.0, 2.0] {
            let rs = RootSystem::rank1(k).unwrap();
            let xi = [1.0];
            let lin = dunkl_operator(&rs, &xi, |x: &[f64]| c(x[0]), Some(|_: &[f64]| vec![c(1.0)])).unwrap();
            let quad = dunkl_operator(&rs, &xi, |x: &[f64]| c(x[0] * x[0]), Some(|x: &[f64]| vec![c(2.0 * x[0])])).unwrap();
            for x in [-1.3, 0.0, 0.7] {
                assert!((lin(&[x]) - c(1.0 + 2.0 * k)).norm() < 1e-14);
                assert!((quad(&[x]) - c(2.0 * x)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn operator_needs_gradient() {
        let rs = RootSystem::rank1(1.0).unwrap();
        let r = dunkl_operator(&rs, &[1.0], |_: &[f64]| c(1.0), None::<fn(&[f64]) -> Vec<Complex64>>);
        assert!(matches!(r, Err(Error::MissingDerivative)));
    }

    #[test]
    fn kernel_against_series_oracle() {
        // coefficients a_n (n + k (1 - (-1)^n)) = a_{n-1}, 60 terms
        let k = 1.0;
        let z: f64 = 0.5 * 0.7;
        let mut a = 1.0;
        let mut sum = 1.0;
        for n in 1..60 {
            let nf = n as f64;
            a /= nf + k * (1.0 - if n % 2 == 0 { 1.0 } else { -1.0 });
            sum += a * libm::pow(z, nf);
        }
        let rs = RootSystem::rank1(k).unwrap();
        let e = dunkl_kernel(&rs, &[0.5], &[c(0.7)]).unwrap();
        assert!((e.re - sum).abs() < 1e-10 && e.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_basic_properties() {
        let rs = RootSystem::product(&[0.0, 0.0]).unwrap();
        let e = dunkl_kernel(&rs, &[0.3, -1.2], &[c(0.5), c(2.0)]).unwrap();
        assert!((e.re - libm::exp(0.15 - 2.4)).abs() < 1e-14);
        let rs = RootSystem::product(&[1.0, 0.5]).unwrap();
        assert_eq!(dunkl_kernel(&rs, &[0.0, 0.0], &[c(3.0), c(-2.0)]).unwrap(), c(1.0));
        let a = dunkl_kernel(&rs, &[0.4, 1.1], &[c(2.0), c(-0.3)]).unwrap();
        let b = dunkl_kernel(&rs, &[2.0, -0.3], &[c(0.4), c(1.1)]).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert_eq!(dunkl_kernel(&RootSystem::a2(1.0).unwrap(), &[0.0, 0.0], &[c(1.0), c(1.0)]), Err(Error::NoClosedForm));
    }
}
