use super::{CommutatorSetup, RealFn};
use crate::error::{Error, Result};
use crate::kernels::{dyadic_piece, KernelSpec};
use crate::quadrature::GaussLegendre;
use crate::spectral::{axis_density, GridFunction, SpectralContext};
use alloc::vec::Vec;
use num_complex::Complex64;

/// `sum_{|l| <= m} K_l * f` through the multiplier
/// `int sum_l K_l(x) E(x, -i xi) dw(x)` on the frequency grid.
pub fn operator_apply(ctx: &SpectralContext, ks: &KernelSpec, f: &GridFunction, m: u32) -> Result<GridFunction> {
    if ctx.dimension() != 1 {
        return Err(Error::InvalidArgument("operator_apply supports rank-one contexts only".into()));
    }
    let k = ctx.multiplicities()[0];
    let freq = ctx.frequency_grid();
    let xi_max = freq.axes()[0].nodes().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rule = GaussLegendre::new(16);
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let m = m as i32;
    for l in -m..=m {
        let dk = dyadic_piece(ks, l);
        let t = dk.scale();
        for (a, b) in [(0.25 * t, 0.5 * t), (0.5 * t, t)] {
            let pieces = (libm::ceil((b - a) * xi_max / core::f64::consts::PI) as usize).max(1);
            let h = (b - a) / pieces as f64;
            for j in 0..pieces {
                let lo = a + j as f64 * h;
                for (s, w) in rule.mapped(lo, lo + h) {
                    let dens = w * axis_density(k, s);
                    for x in [s, -s] {
                        let v = dk.eval(&[x]).re;
                        if v != 0.0 {
                            nodes.push((x, v * dens));
                        }
                    }
                }
            }
        }
    }
    let mut spectrum = ctx.dunkl_transform(f)?;
    let e = ctx.kernel().axis(0);
    for (v, &xi) in spectrum.values_mut().iter_mut().zip(freq.axes()[0].nodes()) {
        let mult: Complex64 = nodes.iter().map(|&(x, w)| e.eval(Complex64::new(0.0, -xi * x)) * w).sum();
        *v *= mult;
    }
    ctx.inverse_transform(&spectrum)
}

/// `sum_{|l| <= m} int K_l(x, y) f(y) dw(y)` by direct quadrature of the
/// two-point kernels.
pub fn direct_operator_at(setup: &CommutatorSetup, f: RealFn<'_>, x: f64, m: u32) -> Result<f64> {
    let m = m as i32;
    let (mut row, mut buf) = (Vec::new(), Vec::new());
    let mut acc = 0.0;
    for l in -m..=m {
        setup.check_level(l)?;
        setup.row(&dyadic_piece(setup.kernel(), l), x, &mut row, &mut buf);
        acc += row.iter().map(|&(y, w)| w * f(y)).sum::<f64>();
    }
    Ok(acc)
}
