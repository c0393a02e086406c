//! Finite-difference derivatives of vector-valued point functions.
//!
//! All functions take `f: point -> flat vector` and return derivatives in a
//! flat layout: first derivatives at `i * m + a`, second derivatives at
//! `(i * dim + j) * m + a`, where `m` is the output length.

use alloc::vec;
use alloc::vec::Vec;

use crate::chart::ChartBox;
use crate::error::{GeomError, Result};

/// How first derivatives are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdScheme {
    /// Second-order central difference.
    #[default]
    Central,
    /// Central difference at `h` and `h/2` combined to fourth order.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FdConfig {
    pub scheme: FdScheme,
}

/// Step for central differences: `cbrt(eps) * max(1, |x|)`.
#[inline]
pub fn step(x: f64) -> f64 {
    libm::cbrt(f64::EPSILON) * x.abs().max(1.0)
}

/// Step for the fourth-order second-derivative stencil: `eps^(1/6) * max(1, |x|)`.
#[inline]
pub fn step_second(x: f64) -> f64 {
    libm::pow(f64::EPSILON, 1.0 / 6.0) * x.abs().max(1.0)
}

fn shifted(chart: &ChartBox, p: &[f64], coord: usize, delta: f64) -> Result<Vec<f64>> {
    let mut q = p.to_vec();
    q[coord] += delta;
    if !chart.contains(&q) {
        return Err(GeomError::StepOutsideChart {
            point: p.to_vec(),
            coord,
        });
    }
    Ok(q)
}

fn central(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    chart: &ChartBox,
    p: &[f64],
    i: usize,
    h: f64,
) -> Result<Vec<f64>> {
    let fp = f(&shifted(chart, p, i, h)?)?;
    let fm = f(&shifted(chart, p, i, -h)?)?;
    Ok(fp
        .iter()
        .zip(&fm)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect())
}

/// First partials `∂_i f_a` at `p`.
pub fn gradient(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    chart: &ChartBox,
    p: &[f64],
    cfg: FdConfig,
) -> Result<Vec<f64>> {
    chart.check(p)?;
    let dim = p.len();
    let mut out = Vec::new();
    for i in 0..dim {
        let h = step(p[i]);
        let d = match cfg.scheme {
            FdScheme::Central => central(f, chart, p, i, h)?,
            FdScheme::Richardson => {
                let coarse = central(f, chart, p, i, h)?;
                let fine = central(f, chart, p, i, 0.5 * h)?;
                fine.iter()
                    .zip(&coarse)
                    .map(|(a, b)| (4.0 * a - b) / 3.0)
                    .collect()
            }
        };
        out.extend(d);
    }
    Ok(out)
}

const W4: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Second partials `∂_i ∂_j f_a` at `p` with fourth-order stencils.
pub fn hessian(
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    chart: &ChartBox,
    p: &[f64],
) -> Result<Vec<f64>> {
    chart.check(p)?;
    let dim = p.len();
    let f0 = f(p)?;
    let m = f0.len();
    let mut out = vec![0.0; dim * dim * m];
    for i in 0..dim {
        let hi = step_second(p[i]);
        // Diagonal: (-f(+2h) + 16 f(+h) - 30 f + 16 f(-h) - f(-2h)) / (12 h^2).
        let mut acc: Vec<f64> = f0.iter().map(|v| -30.0 * v).collect();
        for (k, w) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            let v = f(&shifted(chart, p, i, k * hi)?)?;
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += w * x;
            }
        }
        for a in 0..m {
            out[(i * dim + i) * m + a] = acc[a] / (12.0 * hi * hi);
        }
        for j in 0..i {
            let hj = step_second(p[j]);
            let mut acc = vec![0.0; m];
            for (ki, wi) in W4 {
                let pi = shifted(chart, p, i, ki * hi)?;
                for (kj, wj) in W4 {
                    let v = f(&shifted(chart, &pi, j, kj * hj)?)?;
                    for (a, x) in acc.iter_mut().zip(&v) {
                        *a += wi * wj * x;
                    }
                }
            }
            for a in 0..m {
                let v = acc[a] / (144.0 * hi * hj);
                out[(i * dim + j) * m + a] = v;
                out[(j * dim + i) * m + a] = v;
            }
        }
    }
    Ok(out)
}
