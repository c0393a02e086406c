//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use alloc::vec::Vec;

use crate::error::{GeomError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target absolute error of the whole integral.
    pub abs_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// `∫_a^b f` with bisection of the worst subinterval until the summed error
/// estimate is below `cfg.abs_tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: QuadratureConfig) -> Result<f64> {
    let mut pieces: Vec<Piece> = alloc::vec![kronrod(f, a, b)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        if !total.is_finite() || !total_err.is_finite() {
            return Err(GeomError::Quadrature {
                estimate: total_err,
                tolerance: cfg.abs_tol,
            });
        }
        if total_err <= cfg.abs_tol {
            return Ok(total);
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(GeomError::Quadrature {
                estimate: total_err,
                tolerance: cfg.abs_tol,
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(kronrod(f, p.a, mid));
        pieces.push(kronrod(f, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x| x * x * x - x, 0.0, 2.0, QuadratureConfig::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand() {
        let v = integrate(
            &|x| 1.0 / (1e-4 + x * x),
            -1.0,
            1.0,
            QuadratureConfig::default(),
        )
        .unwrap();
        let exact = 2.0 / 1e-2 * libm::atan(1.0 / 1e-2);
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-300,
            max_intervals: 3,
        };
        match integrate(&|x| libm::sqrt((x - 1.3f64).abs()), 0.0, 3.0, cfg) {
            Err(GeomError::Quadrature {
                estimate,
                tolerance,
            }) => {
                assert!(estimate > tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
