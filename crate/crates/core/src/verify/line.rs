//! Flat connections on the two-dimensional warped product `dt² + f(t)² dμ²`
//! with `f(t) = √(4a) exp(−t/s)`, `s = √(4b − 1)`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{domain, precondition, Result};
use crate::linalg::{Array3, Array4, Matrix};
use crate::models::{elliptic_metric, takano_geometry, EllipticFamily, TakanoSpace};
use crate::tensor::{
    curvature_at, dual_connection, pullback_connection, ChartMap, ConnectionField, MapJet,
};
use crate::ChartBox;

/// Max ODE residual accepted by [`line_connection_build`].
pub const ODE_TOL: f64 = 1e-10;

type LineFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients `k(t)` of `D_∂t ∂t = k ∂t` and `l(t)` of `P_∂t ∂μ = l ∂μ`.
#[derive(Clone)]
pub struct LinePair {
    k: LineFn,
    l: LineFn,
    dk: Option<LineFn>,
    dl: Option<LineFn>,
}

impl core::fmt::Debug for LinePair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("LinePair")
    }
}

impl LinePair {
    /// Derivatives by central differences.
    pub fn new(
        k: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        LinePair {
            k: Arc::new(k),
            l: Arc::new(l),
            dk: None,
            dl: None,
        }
    }

    pub fn constant(k: f64, l: f64) -> Self {
        LinePair::new(move |_| k, move |_| l).with_derivatives(|_| 0.0, |_| 0.0)
    }

    pub fn with_derivatives(
        mut self,
        dk: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dl: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dk = Some(Arc::new(dk));
        self.dl = Some(Arc::new(dl));
        self
    }

    pub fn k(&self, t: f64) -> f64 {
        (self.k)(t)
    }

    pub fn l(&self, t: f64) -> f64 {
        (self.l)(t)
    }

    pub fn dk(&self, t: f64) -> f64 {
        self.dk
            .as_ref()
            .map_or_else(|| central(&self.k, t), |d| d(t))
    }

    pub fn dl(&self, t: f64) -> f64 {
        self.dl
            .as_ref()
            .map_or_else(|| central(&self.l, t), |d| d(t))
    }
}

fn central(f: &LineFn, t: f64) -> f64 {
    let h = crate::fd::step(t);
    (f(t + h) - f(t - h)) / (2.0 * h)
}

fn s_of(b: f64) -> Result<f64> {
    if !(4.0 * b - 1.0 > 0.0) {
        return Err(domain(format!(
            "4b − 1 = {} must be positive",
            4.0 * b - 1.0
        )));
    }
    Ok(libm::sqrt(4.0 * b - 1.0))
}

/// Signed residuals at the points of largest magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeResidual {
    /// `k l − 1/(4b−1) − l²`.
    pub algebraic: f64,
    /// `−k/√(4b−1) − ∂_t l + 2l/√(4b−1)`.
    pub differential: f64,
    pub points: Vec<f64>,
}

impl OdeResidual {
    pub fn max_abs(&self) -> f64 {
        self.algebraic.abs().max(self.differential.abs())
    }
}

pub fn ode_residual(pair: &LinePair, b: f64, t_grid: &[f64]) -> Result<OdeResidual> {
    let s = s_of(b)?;
    let mut out = OdeResidual {
        algebraic: 0.0,
        differential: 0.0,
        points: t_grid.to_vec(),
    };
    for &t in t_grid {
        let (k, l) = (pair.k(t), pair.l(t));
        let r1 = k * l - 1.0 / (s * s) - l * l;
        let r2 = -k / s - pair.dl(t) + 2.0 * l / s;
        if r1.abs() > out.algebraic.abs() {
            out.algebraic = r1;
        }
        if r2.abs() > out.differential.abs() {
            out.differential = r2;
        }
    }
    Ok(out)
}

/// The constant solutions `(2/s, 1/s)` and `(−2/s, −1/s)`. The second is the
/// first seen through the dual connection, which flips both signs.
pub fn constant_solutions(b: f64) -> Result<[(f64, f64); 2]> {
    let s = s_of(b)?;
    Ok([(2.0 / s, 1.0 / s), (-2.0 / s, -1.0 / s)])
}

/// `(k, l) = (2/√(4b−1), 1/√(4b−1))`.
pub fn constant_l_solve(b: f64) -> Result<(f64, f64)> {
    Ok(constant_solutions(b)?[0])
}

/// Non-constant solutions `l = √(1/s² + C e^{2t/s})`, `k = l + 1/(s² l)`;
/// `C = 0` recovers the constant one.
pub fn ode_family_solution(b: f64, c: f64) -> Result<LinePair> {
    let s = s_of(b)?;
    if c < 0.0 {
        return Err(domain("only C ≥ 0 keeps l real on the whole line"));
    }
    let l = move |t: f64| libm::sqrt(1.0 / (s * s) + c * libm::exp(2.0 * t / s));
    let dl = move |t: f64| c * libm::exp(2.0 * t / s) / (s * l(t));
    Ok(LinePair::new(move |t| l(t) + 1.0 / (s * s * l(t)), l)
        .with_derivatives(move |t| dl(t) * (1.0 - 1.0 / (s * s * l(t) * l(t))), dl))
}

/// `D_∂t ∂t = k ∂t`, `D_∂t ∂μ = D_∂μ ∂t = ∇_∂t ∂μ + l ∂μ`,
/// `D_∂μ ∂μ = ∇_∂μ ∂μ + γ ∂μ + l f² ∂t`, with `∇` the Levi-Civita connection
/// of the elliptic metric. No ODE check.
pub fn line_connection(fam: &EllipticFamily, pair: &LinePair, gamma: f64) -> ConnectionField {
    let f = *fam;
    let s = f.s();
    let (p0, p1) = (pair.clone(), pair.clone());
    ConnectionField::new(f.chart(), format!("warped line γ={gamma}"), move |p| {
        let t = p[0];
        let w2 = f.warp(t) * f.warp(t);
        let (k, l) = (p0.k(t), p0.l(t));
        let mut a = Array3::zeros(2);
        a[(0, 0, 0)] = k;
        a[(1, 0, 1)] = l - 1.0 / s;
        a[(1, 1, 0)] = l - 1.0 / s;
        a[(0, 1, 1)] = w2 * (1.0 / s + l);
        a[(1, 1, 1)] = gamma;
        Ok(a)
    })
    .with_partials(move |p| {
        let t = p[0];
        let w2 = f.warp(t) * f.warp(t);
        let l = p1.l(t);
        let dl = p1.dl(t);
        let mut a = Array4::zeros(2);
        a[(0, 0, 0, 0)] = p1.dk(t);
        a[(0, 1, 0, 1)] = dl;
        a[(0, 1, 1, 0)] = dl;
        a[(0, 0, 1, 1)] = w2 * (-2.0 / s * (1.0 / s + l) + dl);
        Ok(a)
    })
}

/// [`line_connection`] gated on the ODE residual over the `t` window.
pub fn line_connection_build(
    fam: &EllipticFamily,
    pair: &LinePair,
    gamma: f64,
) -> Result<ConnectionField> {
    let (lo, hi) = fam.chart().window()[0];
    let ts: Vec<f64> = (0..=32).map(|i| lo + (hi - lo) * i as f64 / 32.0).collect();
    let res = ode_residual(pair, fam.b, &ts)?;
    if res.max_abs() > ODE_TOL {
        return Err(precondition(
            "line ODE",
            format!(
                "residuals ({:e}, {:e}) exceed {ODE_TOL:e}",
                res.algebraic, res.differential
            ),
        ));
    }
    Ok(line_connection(fam, pair, gamma))
}

/// `(R(V,X,X,V), R*(V,X,X,V))` for `X = ∂t`, `V = ∂μ`, from the closed-form
/// expression in `k`, `l` and `∂_t l`.
pub fn line_curvature_closed_form(fam: &EllipticFamily, pair: &LinePair, t: f64) -> (f64, f64) {
    let s = fam.s();
    let w2 = fam.warp(t) * fam.warp(t);
    let (k, l, dl) = (pair.k(t), pair.l(t), pair.dl(t));
    let common = k * l - 1.0 / (s * s) - l * l;
    let odd = -k / s - dl + 2.0 * l / s;
    (w2 * (common + odd), w2 * (common - odd))
}

/// The same pair of values through the general curvature tensor.
pub fn line_curvature_numeric(
    fam: &EllipticFamily,
    d: &ConnectionField,
    p: &[f64],
) -> Result<(f64, f64)> {
    let g = elliptic_metric(fam);
    let dual = dual_connection(&g, d)?;
    let gm = g.at(p)?;
    let value = |c: &ConnectionField| -> Result<f64> {
        let r = curvature_at(c, p)?;
        Ok((0..2).map(|l| r[(l, 0, 1, 0)] * gm[(l, 1)]).sum())
    };
    Ok((value(d)?, value(&dual)?))
}

/// `(k, l)` read off the Takano `±1` pair after `σ = exp(t/√(2n))`, plus the
/// largest deviation from those values over the sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TakanoLinePair {
    pub k: f64,
    pub l: f64,
    pub spread: f64,
}

pub fn takano_line_pair(n: usize) -> Result<TakanoLinePair> {
    let space = TakanoSpace::new(n, -1.0)?;
    let (_, d) = takano_geometry(&space);
    let (_, d_star) = takano_geometry(&TakanoSpace::new(n, 1.0)?);
    let r = libm::sqrt(2.0 * n as f64);
    let dim = n + 1;
    let inf = f64::INFINITY;
    let mut bounds = alloc::vec![(-inf, inf)];
    bounds.extend(alloc::vec![(-inf, inf); n]);
    let mut window = alloc::vec![(-0.5, 0.5)];
    window.extend(alloc::vec![(-1.0, 1.0); n]);
    let source = ChartBox::new("takano (t, m)", bounds)?.with_window(window)?;
    let map = ChartMap::new(source.clone(), move |u| {
        let sigma = libm::exp(u[0] / r);
        let mut value = u.to_vec();
        value[0] = sigma;
        let mut jacobian = Matrix::identity(dim);
        jacobian[(0, 0)] = sigma / r;
        let mut hessian = Array3::zeros(dim);
        hessian[(0, 0, 0)] = sigma / (r * r);
        Ok(MapJet {
            value,
            jacobian,
            hessian,
        })
    });
    let d_t = pullback_connection(&d, &map, "takano(-1) in t")?;
    let d_star_t = pullback_connection(&d_star, &map, "takano(+1) in t")?;
    let grid = source.default_grid();
    let read = |p: &[f64]| -> Result<(f64, f64)> {
        let a = d_t.at(p)?;
        let b = d_star_t.at(p)?;
        Ok((a[(0, 0, 0)], 0.5 * (a[(1, 0, 1)] - b[(1, 0, 1)])))
    };
    let (k, l) = read(&grid.points()[0])?;
    let mut spread: f64 = 0.0;
    for p in &grid {
        let (kk, ll) = read(p)?;
        spread = spread.max((kk - k).abs()).max((ll - l).abs());
    }
    Ok(TakanoLinePair { k, l, spread })
}
