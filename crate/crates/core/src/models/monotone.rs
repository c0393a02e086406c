//! Monotone metrics on 2×2 positive Hermitian matrices, the mixture
//! connection, and the BKM cone over the density matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::ChartBox;
use crate::error::{domain, Result};
use crate::linalg::{Array3, Matrix};
use crate::tensor::{
    pullback_connection, pullback_metric, ChartMap, ConnectionField, MapJet, MetricField,
};

/// Relative eigenvalue gap below which `c(x, y)` uses its diagonal limit.
pub const DEGENERACY_RTOL: f64 = 1e-8;

/// The Hermitian matrix `[[a, b + ic], [b − ic, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Herm2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Herm2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Herm2 { a, b, c, d }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Herm2::new(v[0], v[1], v[2], v[3])
    }

    pub fn scale(self, k: f64) -> Self {
        Herm2::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    pub fn add(self, o: Herm2) -> Self {
        Herm2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Eigenvalues `(λ₁ ≥ λ₂)` and an orthonormal eigenbasis.
    pub fn eigen(self) -> Eigen2 {
        let mean = 0.5 * (self.a + self.d);
        let half = 0.5 * (self.a - self.d);
        let r = libm::sqrt(half * half + self.b * self.b + self.c * self.c);
        let (l1, l2) = (mean + r, mean - r);
        // Two candidate eigenvectors for λ₁; keep the better conditioned one.
        let u = [C::new(self.b, self.c), C::new(l1 - self.a, 0.0)];
        let v = [C::new(l1 - self.d, 0.0), C::new(self.b, -self.c)];
        let (nu, nv) = (norm2(&u), norm2(&v));
        let e1 = if nu == 0.0 && nv == 0.0 {
            [C::new(1.0, 0.0), C::new(0.0, 0.0)]
        } else if nu >= nv {
            let s = 1.0 / libm::sqrt(nu);
            [u[0].scale(s), u[1].scale(s)]
        } else {
            let s = 1.0 / libm::sqrt(nv);
            [v[0].scale(s), v[1].scale(s)]
        };
        let e2 = [e1[1].conj().scale(-1.0), e1[0].conj()];
        Eigen2 {
            values: [l1, l2],
            vectors: [e1, e2],
        }
    }

    fn entry(self, i: usize, j: usize) -> C {
        match (i, j) {
            (0, 0) => C::new(self.a, 0.0),
            (0, 1) => C::new(self.b, self.c),
            (1, 0) => C::new(self.b, -self.c),
            _ => C::new(self.d, 0.0),
        }
    }
}

/// Eigen-decomposition of a [`Herm2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    vectors: [[C; 2]; 2],
}

impl Eigen2 {
    /// Entries `v_i^* X v_j` of `X` in the eigenbasis.
    fn rotate(&self, x: Herm2) -> [[C; 2]; 2] {
        let mut out = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = C::new(0.0, 0.0);
                for r in 0..2 {
                    for c in 0..2 {
                        s = s.add(
                            self.vectors[i][r]
                                .conj()
                                .mul(x.entry(r, c))
                                .mul(self.vectors[j][c]),
                        );
                    }
                }
                out[i][j] = s;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct C {
    re: f64,
    im: f64,
}

impl C {
    const fn new(re: f64, im: f64) -> Self {
        C { re, im }
    }
    fn conj(self) -> Self {
        C::new(self.re, -self.im)
    }
    fn scale(self, s: f64) -> Self {
        C::new(s * self.re, s * self.im)
    }
    fn add(self, o: C) -> Self {
        C::new(self.re + o.re, self.im + o.im)
    }
    fn mul(self, o: C) -> Self {
        C::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

fn norm2(v: &[C; 2]) -> f64 {
    v.iter().map(|z| z.re * z.re + z.im * z.im).sum()
}

/// Operator-monotone symbols with `f(1) = 1` and `f(t) = t f(1/t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneSymbol {
    /// `f(x) = (x − 1)/log x`.
    Bkm,
    /// `f(x) = (1 + x)/2`.
    Sld,
}

impl MonotoneSymbol {
    pub fn f(self, x: f64) -> f64 {
        match self {
            MonotoneSymbol::Bkm => {
                let u = x - 1.0;
                if u == 0.0 {
                    1.0
                } else {
                    u / libm::log1p(u)
                }
            }
            MonotoneSymbol::Sld => 0.5 * (1.0 + x),
        }
    }

    /// `c(x, y) = 1/(y f(x/y))`, with the limit `2/(x + y)` near the diagonal.
    pub fn c(self, x: f64, y: f64) -> f64 {
        if (x - y).abs() < DEGENERACY_RTOL * x.max(y) {
            return 2.0 / (x + y);
        }
        1.0 / (y * self.f(x / y))
    }
}

/// `g^f_ρ(X, Y) = Σ_{ij} c(λ_i, λ_j) Re(conj(X'_{ij}) Y'_{ij})`, with `X'`, `Y'`
/// the tangents in the eigenbasis of `ρ`.
pub fn monotone_metric_2x2(symbol: MonotoneSymbol, rho: Herm2, x: Herm2, y: Herm2) -> Result<f64> {
    let e = rho.eigen();
    if !(e.values[1] > 0.0) {
        return Err(domain(format!(
            "matrix {rho:?} is not positive definite (eigenvalues {:?})",
            e.values
        )));
    }
    let (xr, yr) = (e.rotate(x), e.rotate(y));
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let w = symbol.c(e.values[i], e.values[j]);
            s += w * (xr[i][j].re * yr[i][j].re + xr[i][j].im * yr[i][j].im);
        }
    }
    Ok(s)
}

/// Coordinate tangents `E_a, E_b, E_c, E_d` of the entry chart.
pub const ENTRY_BASIS: [Herm2; 4] = [
    Herm2::new(1.0, 0.0, 0.0, 0.0),
    Herm2::new(0.0, 1.0, 0.0, 0.0),
    Herm2::new(0.0, 0.0, 1.0, 0.0),
    Herm2::new(0.0, 0.0, 0.0, 1.0),
];

/// Coordinate tangents `∂x, ∂y, ∂z` of the density chart.
pub const DENSITY_BASIS: [Herm2; 3] = [
    Herm2::new(1.0, 0.0, 0.0, -1.0),
    Herm2::new(0.0, 1.0, 0.0, 0.0),
    Herm2::new(0.0, 0.0, 1.0, 0.0),
];

/// Charts on (subsets of) the 2×2 positive matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixChart {
    /// `(a, b, c, d) ↦ [[a, b + ic], [b − ic, d]]` on all positive matrices.
    Entries,
    /// `(x, y, z) ↦ [[x, y + iz], [y − iz, 1 − x]]` on density matrices.
    Density,
    /// `(t, α, β, γ) ↦ t ρ(α, β, γ)` with `ρ` the density chart.
    ConeLinear,
    /// `(t, α, β, γ) ↦ t² ρ(α, β, γ)/4`.
    ConeWarped,
}

impl MatrixChart {
    pub fn dim(self) -> usize {
        match self {
            MatrixChart::Density => 3,
            _ => 4,
        }
    }

    pub fn chart(self) -> ChartBox {
        let inf = f64::INFINITY;
        let density_bounds = [(0.0, 1.0), (-0.5, 0.5), (-0.5, 0.5)];
        let density_window = [(0.3, 0.7), (-0.15, 0.15), (-0.15, 0.15)];
        let (label, names, bounds, window): (&str, [&str; 4], Vec<_>, Vec<_>) = match self {
            MatrixChart::Entries => (
                "positive 2x2",
                ["a", "b", "c", "d"],
                vec![(0.0, inf), (-inf, inf), (-inf, inf), (0.0, inf)],
                vec![(0.5, 2.0), (-0.2, 0.2), (-0.2, 0.2), (0.5, 2.0)],
            ),
            MatrixChart::Density => (
                "density 2x2",
                ["x", "y", "z", ""],
                density_bounds.to_vec(),
                density_window.to_vec(),
            ),
            MatrixChart::ConeLinear | MatrixChart::ConeWarped => {
                let mut b = vec![(0.0, inf)];
                b.extend_from_slice(&density_bounds);
                let mut w = vec![(0.5, 2.0)];
                w.extend_from_slice(&density_window);
                let label = if self == MatrixChart::ConeLinear {
                    "bkm cone (linear)"
                } else {
                    "bkm cone (warped)"
                };
                (label, ["t", "alpha", "beta", "gamma"], b, w)
            }
        };
        ChartBox::new(label, bounds)
            .and_then(|c| c.with_names(&names[..self.dim()]))
            .and_then(|c| c.with_window(window))
            .expect("matrix chart is well formed")
    }

    /// The matrix at `p`.
    pub fn matrix(self, p: &[f64]) -> Herm2 {
        match self {
            MatrixChart::Entries => Herm2::from_slice(p),
            MatrixChart::Density => density(p),
            MatrixChart::ConeLinear => density(&p[1..]).scale(p[0]),
            MatrixChart::ConeWarped => density(&p[1..]).scale(0.25 * p[0] * p[0]),
        }
    }

    /// `∂_i M` at `p`.
    pub fn first(self, p: &[f64]) -> Vec<Herm2> {
        match self {
            MatrixChart::Entries => ENTRY_BASIS.to_vec(),
            MatrixChart::Density => DENSITY_BASIS.to_vec(),
            MatrixChart::ConeLinear | MatrixChart::ConeWarped => {
                let t = p[0];
                let (s, ds) = if self == MatrixChart::ConeLinear {
                    (t, 1.0)
                } else {
                    (0.25 * t * t, 0.5 * t)
                };
                let mut out = vec![density(&p[1..]).scale(ds)];
                out.extend(DENSITY_BASIS.iter().map(|e| e.scale(s)));
                out
            }
        }
    }

    /// `∂_i ∂_j M` at `p`, row-major over `(i, j)`.
    pub fn second(self, p: &[f64]) -> Vec<Herm2> {
        let n = self.dim();
        let mut out = vec![Herm2::default(); n * n];
        if let MatrixChart::ConeLinear | MatrixChart::ConeWarped = self {
            let t = p[0];
            let (dds, ds) = if self == MatrixChart::ConeLinear {
                (0.0, 1.0)
            } else {
                (0.5, 0.5 * t)
            };
            out[0] = density(&p[1..]).scale(dds);
            for (k, e) in DENSITY_BASIS.iter().enumerate() {
                out[k + 1] = e.scale(ds);
                out[(k + 1) * n] = e.scale(ds);
            }
        }
        out
    }

    fn jet(self, p: &[f64]) -> MapJet {
        let n = self.dim();
        let first = self.first(p);
        let second = self.second(p);
        MapJet {
            value: self.matrix(p).to_array().to_vec(),
            jacobian: Matrix::from_fn(4, |a, i| if i < n { first[i].to_array()[a] } else { 0.0 }),
            hessian: Array3::from_fn(4, |a, i, j| {
                if i < n && j < n {
                    second[i * n + j].to_array()[a]
                } else {
                    0.0
                }
            }),
        }
    }
}

fn density(p: &[f64]) -> Herm2 {
    Herm2::new(p[0], p[1], p[2], 1.0 - p[0])
}

/// Monotone metric `g_{ij} = g^f_M(∂_i M, ∂_j M)` on one of the matrix charts.
/// Derivatives come from finite differences.
pub fn monotone_metric_field(symbol: MonotoneSymbol, chart: MatrixChart) -> MetricField {
    let n = chart.dim();
    MetricField::new(chart.chart(), move |p| {
        let rho = chart.matrix(p);
        let tangents = chart.first(p);
        let mut g = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = monotone_metric_2x2(symbol, rho, tangents[i], tangents[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    })
}

/// Metric `g_F = g^f/4` on the density matrices: the fiber of the cone
/// `(t, ρ) ↦ t²ρ/4`.
pub fn cone_fiber_metric(symbol: MonotoneSymbol) -> MetricField {
    let g = monotone_metric_field(symbol, MatrixChart::Density);
    MetricField::new(g.chart().clone(), move |p| Ok(g.at(p)?.scale(0.25)))
}

/// The mixture connection, i.e. zero Christoffel symbols in an affine chart
/// (`Entries` or `Density`), and its expression in the cone charts.
pub fn mixture_connection(chart: MatrixChart) -> Result<ConnectionField> {
    match chart {
        MatrixChart::Entries | MatrixChart::Density => {
            Ok(ConnectionField::zero(chart.chart(), "mixture"))
        }
        _ => {
            let flat = ConnectionField::zero(MatrixChart::Entries.chart(), "mixture");
            let map = ChartMap::new(chart.chart(), move |p| Ok(chart.jet(p)));
            pullback_connection(&flat, &map, "mixture")
        }
    }
}

/// A vector field at a point: components `Y^j` and their partials `∂_i Y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub value: Vec<f64>,
    /// Row-major `(i, j) ↦ ∂_i Y^j`.
    pub partials: Vec<f64>,
}

impl FieldJet {
    /// A constant-coefficient field.
    pub fn constant(value: Vec<f64>) -> Self {
        let n = value.len();
        FieldJet {
            value,
            partials: vec![0.0; n * n],
        }
    }
}

/// `X(Yρ) = Σ_{ij} X^i ∂_i Y^j ∂_j M + X^i Y^j ∂_i∂_j M`, the matrix
/// representing `∇^(m)_X Y`.
pub fn mixture_connection_action(
    chart: MatrixChart,
    p: &[f64],
    x: &[f64],
    y: &FieldJet,
) -> Result<Herm2> {
    chart.chart().check(p)?;
    let n = chart.dim();
    let first = chart.first(p);
    let second = chart.second(p);
    let mut out = Herm2::default();
    for i in 0..n {
        for j in 0..n {
            out = out
                .add(first[j].scale(x[i] * y.partials[i * n + j]))
                .add(second[i * n + j].scale(x[i] * y.value[j]));
        }
    }
    Ok(out)
}

/// The BKM cone in the two cone charts.
#[derive(Debug, Clone)]
pub struct BkmCone {
    /// Pullback under `(t, ρ) ↦ t²ρ/4`; warped with `G(∂t, ∂t) = 1`.
    pub warped_metric: MetricField,
    /// Pullback under `(t, ρ) ↦ tρ`.
    pub linear_metric: MetricField,
    /// Zero Christoffel symbols in the linear cone chart.
    pub d_bar: ConnectionField,
    /// Mixture connection expressed in the linear cone chart.
    pub nabla_bar: ConnectionField,
}

pub fn bkm_cone_geometry(symbol: MonotoneSymbol) -> Result<BkmCone> {
    let full = monotone_metric_field(symbol, MatrixChart::Entries);
    let map = |chart: MatrixChart| ChartMap::new(chart.chart(), move |p| Ok(chart.jet(p)));
    Ok(BkmCone {
        warped_metric: pullback_metric(&full, &map(MatrixChart::ConeWarped))?,
        linear_metric: pullback_metric(&full, &map(MatrixChart::ConeLinear))?,
        d_bar: ConnectionField::zero(MatrixChart::ConeLinear.chart(), "D-bar"),
        nabla_bar: mixture_connection(MatrixChart::ConeLinear)?.with_label("nabla-bar"),
    })
}

/// Components of `∂a − ∂d` in the linear cone chart, computed from the inverse
/// map `t = a + d, α = a/t, β = b/t, γ = c/t`.
pub fn entry_difference_in_cone(p: &[f64]) -> [f64; 4] {
    let m = MatrixChart::ConeLinear.matrix(p);
    let t = m.a + m.d;
    // Rows: ∂(t, α, β, γ)/∂(a, d).
    let da = [1.0, 1.0 / t - m.a / (t * t), -m.b / (t * t), -m.c / (t * t)];
    let dd = [1.0, -m.a / (t * t), -m.b / (t * t), -m.c / (t * t)];
    [da[0] - dd[0], da[1] - dd[1], da[2] - dd[2], da[3] - dd[3]]
}

#[cfg(test)]
mod tests {
    use super::*;

    const X3: Herm2 = Herm2::new(0.0, 1.0, 0.0, 0.0);

    #[test]
    fn bkm_off_diagonal_weight() {
        let rho = Herm2::new(2.0, 0.0, 0.0, 1.0);
        let g = monotone_metric_2x2(MonotoneSymbol::Bkm, rho, X3, X3).unwrap();
        assert!((g - 2.0 * libm::log(2.0)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_eigenvalues() {
        let rho = Herm2::new(0.5, 0.0, 0.0, 0.5);
        let x1 = Herm2::new(2.0, 0.0, 0.0, 0.0);
        let g = monotone_metric_2x2(MonotoneSymbol::Bkm, rho, x1, x1).unwrap();
        assert!((g - 8.0).abs() < 1e-14);
    }

    #[test]
    fn non_positive_rejected() {
        let rho = Herm2::new(1.0, 2.0, 0.0, 1.0);
        assert!(monotone_metric_2x2(MonotoneSymbol::Sld, rho, X3, X3).is_err());
    }

    #[test]
    fn symbols_fix_one() {
        for s in [MonotoneSymbol::Bkm, MonotoneSymbol::Sld] {
            assert!((s.f(1.0) - 1.0).abs() < 1e-12);
            for x in [0.1, 0.7, 3.0] {
                assert!((s.f(x) - x * s.f(1.0 / x)).abs() < 1e-12);
                assert!((s.c(x, 1.3) - s.c(1.3, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixture_of_constant_fields_vanishes() {
        let p = [0.4, 0.1, -0.05];
        let y = FieldJet::constant(vec![0.0, 1.0, 0.0]);
        let v = mixture_connection_action(MatrixChart::Density, &p, &[1.0, 0.0, 0.0], &y).unwrap();
        assert_eq!(v, Herm2::default());
    }

    #[test]
    fn mismatch_value() {
        let d = entry_difference_in_cone(&[2.0, 0.5, 0.0, 0.0]);
        assert_eq!(d, [0.0, 0.5, 0.0, 0.0]);
    }
}
