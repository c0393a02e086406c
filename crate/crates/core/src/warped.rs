//! Warped products `g_B + f² g_F` and `f² g_B + b² g_F`, the affine O'Neill
//! formulas, the Gauss equation and the cone extension of a fiber connection.
//!
//! Product charts list the base coordinates first, then the fiber coordinates.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{ChartBox, SampleGrid};
use crate::error::{domain, precondition, GeomError, Result};
use crate::linalg::{Array3, Array4, Matrix};
use crate::tensor::{
    curvature_at, default_tolerance, dual_connection, flatness_report, p_tensor, ConnectionField,
    MetricField,
};

/// Assumption tolerance when the connection carries analytic partials.
pub const ASSUMPTION_TOL_ANALYTIC: f64 = 1e-9;
/// Assumption tolerance on the finite-difference path.
pub const ASSUMPTION_TOL_FD: f64 = 1e-5;

type BaseFn<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// A positive function on the base with its gradient and Hessian in base coordinates.
#[derive(Clone)]
pub struct Warp {
    value: BaseFn<f64>,
    gradient: BaseFn<Vec<f64>>,
    hessian: BaseFn<Matrix>,
}

impl core::fmt::Debug for Warp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Warp")
    }
}

impl Warp {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        hessian: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Warp {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: Arc::new(hessian),
        }
    }

    pub fn constant(c: f64, base_dim: usize) -> Self {
        Warp::new(
            move |_| c,
            move |_| vec![0.0; base_dim],
            move |_| Matrix::zeros(base_dim),
        )
    }

    /// `f(t) = t` on a one-dimensional base.
    pub fn identity_line() -> Self {
        Warp::new(|p| p[0], |_| vec![1.0], |_| Matrix::zeros(1))
    }

    /// `f(x) = c · x₀^k` on a one-dimensional base.
    pub fn power_line(c: f64, k: f64) -> Self {
        Warp::new(
            move |p| c * libm::pow(p[0], k),
            move |p| vec![c * k * libm::pow(p[0], k - 1.0)],
            move |p| Matrix::from_diag(&[c * k * (k - 1.0) * libm::pow(p[0], k - 2.0)]),
        )
    }

    /// `f(x) = c · exp(r x₀)` on a one-dimensional base.
    pub fn exp_line(c: f64, r: f64) -> Self {
        Warp::new(
            move |p| c * libm::exp(r * p[0]),
            move |p| vec![c * r * libm::exp(r * p[0])],
            move |p| Matrix::from_diag(&[c * r * r * libm::exp(r * p[0])]),
        )
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let v = (self.value)(x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!(
                "warping function is {v} at base point {x:?}"
            )));
        }
        Ok(v)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    pub fn hessian(&self, x: &[f64]) -> Matrix {
        (self.hessian)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarpMode {
    /// `g_B + f² g_F`.
    Singly,
    /// `f² g_B + b² g_F`.
    Doubly,
}

#[derive(Debug, Clone)]
pub struct WarpedSpec {
    pub base: MetricField,
    pub fiber: MetricField,
    pub f: Warp,
    pub b: Option<Warp>,
}

impl WarpedSpec {
    pub fn singly(base: MetricField, fiber: MetricField, f: Warp) -> Result<Self> {
        let s = WarpedSpec {
            base,
            fiber,
            f,
            b: None,
        };
        s.check_warps()?;
        Ok(s)
    }

    pub fn doubly(base: MetricField, fiber: MetricField, f: Warp, b: Warp) -> Result<Self> {
        let s = WarpedSpec {
            base,
            fiber,
            f,
            b: Some(b),
        };
        s.check_warps()?;
        Ok(s)
    }

    fn check_warps(&self) -> Result<()> {
        for p in &self.base.chart().default_grid() {
            self.f.value(p)?;
            if let Some(b) = &self.b {
                b.value(p)?;
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> WarpMode {
        if self.b.is_some() {
            WarpMode::Doubly
        } else {
            WarpMode::Singly
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn dim(&self) -> usize {
        self.base_dim() + self.fiber_dim()
    }

    pub fn chart(&self) -> ChartBox {
        self.base.chart().product(
            self.fiber.chart(),
            format!(
                "{} x {}",
                self.base.chart().label(),
                self.fiber.chart().label()
            ),
        )
    }

    /// The function scaling the fiber: `f` when singly warped, `b` when doubly.
    pub fn fiber_warp(&self) -> &Warp {
        self.b.as_ref().unwrap_or(&self.f)
    }

    /// Base block of `G` at a base point.
    pub fn base_block(&self, x: &[f64]) -> Result<Matrix> {
        let g = self.base.at(x)?;
        Ok(match self.mode() {
            WarpMode::Singly => g,
            WarpMode::Doubly => {
                let f = self.f.value(x)?;
                g.scale(f * f)
            }
        })
    }

    /// `grad w` of the fiber warp with respect to the base block of `G`,
    /// in base coordinates.
    pub fn fiber_warp_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let inv = self.base_block(x)?.inverse_at(x)?;
        Ok(inv.mul_vec(&self.fiber_warp().gradient(x)))
    }
}

fn component_or_shape(spec: &WarpedSpec, d: &ConnectionField) -> Result<()> {
    if d.dim() != spec.dim() {
        return Err(GeomError::Shape {
            what: format!(
                "connection `{}` has dimension {} but the product chart has {}",
                d.label(),
                d.dim(),
                spec.dim()
            ),
        });
    }
    Ok(())
}

/// Block metric on the product chart with partials assembled from the
/// component fields and the warp derivatives.
pub fn warped_metric(spec: &WarpedSpec) -> Result<MetricField> {
    spec.check_warps()?;
    let nb = spec.base_dim();
    let n = spec.dim();
    let (s0, s1, s2) = (spec.clone(), spec.clone(), spec.clone());
    let doubly = spec.mode() == WarpMode::Doubly;
    Ok(MetricField::new(spec.chart(), move |p| {
        let (x, y) = p.split_at(nb);
        let gb = s0.base_block(x)?;
        let w = s0.fiber_warp().value(x)?;
        let gf = s0.fiber.at(y)?;
        Ok(Matrix::from_fn(n, |a, b| match (a < nb, b < nb) {
            (true, true) => gb[(a, b)],
            (false, false) => w * w * gf[(a - nb, b - nb)],
            _ => 0.0,
        }))
    })
    .with_partials(move |p| {
        let (x, y) = p.split_at(nb);
        let gb = s1.base.at(x)?;
        let dgb = s1.base.partials_at(x)?;
        let f = s1.f.value(x)?;
        let df = s1.f.gradient(x);
        let w = s1.fiber_warp().value(x)?;
        let dw = s1.fiber_warp().gradient(x);
        let gf = s1.fiber.at(y)?;
        let dgf = s1.fiber.partials_at(y)?;
        Ok(Array3::from_fn(n, |c, a, b| {
            match (a < nb, b < nb, c < nb) {
                (true, true, true) => {
                    if doubly {
                        2.0 * f * df[c] * gb[(a, b)] + f * f * dgb[(c, a, b)]
                    } else {
                        dgb[(c, a, b)]
                    }
                }
                (false, false, true) => 2.0 * w * dw[c] * gf[(a - nb, b - nb)],
                (false, false, false) => w * w * dgf[(c - nb, a - nb, b - nb)],
                _ => 0.0,
            }
        }))
    })
    .with_second_partials(move |p| {
        let (x, y) = p.split_at(nb);
        let gb = s2.base.at(x)?;
        let dgb = s2.base.partials_at(x)?;
        let ddgb = s2.base.second_partials_at(x)?;
        let f = s2.f.value(x)?;
        let df = s2.f.gradient(x);
        let hf = s2.f.hessian(x);
        let w = s2.fiber_warp().value(x)?;
        let dw = s2.fiber_warp().gradient(x);
        let hw = s2.fiber_warp().hessian(x);
        let gf = s2.fiber.at(y)?;
        let dgf = s2.fiber.partials_at(y)?;
        let ddgf = s2.fiber.second_partials_at(y)?;
        Ok(Array4::from_fn(n, |c, e, a, b| match (a < nb, b < nb) {
            (true, true) => {
                if c >= nb || e >= nb {
                    0.0
                } else if doubly {
                    2.0 * (df[c] * df[e] + f * hf[(c, e)]) * gb[(a, b)]
                        + 2.0 * f * df[c] * dgb[(e, a, b)]
                        + 2.0 * f * df[e] * dgb[(c, a, b)]
                        + f * f * ddgb[(c, e, a, b)]
                } else {
                    ddgb[(c, e, a, b)]
                }
            }
            (false, false) => {
                let (fa, fb) = (a - nb, b - nb);
                match (c < nb, e < nb) {
                    (true, true) => 2.0 * (dw[c] * dw[e] + w * hw[(c, e)]) * gf[(fa, fb)],
                    (true, false) => 2.0 * w * dw[c] * dgf[(e - nb, fa, fb)],
                    (false, true) => 2.0 * w * dw[e] * dgf[(c - nb, fa, fb)],
                    (false, false) => w * w * ddgf[(c - nb, e - nb, fa, fb)],
                }
            }
            _ => 0.0,
        }))
    }))
}

/// Outcome of the horizontality / fiber-lift check.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// Max `|Γ^α_{ab}|`: vertical part of `D_X Y` for horizontal `X, Y`.
    pub vertical_leak: f64,
    /// Max `|∂_a Γ^γ_{αβ}|`: dependence of `Ver D_V W` on the base point.
    pub base_dependence: f64,
    /// The worst offending component, e.g. `Γ^m1_{sigma sigma}`.
    pub worst_component: String,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that `D_X Y` is horizontal for horizontal `X, Y` and that the
/// fiber block of `D` does not depend on the base point.
pub fn assumption_check(
    spec: &WarpedSpec,
    d: &ConnectionField,
    grid: &SampleGrid,
) -> Result<AssumptionReport> {
    component_or_shape(spec, d)?;
    let nb = spec.base_dim();
    let n = spec.dim();
    let chart = spec.chart();
    let tolerance = if d.has_analytic_partials() {
        ASSUMPTION_TOL_ANALYTIC
    } else {
        ASSUMPTION_TOL_FD
    };
    let mut rep = AssumptionReport {
        vertical_leak: 0.0,
        base_dependence: 0.0,
        worst_component: String::new(),
        tolerance,
        pass: true,
    };
    let mut worst = 0.0;
    for p in grid {
        let gamma = d.at(p)?;
        let dgamma = d.partials_at(p)?;
        for k in nb..n {
            for i in 0..nb {
                for j in 0..nb {
                    let v = gamma[(k, i, j)].abs();
                    rep.vertical_leak = rep.vertical_leak.max(v);
                    if v > worst {
                        worst = v;
                        rep.worst_component = format!(
                            "Γ^{}_{{{} {}}}",
                            chart.name(k),
                            chart.name(i),
                            chart.name(j)
                        );
                    }
                }
            }
            for i in nb..n {
                for j in nb..n {
                    for l in 0..nb {
                        let v = dgamma[(l, k, i, j)].abs();
                        rep.base_dependence = rep.base_dependence.max(v);
                        if v > worst {
                            worst = v;
                            rep.worst_component = format!(
                                "∂_{} Γ^{}_{{{} {}}}",
                                chart.name(l),
                                chart.name(k),
                                chart.name(i),
                                chart.name(j)
                            );
                        }
                    }
                }
            }
        }
    }
    rep.pass = rep.vertical_leak <= tolerance && rep.base_dependence <= tolerance;
    Ok(rep)
}

fn require_assumption(spec: &WarpedSpec, d: &ConnectionField, grid: &SampleGrid) -> Result<()> {
    let rep = assumption_check(spec, d, grid)?;
    if !rep.pass {
        return Err(precondition(
            "warped horizontality",
            format!(
                "{} = {:e} exceeds {:e}",
                rep.worst_component,
                rep.vertical_leak.max(rep.base_dependence),
                rep.tolerance
            ),
        ));
    }
    Ok(())
}

fn g_norm(g: &Matrix, v: &[f64]) -> f64 {
    libm::sqrt(g.bilinear(v, v).max(0.0))
}

/// Max over the grid of `‖D_X V − (Xw/w) V − P_X V‖_G` for horizontal
/// coordinate vectors `X` and vertical `V`.
pub fn oneill_mixed_residual(
    spec: &WarpedSpec,
    d: &ConnectionField,
    grid: &SampleGrid,
) -> Result<f64> {
    component_or_shape(spec, d)?;
    require_assumption(spec, d, grid)?;
    let g = warped_metric(spec)?;
    let p_field = p_tensor(&g, d)?;
    let nb = spec.base_dim();
    let n = spec.dim();
    let mut worst: f64 = 0.0;
    for p in grid {
        let x = &p[..nb];
        let gm = g.at(p)?;
        let gamma = d.at(p)?;
        let pt = p_field.at(p)?;
        let w = spec.fiber_warp().value(x)?;
        let dw = spec.fiber_warp().gradient(x);
        for a in 0..nb {
            for v in nb..n {
                let mut r = vec![0.0; n];
                for k in 0..n {
                    r[k] = gamma[(k, a, v)] - pt[(k, a, v)];
                }
                r[v] -= dw[a] / w;
                worst = worst.max(g_norm(&gm, &r));
            }
        }
    }
    Ok(worst)
}

/// Max over the grid of `‖Hor D_V W + (G(V,W)/w) grad w − Hor P_V W‖_G` for
/// vertical coordinate vectors `V, W`.
pub fn second_fundamental_residual(
    spec: &WarpedSpec,
    d: &ConnectionField,
    grid: &SampleGrid,
) -> Result<f64> {
    component_or_shape(spec, d)?;
    require_assumption(spec, d, grid)?;
    let g = warped_metric(spec)?;
    let p_field = p_tensor(&g, d)?;
    let nb = spec.base_dim();
    let n = spec.dim();
    let mut worst: f64 = 0.0;
    for p in grid {
        let x = &p[..nb];
        let gm = g.at(p)?;
        let gamma = d.at(p)?;
        let pt = p_field.at(p)?;
        let w = spec.fiber_warp().value(x)?;
        let grad = spec.fiber_warp_gradient(x)?;
        for v in nb..n {
            for ww in nb..n {
                let gvw = gm[(v, ww)];
                let mut r = vec![0.0; n];
                for k in 0..nb {
                    r[k] = gamma[(k, v, ww)] + gvw / w * grad[k] - pt[(k, v, ww)];
                }
                worst = worst.max(g_norm(&gm, &r));
            }
        }
    }
    Ok(worst)
}

/// Max over the grid and vertical coordinate 4-tuples of the defect in
/// `G(R(U,V)W,Q) = G(ᶠR(U,V)W,Q) − G(II(V,W), II*(U,Q)) + G(II(U,W), II*(V,Q))`,
/// with `II = Hor D` on vertical pairs and `ᶠR` the curvature of `fiber_connection`.
pub fn gauss_equation_residual(
    spec: &WarpedSpec,
    d: &ConnectionField,
    fiber_connection: &ConnectionField,
    grid: &SampleGrid,
) -> Result<f64> {
    component_or_shape(spec, d)?;
    if fiber_connection.dim() != spec.fiber_dim() {
        return Err(GeomError::Shape {
            what: "fiber connection does not match the fiber chart".into(),
        });
    }
    require_assumption(spec, d, grid)?;
    let g = warped_metric(spec)?;
    let dual = dual_connection(&g, d)?;
    let nb = spec.base_dim();
    let n = spec.dim();
    let nf = spec.fiber_dim();
    let mut worst: f64 = 0.0;
    for p in grid {
        let y = &p[nb..];
        let gm = g.at(p)?;
        let r = curvature_at(d, p)?;
        let fr = curvature_at(fiber_connection, y)?;
        let gamma = d.at(p)?;
        let dual_gamma = dual.at(p)?;
        let hor_pair = |v1: usize, w1: usize, v2: usize, w2: usize| -> f64 {
            let mut s = 0.0;
            for a in 0..nb {
                for b in 0..nb {
                    s += gamma[(a, v1, w1)] * gm[(a, b)] * dual_gamma[(b, v2, w2)];
                }
            }
            s
        };
        for u in 0..nf {
            for v in 0..nf {
                for w in 0..nf {
                    for q in 0..nf {
                        let (uu, vv, ww, qq) = (u + nb, v + nb, w + nb, q + nb);
                        let lhs: f64 = (0..n).map(|l| r[(l, ww, uu, vv)] * gm[(l, qq)]).sum();
                        let fiber: f64 = (0..nf).map(|l| fr[(l, w, u, v)] * gm[(l + nb, qq)]).sum();
                        let rhs = fiber - hor_pair(vv, ww, uu, qq) + hor_pair(uu, ww, vv, qq);
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Branch selector for [`cone_extend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSign {
    Plus,
    Minus,
}

impl ConeSign {
    pub fn value(self) -> f64 {
        match self {
            ConeSign::Plus => 1.0,
            ConeSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConeExtensionSpec {
    pub fiber_connection: ConnectionField,
    pub sign: ConeSign,
}

/// Identity metric with zero partials on `chart`.
pub fn euclidean_metric(chart: ChartBox) -> MetricField {
    let n = chart.dim();
    MetricField::new(chart, move |_| Ok(Matrix::identity(n)))
        .with_partials(move |_| Ok(Array3::zeros(n)))
        .with_second_partials(move |_| Ok(Array4::zeros(n)))
}

/// The half-line `t > 0` with metric `dt²`, sampled on `[0.5, 2]`.
pub fn cone_base() -> MetricField {
    let chart = ChartBox::new("t", vec![(0.0, f64::INFINITY)])
        .and_then(|c| c.with_names(&["t"]))
        .and_then(|c| c.with_window(vec![(0.5, 2.0)]))
        .expect("cone base chart is well formed");
    MetricField::new(chart, |_| Ok(Matrix::identity(1)))
        .with_partials(|_| Ok(Array3::zeros(1)))
        .with_second_partials(|_| Ok(Array4::zeros(1)))
}

/// The cone `dt² + t² g_F` as a warped spec.
pub fn cone_spec(fiber: &MetricField) -> Result<WarpedSpec> {
    WarpedSpec::singly(cone_base(), fiber.clone(), Warp::identity_line())
}

/// Extends a dually flat fiber connection `∇̃` to the cone `dt² + t² g_F`.
///
/// `Plus`: `D_∂t ∂t = ∂t/t`, `D_∂t V = D_V ∂t = 2V/t`, `Hor D_V W = 0`,
/// `Ver D_V W = ∇̃_V W`.
/// `Minus`: the dual of `Plus`, i.e. `D_∂t ∂t = −∂t/t`, `D_∂t V = 0`,
/// `Hor D_V W = −2t g_F(V,W) ∂t`, `Ver D_V W = ∇̃*_V W`.
pub fn cone_extend(
    spec: &ConeExtensionSpec,
    g_f: &MetricField,
) -> Result<(MetricField, ConnectionField)> {
    let nabla = &spec.fiber_connection;
    if nabla.dim() != g_f.dim() {
        return Err(GeomError::Shape {
            what: "fiber connection and fiber metric differ in dimension".into(),
        });
    }
    let grid = g_f.chart().default_grid();
    let tol = default_tolerance(g_f, nabla);
    let rep = flatness_report(g_f, nabla, &grid, tol)?;
    if !rep.pass {
        return Err(precondition(
            "fiber dually flat",
            format!(
                "fiber connection `{}` has max curvature/torsion {:e} (tolerance {tol:e})",
                nabla.label(),
                rep.max_flatness()
            ),
        ));
    }
    let fiber = match spec.sign {
        ConeSign::Plus => nabla.clone(),
        ConeSign::Minus => dual_connection(g_f, nabla)?,
    };
    let label = format!(
        "cone({}, {})",
        nabla.label(),
        if spec.sign == ConeSign::Plus {
            "+"
        } else {
            "-"
        }
    );
    let (metric, connection) = cone_candidate(g_f, &fiber, spec.sign.value(), spec.sign)?;
    Ok((metric, connection.with_label(label)))
}

/// Connection on the cone `dt² + t² g_F` with `D_∂t ∂t = (c/t) ∂t`,
/// `D_∂t V = D_V ∂t = ((1+ε)/t) V`, `Hor D_V W = (ε−1) t g_F(V,W) ∂t` and
/// `Ver D_V W = fiber_V W`, where `ε = ±1` is the branch. No flatness check.
pub fn cone_candidate(
    g_f: &MetricField,
    fiber: &ConnectionField,
    c: f64,
    branch: ConeSign,
) -> Result<(MetricField, ConnectionField)> {
    if fiber.dim() != g_f.dim() {
        return Err(GeomError::Shape {
            what: "fiber connection and fiber metric differ in dimension".into(),
        });
    }
    if !c.is_finite() {
        return Err(domain(format!("line coefficient {c} must be finite")));
    }
    let cone = cone_spec(g_f)?;
    let metric = warped_metric(&cone)?;
    let n = g_f.dim() + 1;
    let eps = branch.value();
    let mixed = 1.0 + eps;
    let hor = eps - 1.0;
    let (fc0, fc1) = (fiber.clone(), fiber.clone());
    let (gf0, gf1) = (g_f.clone(), g_f.clone());
    let t_of = |p: &[f64]| -> Result<f64> {
        if p[0] > 0.0 {
            Ok(p[0])
        } else {
            Err(domain(format!("t = {} must be positive", p[0])))
        }
    };
    let mixed_hit = |k: usize, i: usize, j: usize| if i == 0 { k == j } else { k == i };
    let label = format!(
        "cone candidate c={c} {}",
        if branch == ConeSign::Plus { "+" } else { "-" }
    );
    let connection = ConnectionField::new(cone.chart(), label, move |p| {
        let t = t_of(p)?;
        let y = &p[1..];
        let fg = fc0.at(y)?;
        let gf = gf0.at(y)?;
        Ok(Array3::from_fn(n, |k, i, j| match (k, i, j) {
            (0, 0, 0) => c / t,
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, _, _) => hor * t * gf[(i - 1, j - 1)],
            (_, 0, 0) => 0.0,
            (_, 0, _) | (_, _, 0) => {
                if mixed_hit(k, i, j) {
                    mixed / t
                } else {
                    0.0
                }
            }
            _ => fg[(k - 1, i - 1, j - 1)],
        }))
    })
    .with_partials(move |p| {
        let t = t_of(p)?;
        let y = &p[1..];
        let dfg = fc1.partials_at(y)?;
        let gf = gf1.at(y)?;
        let dgf = gf1.partials_at(y)?;
        Ok(Array4::from_fn(n, |l, k, i, j| match (k, i, j) {
            (0, 0, 0) => {
                if l == 0 {
                    -c / (t * t)
                } else {
                    0.0
                }
            }
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, _, _) => {
                if l == 0 {
                    hor * gf[(i - 1, j - 1)]
                } else {
                    hor * t * dgf[(l - 1, i - 1, j - 1)]
                }
            }
            (_, 0, 0) => 0.0,
            (_, 0, _) | (_, _, 0) => {
                if l == 0 && mixed_hit(k, i, j) {
                    -mixed / (t * t)
                } else {
                    0.0
                }
            }
            _ => {
                if l == 0 {
                    0.0
                } else {
                    dfg[(l - 1, k - 1, i - 1, j - 1)]
                }
            }
        }))
    });
    Ok((metric, connection))
}
