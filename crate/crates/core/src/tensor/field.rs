use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chart::{ChartBox, SampleGrid};
use crate::error::{precondition, GeomError, Result};
use crate::fd::{self, FdConfig};
use crate::linalg::{Array3, Array4, Matrix};

/// A shared, thread-safe point evaluator.
pub type Eval<T> = Arc<dyn Fn(&[f64]) -> Result<T> + Send + Sync>;

/// Symmetry tolerance for metric values.
pub const METRIC_SYMMETRY_TOL: f64 = 1e-12;

/// Riemannian metric `g_{jk}(p)` on a chart.
///
/// First partials are stored as `(i, j, k) ↦ ∂_i g_{jk}`, second partials as
/// `(i, j, k, l) ↦ ∂_i ∂_j g_{kl}`. Missing derivatives fall back to finite
/// differences.
#[derive(Clone)]
pub struct MetricField {
    chart: ChartBox,
    value: Eval<Matrix>,
    partials: Option<Eval<Array3>>,
    second: Option<Eval<Array4>>,
    fd: FdConfig,
}

impl core::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MetricField")
            .field("chart", &self.chart)
            .field("analytic_partials", &self.partials.is_some())
            .field("analytic_second_partials", &self.second.is_some())
            .finish()
    }
}

impl MetricField {
    pub fn new(
        chart: ChartBox,
        value: impl Fn(&[f64]) -> Result<Matrix> + Send + Sync + 'static,
    ) -> Self {
        MetricField {
            chart,
            value: Arc::new(value),
            partials: None,
            second: None,
            fd: FdConfig::default(),
        }
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(&[f64]) -> Result<Array3> + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_second_partials(
        mut self,
        second: impl Fn(&[f64]) -> Result<Array4> + Send + Sync + 'static,
    ) -> Self {
        self.second = Some(Arc::new(second));
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    /// Drops analytic derivatives so every derivative goes through finite differences.
    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self.second = None;
        self
    }

    pub fn chart(&self) -> &ChartBox {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn has_analytic_second_partials(&self) -> bool {
        self.second.is_some()
    }

    pub fn at(&self, p: &[f64]) -> Result<Matrix> {
        self.chart.check(p)?;
        (self.value)(p)
    }

    pub fn inverse_at(&self, p: &[f64]) -> Result<Matrix> {
        self.at(p)?.inverse_at(p)
    }

    pub fn partials_at(&self, p: &[f64]) -> Result<Array3> {
        self.chart.check(p)?;
        if let Some(d) = &self.partials {
            return d(p);
        }
        let n = self.dim();
        let f = |q: &[f64]| (self.value)(q).map(|m| m.as_slice().to_vec());
        let flat = fd::gradient(&f, &self.chart, p, self.fd)?;
        Ok(Array3::from_fn(n, |i, j, k| flat[i * n * n + j * n + k]))
    }

    pub fn second_partials_at(&self, p: &[f64]) -> Result<Array4> {
        self.chart.check(p)?;
        if let Some(d) = &self.second {
            return d(p);
        }
        let n = self.dim();
        if let Some(d1) = &self.partials {
            // Differentiate the analytic first partials once.
            let f = |q: &[f64]| d1(q).map(|a| a.as_slice().to_vec());
            let flat = fd::gradient(&f, &self.chart, p, self.fd)?;
            // flat layout: (i, j, k, l) = ∂_i (∂_j g_{kl})
            return Ok(Array4::from_fn(n, |i, j, k, l| {
                let a = flat[((i * n + j) * n + k) * n + l];
                let b = flat[((j * n + i) * n + k) * n + l];
                0.5 * (a + b)
            }));
        }
        let f = |q: &[f64]| (self.value)(q).map(|m| m.as_slice().to_vec());
        let flat = fd::hessian(&f, &self.chart, p)?;
        Ok(Array4::from_fn(n, |i, j, k, l| {
            flat[((i * n + j) * n + k) * n + l]
        }))
    }

    /// Checks symmetry and positive definiteness of the value, and symmetry of
    /// the partials, at every grid point.
    pub fn validate(&self, grid: &SampleGrid) -> Result<()> {
        for p in grid {
            let g = self.at(p)?;
            let scale = g.max_abs().max(1.0);
            if g.asymmetry() > METRIC_SYMMETRY_TOL * scale {
                return Err(precondition(
                    "metric symmetry",
                    alloc::format!("asymmetry {:e} at {p:?}", g.asymmetry()),
                ));
            }
            if !g.is_positive_definite(METRIC_SYMMETRY_TOL * scale) {
                return Err(precondition(
                    "metric positive definiteness",
                    alloc::format!("not positive definite at {p:?}"),
                ));
            }
            if self.partials.is_some() {
                let d = self.partials_at(p)?;
                let n = self.dim();
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..j {
                            let gap = (d[(i, j, k)] - d[(i, k, j)]).abs();
                            if gap > METRIC_SYMMETRY_TOL * d.max_abs().max(1.0) {
                                return Err(precondition(
                                    "metric partial symmetry",
                                    alloc::format!("∂_{i} g_{j}{k} ≠ ∂_{i} g_{k}{j} at {p:?}"),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Affine connection given by Christoffel symbols `(k, i, j) ↦ Γ^k_{ij}`,
/// the `∂_k` coefficient of `∇_{∂_i} ∂_j`.
///
/// Partials are stored as `(l, k, i, j) ↦ ∂_l Γ^k_{ij}`.
#[derive(Clone)]
pub struct ConnectionField {
    chart: ChartBox,
    label: String,
    gamma: Eval<Array3>,
    partials: Option<Eval<Array4>>,
    fd: FdConfig,
}

impl core::fmt::Debug for ConnectionField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ConnectionField")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl ConnectionField {
    pub fn new(
        chart: ChartBox,
        label: impl Into<String>,
        gamma: impl Fn(&[f64]) -> Result<Array3> + Send + Sync + 'static,
    ) -> Self {
        ConnectionField {
            chart,
            label: label.into(),
            gamma: Arc::new(gamma),
            partials: None,
            fd: FdConfig::default(),
        }
    }

    /// The connection whose Christoffel symbols vanish on this chart.
    pub fn zero(chart: ChartBox, label: impl Into<String>) -> Self {
        let n = chart.dim();
        ConnectionField::new(chart, label, move |_| Ok(Array3::zeros(n)))
            .with_partials(move |_| Ok(Array4::zeros(n)))
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(&[f64]) -> Result<Array4> + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn chart(&self) -> &ChartBox {
        &self.chart
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn at(&self, p: &[f64]) -> Result<Array3> {
        self.chart.check(p)?;
        let g = (self.gamma)(p)?;
        if let Some(bad) = g.as_slice().iter().find(|x| !x.is_finite()) {
            return Err(crate::error::domain(alloc::format!(
                "connection `{}` is not finite ({bad}) at {p:?}",
                self.label
            )));
        }
        Ok(g)
    }

    pub fn partials_at(&self, p: &[f64]) -> Result<Array4> {
        self.chart.check(p)?;
        if let Some(d) = &self.partials {
            return d(p);
        }
        let n = self.dim();
        let f = |q: &[f64]| (self.gamma)(q).map(|a| a.as_slice().to_vec());
        let flat = fd::gradient(&f, &self.chart, p, self.fd)?;
        Ok(Array4::from_fn(n, |l, k, i, j| {
            flat[((l * n + k) * n + i) * n + j]
        }))
    }

    /// `a·self + b·other`. This is a connection only when `a + b = 1`.
    pub fn combine(&self, a: f64, other: &ConnectionField, b: f64) -> Result<ConnectionField> {
        if self.dim() != other.dim() {
            return Err(GeomError::Shape {
                what: alloc::format!(
                    "cannot combine connections on {}- and {}-dimensional charts",
                    self.dim(),
                    other.dim()
                ),
            });
        }
        let (s, o) = (self.clone(), other.clone());
        let (s2, o2) = (self.clone(), other.clone());
        Ok(ConnectionField::new(
            self.chart.clone(),
            alloc::format!("{a}·{} + {b}·{}", self.label, other.label),
            move |p| Ok(s.at(p)?.zip_with(&o.at(p)?, |x, y| a * x + b * y)),
        )
        .with_partials(move |p| {
            let (d1, d2) = (s2.partials_at(p)?, o2.partials_at(p)?);
            let n = d1.dim();
            Ok(Array4::from_fn(n, |l, k, i, j| {
                a * d1[(l, k, i, j)] + b * d2[(l, k, i, j)]
            }))
        }))
    }
}

/// The tensor `P = (∇ − ∇*)/2`, stored as `(k, i, j) ↦ P^k_{ij}`.
#[derive(Clone)]
pub struct PTensorField {
    chart: ChartBox,
    value: Eval<Array3>,
}

impl core::fmt::Debug for PTensorField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PTensorField")
            .field("chart", &self.chart)
            .finish()
    }
}

impl PTensorField {
    pub(crate) fn new(
        chart: ChartBox,
        value: impl Fn(&[f64]) -> Result<Array3> + Send + Sync + 'static,
    ) -> Self {
        PTensorField {
            chart,
            value: Arc::new(value),
        }
    }

    pub fn chart(&self) -> &ChartBox {
        &self.chart
    }

    pub fn at(&self, p: &[f64]) -> Result<Array3> {
        self.chart.check(p)?;
        (self.value)(p)
    }

    /// `P_X Y` at `p` for coordinate-component vectors.
    pub fn apply(&self, p: &[f64], x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Ok(contract(&self.at(p)?, x, y))
    }
}

/// `Σ x^i y^j A^k_{ij}` for an array stored as `(k, i, j)`.
pub fn contract(a: &Array3, x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = a.dim();
    (0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += x[i] * y[j] * a[(k, i, j)];
                }
            }
            s
        })
        .collect()
}
