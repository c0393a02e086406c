//! Gaussians `N(m, σ² I_n)` with Fisher metric `(2n dσ² + Σ dm_i²)/σ²`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::ChartBox;
use crate::error::{domain, Result};
use crate::linalg::{Array3, Array4, Matrix};
use crate::tensor::{ConnectionField, MetricField};
use crate::warped::{euclidean_metric, Warp, WarpedSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TakanoSpace {
    pub n: usize,
    pub alpha: f64,
}

impl TakanoSpace {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("Takano space needs n ≥ 1"));
        }
        if !alpha.is_finite() {
            return Err(domain("alpha must be finite"));
        }
        Ok(TakanoSpace { n, alpha })
    }

    /// Chart `(σ, m_1, …, m_n)`; `σ` sampled in `[0.5, 2]`, means in `[−1, 1]`.
    pub fn chart(&self) -> ChartBox {
        let mut names: Vec<String> = vec!["sigma".into()];
        names.extend((1..=self.n).map(|i| format!("m{i}")));
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut bounds = vec![(0.0, f64::INFINITY)];
        bounds.extend(vec![(f64::NEG_INFINITY, f64::INFINITY); self.n]);
        let mut window = vec![(0.5, 2.0)];
        window.extend(vec![(-1.0, 1.0); self.n]);
        ChartBox::new("takano", bounds)
            .and_then(|c| c.with_names(&refs))
            .and_then(|c| c.with_window(window))
            .expect("takano chart is well formed")
    }

    /// Sectional curvature `−(1−α²)/(2n)` of the α-connection.
    pub fn curvature_constant(&self) -> f64 {
        -(1.0 - self.alpha * self.alpha) / (2.0 * self.n as f64)
    }

    /// Coefficient `c` in `∇_∂σ ∂σ = (c/σ) ∂σ`, namely `−(1+2α)`.
    pub fn line_coefficient(&self) -> f64 {
        -(1.0 + 2.0 * self.alpha)
    }
}

fn sigma(p: &[f64]) -> Result<f64> {
    if !(p[0] > 0.0) {
        return Err(domain(format!("sigma = {} must be positive", p[0])));
    }
    Ok(p[0])
}

/// Christoffel symbols of the family `Γ^σ_σσ = a/σ`, `Γ^i_{σj} = Γ^i_{jσ} = b/σ δ`,
/// `Γ^σ_{ij} = c/σ δ_ij` together with their partials. The Takano α-connection
/// and the scan candidates all have this shape.
pub(crate) fn sigma_family(
    chart: ChartBox,
    label: String,
    a: f64,
    b: f64,
    c: f64,
) -> ConnectionField {
    let dim = chart.dim();
    let shape = move |k: usize, i: usize, j: usize| -> f64 {
        match (k, i, j) {
            (0, 0, 0) => a,
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, _, _) => {
                if i == j {
                    c
                } else {
                    0.0
                }
            }
            (_, 0, 0) => 0.0,
            (_, 0, _) => {
                if k == j {
                    b
                } else {
                    0.0
                }
            }
            (_, _, 0) => {
                if k == i {
                    b
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    };
    ConnectionField::new(chart, label, move |p| {
        let s = sigma(p)?;
        Ok(Array3::from_fn(dim, |k, i, j| shape(k, i, j) / s))
    })
    .with_partials(move |p| {
        let s = sigma(p)?;
        Ok(Array4::from_fn(dim, |l, k, i, j| {
            if l == 0 {
                -shape(k, i, j) / (s * s)
            } else {
                0.0
            }
        }))
    })
}

/// Closed-form metric and α-connection with analytic partials.
pub fn takano_geometry(space: &TakanoSpace) -> (MetricField, ConnectionField) {
    let n = space.n as f64;
    let dim = space.n + 1;
    let alpha = space.alpha;
    let chart = space.chart();
    let diag = move |a: usize| if a == 0 { 2.0 * n } else { 1.0 };
    let metric = MetricField::new(chart.clone(), move |p| {
        let s = sigma(p)?;
        Ok(Matrix::from_fn(dim, |a, b| {
            if a == b {
                diag(a) / (s * s)
            } else {
                0.0
            }
        }))
    })
    .with_partials(move |p| {
        let s = sigma(p)?;
        Ok(Array3::from_fn(dim, |c, a, b| {
            if c == 0 && a == b {
                -2.0 * diag(a) / (s * s * s)
            } else {
                0.0
            }
        }))
    })
    .with_second_partials(move |p| {
        let s = sigma(p)?;
        Ok(Array4::from_fn(dim, |c, e, a, b| {
            if c == 0 && e == 0 && a == b {
                6.0 * diag(a) / (s * s * s * s)
            } else {
                0.0
            }
        }))
    });
    let connection = sigma_family(
        chart,
        format!("takano n={} α={alpha}", space.n),
        -(1.0 + 2.0 * alpha),
        -(1.0 + alpha),
        (1.0 - alpha) / (2.0 * n),
    );
    (metric, connection)
}

/// The metric as a doubly warped product `f² dσ² + b² Σ dm_i²` with
/// `f = √(2n)/σ` and `b = 1/σ`. The product chart matches [`TakanoSpace::chart`].
pub fn takano_warped_spec(n: usize) -> Result<WarpedSpec> {
    let full = TakanoSpace::new(n, 0.0)?.chart();
    let base = ChartBox::new("sigma", vec![full.bounds()[0]])?
        .with_names(&["sigma"])?
        .with_window(vec![full.window()[0]])?;
    let names: Vec<&str> = full.names()[1..].iter().map(|s| s.as_str()).collect();
    let fiber = ChartBox::new("means", full.bounds()[1..].to_vec())?
        .with_names(&names)?
        .with_window(full.window()[1..].to_vec())?;
    WarpedSpec::doubly(
        euclidean_metric(base),
        euclidean_metric(fiber),
        Warp::power_line(libm::sqrt(2.0 * n as f64), -1.0),
        Warp::power_line(1.0, -1.0),
    )
}
