//! One-parameter scans over candidate connections on the cone and on the
//! Takano line.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::chart::SampleGrid;
use crate::error::{domain, precondition, Result};
use crate::models::takano::sigma_family;
use crate::models::{takano_geometry, TakanoSpace};
use crate::tensor::{
    curvature_at, default_tolerance, dual_connection, flatness_report, ConnectionField, MetricField,
};
use crate::warped::{cone_candidate, cone_spec, ConeSign};

/// Acceptance tolerance on `max(|R|, |R*|)` for scans with analytic partials.
pub const SCAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub branch: ConeSign,
    pub curvature: f64,
    pub dual_curvature: f64,
}

impl ScanPoint {
    pub fn residual(&self) -> f64 {
        self.curvature.max(self.dual_curvature)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub label: String,
    pub points: Vec<ScanPoint>,
    /// Every point with residual below `tolerance`, in grid order.
    pub accepted: Vec<ScanPoint>,
    /// Point of smallest residual (first one on ties).
    pub argmin: Option<ScanPoint>,
    pub tolerance: f64,
    pub samples: usize,
    /// Wall time, filled in by callers that have a clock.
    pub runtime_secs: Option<f64>,
}

impl ScanResult {
    fn from_points(label: String, points: Vec<ScanPoint>, tolerance: f64, samples: usize) -> Self {
        let accepted = points
            .iter()
            .copied()
            .filter(|p| p.residual() < tolerance)
            .collect();
        let argmin = points
            .iter()
            .copied()
            .reduce(|a, b| if b.residual() < a.residual() { b } else { a });
        ScanResult {
            label,
            points,
            accepted,
            argmin,
            tolerance,
            samples,
            runtime_secs: None,
        }
    }

    pub fn accepted_values(&self) -> Vec<(f64, ConeSign)> {
        self.accepted.iter().map(|p| (p.value, p.branch)).collect()
    }

    /// Whether `|R| < tol ⟺ |R*| < tol` at every scanned value.
    pub fn curvatures_agree(&self) -> bool {
        self.points
            .iter()
            .all(|p| (p.curvature < self.tolerance) == (p.dual_curvature < self.tolerance))
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(domain("scan grid is empty"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("scan value {v} is not finite")));
    }
    Ok(())
}

fn evaluate(
    value: f64,
    branch: ConeSign,
    g: &MetricField,
    d: &ConnectionField,
    grid: &SampleGrid,
) -> Result<ScanPoint> {
    let dual = dual_connection(g, d)?;
    let mut pt = ScanPoint {
        value,
        branch,
        curvature: 0.0,
        dual_curvature: 0.0,
    };
    for p in grid {
        pt.curvature = pt.curvature.max(curvature_at(d, p)?.max_abs());
        pt.dual_curvature = pt.dual_curvature.max(curvature_at(&dual, p)?.max_abs());
    }
    Ok(pt)
}

/// `c ≥ 0` takes the `+` branch, `c < 0` the `−` branch.
pub fn branch_of(c: f64) -> ConeSign {
    if c < 0.0 {
        ConeSign::Minus
    } else {
        ConeSign::Plus
    }
}

/// Scans `D_∂t ∂t = (c/t) ∂t` over `c_grid` on the cone over a dually flat
/// fiber, pairing each `c` with the P-branch of its sign.
pub fn scan_cone_line(
    g_f: &MetricField,
    fiber: &ConnectionField,
    c_grid: &[f64],
    tolerance: f64,
) -> Result<ScanResult> {
    check_values(c_grid)?;
    let fiber_grid = g_f.chart().default_grid();
    let rep = flatness_report(g_f, fiber, &fiber_grid, default_tolerance(g_f, fiber))?;
    if !rep.pass {
        return Err(precondition(
            "fiber dually flat",
            format!(
                "max curvature/torsion {:e} on the fiber",
                rep.max_flatness()
            ),
        ));
    }
    let grid = cone_spec(g_f)?.chart().default_grid();
    let mut points = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        let branch = branch_of(c);
        let (g, d) = cone_candidate(g_f, fiber, c, branch)?;
        points.push(evaluate(c, branch, &g, &d, &grid)?);
    }
    Ok(ScanResult::from_points(
        format!("cone over `{}`", g_f.chart().label()),
        points,
        tolerance,
        grid.len(),
    ))
}

/// Candidate on the Takano space: `D_∂σ ∂σ = (c/σ) ∂σ` with the P-branch
/// `Hor P_UU = ±1/(2nσ) ∂σ`. The dual line coefficient is then `−2 − c`.
pub fn takano_candidate(
    n: usize,
    c: f64,
    branch: ConeSign,
) -> Result<(MetricField, ConnectionField)> {
    let space = TakanoSpace::new(n, 0.0)?;
    let (g, _) = takano_geometry(&space);
    let eps = branch.value();
    let d = sigma_family(
        space.chart(),
        format!(
            "takano candidate c={c} {}",
            if eps > 0.0 { "+" } else { "-" }
        ),
        c,
        eps - 1.0,
        (1.0 + eps) / (2.0 * n as f64),
    );
    Ok((g, d))
}

/// Scans `D_∂σ ∂σ = (c/σ) ∂σ` over `c_grid`, each value with both branches.
pub fn scan_takano_line(n: usize, c_grid: &[f64], tolerance: f64) -> Result<ScanResult> {
    check_values(c_grid)?;
    let grid = TakanoSpace::new(n, 0.0)?.chart().default_grid();
    let mut points = Vec::with_capacity(2 * c_grid.len());
    for &c in c_grid {
        for branch in [ConeSign::Plus, ConeSign::Minus] {
            let (g, d) = takano_candidate(n, c, branch)?;
            points.push(evaluate(c, branch, &g, &d, &grid)?);
        }
    }
    Ok(ScanResult::from_points(
        format!("takano n={n}"),
        points,
        tolerance,
        grid.len(),
    ))
}

/// `steps` evenly spaced values on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}
