//! Two flat connections on the BKM cone that agree on neither chart.

use alloc::vec::Vec;

use crate::error::Result;
use crate::models::{bkm_cone_geometry, entry_difference_in_cone, MatrixChart, MonotoneSymbol};
use crate::tensor::{default_tolerance, flatness_report, FlatnessReport};

#[derive(Debug, Clone, PartialEq)]
pub struct MismatchReport {
    pub points: Vec<Vec<f64>>,
    /// Max over points of `|∇̄_∂α ∂t − (∂a − ∂d)|` in chart components.
    pub nabla_bar_error: f64,
    /// Max over points of `|∇̄_∂α ∂t|`, to show it is far from zero.
    pub nabla_bar_size: f64,
    /// Max over points of `|D̄_∂α ∂t|`.
    pub d_bar_component: f64,
    pub nabla_bar_flatness: FlatnessReport,
    pub d_bar_flatness: FlatnessReport,
}

/// Evaluates `∇̄_∂α ∂t` and `D̄_∂α ∂t` on the linear cone chart `(t, α, β, γ)`
/// at `(2, 0.5, 0, 0)` and at the chart's sample grid.
pub fn coordinate_mismatch_demo(samples: usize, seed: u64) -> Result<MismatchReport> {
    let cone = bkm_cone_geometry(MonotoneSymbol::Bkm)?;
    let chart = MatrixChart::ConeLinear.chart();
    let grid = chart.grid(samples, seed);
    let mut points = alloc::vec![alloc::vec![2.0, 0.5, 0.0, 0.0]];
    points.extend(grid.iter().cloned());
    let mut rep = MismatchReport {
        points: Vec::new(),
        nabla_bar_error: 0.0,
        nabla_bar_size: 0.0,
        d_bar_component: 0.0,
        nabla_bar_flatness: flatness_report(
            &cone.linear_metric,
            &cone.nabla_bar,
            &grid,
            default_tolerance(&cone.linear_metric, &cone.nabla_bar),
        )?,
        d_bar_flatness: flatness_report(
            &cone.linear_metric,
            &cone.d_bar,
            &grid,
            default_tolerance(&cone.linear_metric, &cone.d_bar),
        )?,
    };
    for p in &points {
        let nb = cone.nabla_bar.at(p)?;
        let db = cone.d_bar.at(p)?;
        let expected = entry_difference_in_cone(p);
        for k in 0..4 {
            rep.nabla_bar_error = rep.nabla_bar_error.max((nb[(k, 1, 0)] - expected[k]).abs());
            rep.nabla_bar_size = rep.nabla_bar_size.max(nb[(k, 1, 0)].abs());
            rep.d_bar_component = rep.d_bar_component.max(db[(k, 1, 0)].abs());
        }
    }
    rep.points = points;
    Ok(rep)
}
