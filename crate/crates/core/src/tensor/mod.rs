//! Tensor calculus in a single coordinate chart.
//!
//! Index conventions used throughout the crate:
//!
//! * `Γ^k_{ij}` is the `∂_k` coefficient of `∇_{∂_i} ∂_j`, stored `(k, i, j)`.
//! * Lowered symbols `Γ_{ij,k} = g_{km} Γ^m_{ij}` are stored `(i, j, k)`.
//! * `R^l_{kij}` is the `∂_l` component of `R(∂_i, ∂_j) ∂_k`, stored `(l, k, i, j)`.

mod chart_change;
mod field;
mod ops;
mod report;

pub use chart_change::{pullback_connection, pullback_metric, ChartMap, MapJet};
pub use field::{contract, ConnectionField, Eval, MetricField, PTensorField, METRIC_SYMMETRY_TOL};
pub use ops::{
    constant_curvature_residual, curvature_at, dual_connection, duality_defect, koszul_residual,
    levi_civita, lower, metric_derivative, p_tensor, torsion_at, TORSION_TOL,
};
pub use report::{default_tolerance, flatness_report, FlatnessReport, ANALYTIC_TOL, FD_TOL};
