use super::field::{ConnectionField, MetricField};
use super::ops::{curvature_at, dual_connection, duality_defect, torsion_at};
use crate::chart::SampleGrid;
use crate::error::{GeomError, Result};

/// Tolerance when every derivative is analytic.
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Tolerance when some derivative comes from finite differences.
pub const FD_TOL: f64 = 1e-5;

/// Grid maxima of the quantities that vanish on a dually flat space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessReport {
    pub curvature: f64,
    pub dual_curvature: f64,
    pub torsion: f64,
    pub dual_torsion: f64,
    /// Max of `|∂_i g_{jk} − Γ_{ij,k} − Γ*_{ik,j}|`.
    pub duality_identity: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl FlatnessReport {
    /// Largest of the four curvature/torsion maxima.
    pub fn max_flatness(&self) -> f64 {
        self.curvature
            .max(self.dual_curvature)
            .max(self.torsion)
            .max(self.dual_torsion)
    }

    /// Re-evaluates `pass` against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.max_flatness().max(self.duality_identity) <= tolerance;
        self
    }
}

/// The documented tolerance for the pair: analytic when the metric carries
/// analytic first and second partials and the connection analytic partials.
pub fn default_tolerance(g: &MetricField, nabla: &ConnectionField) -> f64 {
    if g.has_analytic_partials()
        && g.has_analytic_second_partials()
        && nabla.has_analytic_partials()
    {
        ANALYTIC_TOL
    } else {
        FD_TOL
    }
}

/// Flatness report of `(g, ∇, ∇*)` over `grid`.
pub fn flatness_report(
    g: &MetricField,
    nabla: &ConnectionField,
    grid: &SampleGrid,
    tolerance: f64,
) -> Result<FlatnessReport> {
    if grid.is_empty() {
        return Err(GeomError::Shape {
            what: "flatness report needs a nonempty grid".into(),
        });
    }
    let dual = dual_connection(g, nabla)?;
    let mut rep = FlatnessReport {
        curvature: 0.0,
        dual_curvature: 0.0,
        torsion: 0.0,
        dual_torsion: 0.0,
        duality_identity: 0.0,
        samples: grid.len(),
        tolerance,
        pass: false,
    };
    for p in grid {
        rep.curvature = rep.curvature.max(curvature_at(nabla, p)?.max_abs());
        rep.dual_curvature = rep.dual_curvature.max(curvature_at(&dual, p)?.max_abs());
        rep.torsion = rep.torsion.max(torsion_at(nabla, p)?.max_abs());
        rep.dual_torsion = rep.dual_torsion.max(torsion_at(&dual, p)?.max_abs());
        rep.duality_identity = rep
            .duality_identity
            .max(duality_defect(g, nabla, &dual, p)?.max_abs());
    }
    Ok(rep.with_tolerance(tolerance))
}
