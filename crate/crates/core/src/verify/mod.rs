//! Numerical checks of the characterization results: parameter scans, the
//! shape of `P` on warped products, the warped-line ODE and table values.

mod line;
mod mismatch;
mod properties;
mod scan;
mod structure;
mod suites;
mod tables;

use alloc::string::String;

pub use line::{
    constant_l_solve, constant_solutions, line_connection, line_connection_build,
    line_curvature_closed_form, line_curvature_numeric, ode_family_solution, ode_residual,
    takano_line_pair, LinePair, OdeResidual, TakanoLinePair, ODE_TOL,
};
pub use mismatch::{coordinate_mismatch_demo, MismatchReport};
pub use properties::{
    model_zoo, property_report, torsion_example, PropertyReport, ZooEntry, FD_CURVATURE_TOL,
    INVOLUTION_TOL,
};
pub use scan::{
    branch_of, linspace, scan_cone_line, scan_takano_line, takano_candidate, ScanPoint, ScanResult,
    SCAN_TOL,
};
pub use structure::{p_structure_check, PStructureReport};
pub use suites::{run_suites, suite_names, SuiteConfig, SuiteOutcome};
pub use tables::{
    elliptic_constants_table, elliptic_dually_flat_table, ConstantsRow, DuallyFlatRow,
};

/// One named check: a residual against a tolerance, or a plain condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `None` for boolean conditions, whose `value` is 1 when they hold.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: value <= tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            tolerance: None,
            pass: holds,
        }
    }

    /// Passes when `|value − expected| ≤ tolerance`.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check::at_most(name, (value - expected).abs(), tolerance)
    }

    /// Re-evaluates a residual check against another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        if self.tolerance.is_some() {
            self.tolerance = Some(tolerance);
            self.pass = self.value <= tolerance;
        }
        self
    }
}
