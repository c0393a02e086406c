use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Failures raised while building or evaluating geometric objects.
#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    /// A point (or parameter) lies outside the domain of a chart or model.
    Domain { what: String },
    /// The metric could not be inverted at the given point.
    SingularMetric { point: Vec<f64> },
    /// A finite-difference stencil would leave the chart.
    StepOutsideChart { point: Vec<f64>, coord: usize },
    /// An operation that needs torsion-free input received a connection with torsion.
    Torsion { max: f64 },
    /// Dimension or chart mismatch between two objects.
    Shape { what: String },
    /// A structural precondition (horizontality, flat fiber, ODE solution, ...) failed.
    Precondition { check: String, detail: String },
    /// Adaptive quadrature ran out of subdivisions before reaching its tolerance.
    Quadrature { estimate: f64, tolerance: f64 },
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::Domain { what } => write!(f, "domain violation: {what}"),
            GeomError::SingularMetric { point } => {
                write!(f, "metric is singular at point {point:?}")
            }
            GeomError::StepOutsideChart { point, coord } => write!(
                f,
                "finite-difference step in coordinate {coord} leaves the chart at {point:?}"
            ),
            GeomError::Torsion { max } => {
                write!(f, "connection has torsion (max |T| = {max:e})")
            }
            GeomError::Shape { what } => write!(f, "shape mismatch: {what}"),
            GeomError::Precondition { check, detail } => {
                write!(f, "precondition `{check}` failed: {detail}")
            }
            GeomError::Quadrature {
                estimate,
                tolerance,
            } => write!(
                f,
                "quadrature did not converge (error estimate {estimate:e} > tolerance {tolerance:e})"
            ),
        }
    }
}

impl core::error::Error for GeomError {}

pub type Result<T> = core::result::Result<T, GeomError>;

pub(crate) fn domain(what: impl Into<String>) -> GeomError {
    GeomError::Domain { what: what.into() }
}

pub(crate) fn precondition(check: impl Into<String>, detail: impl Into<String>) -> GeomError {
    GeomError::Precondition {
        check: check.into(),
        detail: detail.into(),
    }
}
