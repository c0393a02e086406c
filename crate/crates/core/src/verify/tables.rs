//! Elliptic constants and the comparison of flat line coefficients.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::models::{
    elliptic_constants, EllipticConstants, EllipticFamily, Generator, QuadratureConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRow {
    pub model: String,
    pub quadrature: EllipticConstants,
    pub closed_form: EllipticConstants,
    pub discrepancy: f64,
}

pub fn elliptic_constants_table(
    generators: &[Generator],
    cfg: QuadratureConfig,
) -> Result<Vec<ConstantsRow>> {
    generators
        .iter()
        .map(|g| {
            let quadrature = elliptic_constants(g, cfg)?;
            let closed_form = g.closed_form();
            Ok(ConstantsRow {
                model: g.name(),
                discrepancy: quadrature.max_abs_diff(&closed_form),
                quadrature,
                closed_form,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuallyFlatRow {
    pub model: String,
    pub b: f64,
    /// `2/√(4b−1)`: line coefficient of the flat constant solution.
    pub flat_coefficient: f64,
    /// The `α > 0` at which `∇^(±α)` is dually flat, if any.
    pub alpha: Option<f64>,
    /// `−α (6b + 4d − 1)/(4b − 1)^{3/2}` at that `α`.
    pub alpha_coefficient: Option<f64>,
    /// Closed-form value usually listed for this entry: `√2` (Gauss) and
    /// `k√2/(k+3)` (Student). `None` for Cauchy.
    pub listed_alpha_coefficient: Option<f64>,
}

pub fn elliptic_dually_flat_table(models: &[EllipticFamily]) -> Vec<DuallyFlatRow> {
    models
        .iter()
        .map(|fam| {
            let alpha = fam.generator.and_then(|g| g.dually_flat_alpha());
            let listed = match fam.generator {
                Some(Generator::Gauss) => Some(libm::sqrt(2.0)),
                Some(Generator::Student { k }) if alpha.is_some() => {
                    Some(k * libm::sqrt(2.0) / (k + 3.0))
                }
                _ => None,
            };
            DuallyFlatRow {
                model: fam
                    .generator
                    .map_or_else(|| String::from("custom"), |g| g.name()),
                b: fam.b,
                flat_coefficient: 2.0 / fam.s(),
                alpha,
                alpha_coefficient: alpha.and_then(|a| fam.half_difference_coefficient(a)),
                listed_alpha_coefficient: listed,
            }
        })
        .collect()
}
