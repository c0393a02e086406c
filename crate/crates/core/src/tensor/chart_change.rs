use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::field::{ConnectionField, Eval, MetricField};
use crate::chart::ChartBox;
use crate::error::{GeomError, Result};
use crate::linalg::{Array3, Matrix};

/// Value, Jacobian `(a, i) ↦ ∂x^a/∂u^i` and second derivatives
/// `(a, i, j) ↦ ∂²x^a/∂u^i∂u^j` of a coordinate map at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MapJet {
    pub value: Vec<f64>,
    pub jacobian: Matrix,
    pub hessian: Array3,
}

/// A smooth map `u ↦ x` from a new chart into an existing one.
#[derive(Clone)]
pub struct ChartMap {
    source: ChartBox,
    jet: Eval<MapJet>,
}

impl core::fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ChartMap")
            .field("source", &self.source)
            .finish()
    }
}

impl ChartMap {
    pub fn new(
        source: ChartBox,
        jet: impl Fn(&[f64]) -> Result<MapJet> + Send + Sync + 'static,
    ) -> Self {
        ChartMap {
            source,
            jet: Arc::new(jet),
        }
    }

    pub fn source(&self) -> &ChartBox {
        &self.source
    }

    pub fn jet(&self, u: &[f64]) -> Result<MapJet> {
        self.source.check(u)?;
        (self.jet)(u)
    }
}

fn check_dims(map: &ChartMap, target: usize) -> Result<()> {
    if map.source.dim() != target {
        return Err(GeomError::Shape {
            what: alloc::format!(
                "chart map from {}-dim `{}` into a {}-dim chart",
                map.source.dim(),
                map.source.label(),
                target
            ),
        });
    }
    Ok(())
}

/// `g'_{ij}(u) = J^a_i J^b_j g_{ab}(x(u))`. Derivatives fall back to finite differences.
pub fn pullback_metric(g: &MetricField, map: &ChartMap) -> Result<MetricField> {
    check_dims(map, g.dim())?;
    let (g, map2) = (g.clone(), map.clone());
    Ok(MetricField::new(map.source.clone(), move |u| {
        let jet = map2.jet(u)?;
        let gx = g.at(&jet.value)?;
        Ok(jet.jacobian.transpose().mul(&gx).mul(&jet.jacobian))
    }))
}

/// Christoffel symbols of `∇` in the new chart:
/// `Γ'^k_{ij} = (J^{-1})^k_a (∂_i∂_j x^a + J^b_i J^c_j Γ^a_{bc})`.
pub fn pullback_connection(
    nabla: &ConnectionField,
    map: &ChartMap,
    label: impl Into<String>,
) -> Result<ConnectionField> {
    check_dims(map, nabla.dim())?;
    let (nabla, map2) = (nabla.clone(), map.clone());
    Ok(ConnectionField::new(map.source.clone(), label, move |u| {
        let jet = map2.jet(u)?;
        let n = u.len();
        let gamma = nabla.at(&jet.value)?;
        let jinv = jet.jacobian.inverse().ok_or_else(|| GeomError::Domain {
            what: alloc::format!("chart map is not a local diffeomorphism at {u:?}"),
        })?;
        let j = &jet.jacobian;
        let mut inner = Array3::zeros(n);
        for a in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    let mut s = jet.hessian[(a, i, jj)];
                    for b in 0..n {
                        for c in 0..n {
                            s += j[(b, i)] * j[(c, jj)] * gamma[(a, b, c)];
                        }
                    }
                    inner[(a, i, jj)] = s;
                }
            }
        }
        Ok(Array3::from_fn(n, |k, i, jj| {
            (0..n).map(|a| jinv[(k, a)] * inner[(a, i, jj)]).sum()
        }))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ops::levi_civita;
    use alloc::vec;

    fn polar() -> ChartMap {
        let chart = ChartBox::new("polar", vec![(0.1, 5.0), (-3.0, 3.0)]).unwrap();
        ChartMap::new(chart, |u| {
            let (r, th) = (u[0], u[1]);
            let (s, c) = (libm::sin(th), libm::cos(th));
            Ok(MapJet {
                value: vec![r * c, r * s],
                jacobian: Matrix::from_rows(2, vec![c, -r * s, s, r * c]),
                hessian: Array3::from_fn(2, |a, i, j| match (a, i, j) {
                    (0, 0, 1) | (0, 1, 0) => -s,
                    (0, 1, 1) => -r * c,
                    (1, 0, 1) | (1, 1, 0) => c,
                    (1, 1, 1) => -r * s,
                    _ => 0.0,
                }),
            })
        })
    }

    #[test]
    fn flat_connection_in_polar_coordinates() {
        let plane = ChartBox::new("plane", vec![(-10.0, 10.0), (-10.0, 10.0)]).unwrap();
        let flat = ConnectionField::zero(plane.clone(), "d");
        let polar_d = pullback_connection(&flat, &polar(), "d-polar").unwrap();
        let g = pullback_metric(
            &MetricField::new(plane, |_| Ok(Matrix::identity(2))),
            &polar(),
        )
        .unwrap();
        let lc = levi_civita(&g);
        let u = [1.7, 0.4];
        let a = polar_d.at(&u).unwrap();
        // Γ^r_{θθ} = −r, Γ^θ_{rθ} = 1/r.
        assert!((a[(0, 1, 1)] + 1.7).abs() < 1e-12);
        assert!((a[(1, 0, 1)] - 1.0 / 1.7).abs() < 1e-12);
        assert!(a.max_abs_diff(&lc.at(&u).unwrap()) < 1e-8);
    }
}
