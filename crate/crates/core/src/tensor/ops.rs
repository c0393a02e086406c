use alloc::format;
use alloc::vec::Vec;

use super::field::{contract, ConnectionField, MetricField, PTensorField};
use crate::chart::SampleGrid;
use crate::error::{GeomError, Result};
use crate::linalg::{Array3, Array4, Matrix};

/// Torsion accepted as zero by [`p_tensor`].
pub const TORSION_TOL: f64 = 1e-9;

fn same_chart(g: &MetricField, nabla: &ConnectionField) -> Result<()> {
    if g.dim() != nabla.dim() {
        return Err(GeomError::Shape {
            what: format!(
                "metric on `{}` ({}-dim) and connection `{}` ({}-dim)",
                g.chart().label(),
                g.dim(),
                nabla.label(),
                nabla.dim()
            ),
        });
    }
    Ok(())
}

/// `∂_l g^{-1} = −g^{-1} (∂_l g) g^{-1}`, as `(l, a, b)`.
fn inverse_partials(ginv: &Matrix, dg: &Array3) -> Array3 {
    let n = ginv.dim();
    let mut out = Array3::zeros(n);
    for l in 0..n {
        let dl = Matrix::from_fn(n, |j, k| dg[(l, j, k)]);
        let m = ginv.mul(&dl).mul(ginv);
        for a in 0..n {
            for b in 0..n {
                out[(l, a, b)] = -m[(a, b)];
            }
        }
    }
    out
}

/// Raises the last index of a lowered array `(i, j, c) ↦ A_{ij,c}` to `(k, i, j)`.
fn raise(ginv: &Matrix, lowered: &Array3) -> Array3 {
    let n = ginv.dim();
    Array3::from_fn(n, |k, i, j| {
        (0..n).map(|c| ginv[(k, c)] * lowered[(i, j, c)]).sum()
    })
}

/// Partials of a raised array, given the lowered array and its partials
/// `(l, i, j, c) ↦ ∂_l A_{ij,c}`; returns `(l, k, i, j)`.
fn raise_partials(ginv: &Matrix, dginv: &Array3, lowered: &Array3, dlowered: &Array4) -> Array4 {
    let n = ginv.dim();
    Array4::from_fn(n, |l, k, i, j| {
        (0..n)
            .map(|c| dginv[(l, k, c)] * lowered[(i, j, c)] + ginv[(k, c)] * dlowered[(l, i, j, c)])
            .sum()
    })
}

/// Lowered symbols `Γ_{ij,k} = g_{km} Γ^m_{ij}`, stored `(i, j, k)`.
pub fn lower(g: &Matrix, gamma: &Array3) -> Array3 {
    let n = g.dim();
    Array3::from_fn(n, |i, j, k| {
        (0..n).map(|m| g[(k, m)] * gamma[(m, i, j)]).sum()
    })
}

/// Dual connection determined by `X g(Y,Z) = g(∇_X Y, Z) + g(Y, ∇*_X Z)`.
///
/// Its partials are assembled from the metric's first and second partials and
/// the connection's partials rather than by differencing the dual itself.
pub fn dual_connection(g: &MetricField, nabla: &ConnectionField) -> Result<ConnectionField> {
    same_chart(g, nabla)?;
    let (g1, n1) = (g.clone(), nabla.clone());
    let (g2, n2) = (g.clone(), nabla.clone());
    let lowered_dual = |g: &Matrix, dg: &Array3, gamma: &Array3| -> Array3 {
        // Γ*_{ik,j} = ∂_i g_{jk} − Γ_{ij,k}, stored (i, k, j).
        let n = g.dim();
        let low = lower(g, gamma);
        Array3::from_fn(n, |i, k, j| dg[(i, j, k)] - low[(i, j, k)])
    };
    Ok(ConnectionField::new(
        nabla.chart().clone(),
        format!("{}*", nabla.label()),
        move |p| {
            let gm = g1.at(p)?;
            let ginv = gm.inverse_at(p)?;
            let dg = g1.partials_at(p)?;
            let gamma = n1.at(p)?;
            Ok(raise(&ginv, &lowered_dual(&gm, &dg, &gamma)))
        },
    )
    .with_partials(move |p| {
        let gm = g2.at(p)?;
        let n = gm.dim();
        let ginv = gm.inverse_at(p)?;
        let dg = g2.partials_at(p)?;
        let ddg = g2.second_partials_at(p)?;
        let gamma = n2.at(p)?;
        let dgamma = n2.partials_at(p)?;
        let a = lowered_dual(&gm, &dg, &gamma);
        // ∂_l Γ*_{ik,j} = ∂_l ∂_i g_{jk} − ∂_l g_{km} Γ^m_{ij} − g_{km} ∂_l Γ^m_{ij}.
        let da = Array4::from_fn(n, |l, i, k, j| {
            let mut s = ddg[(l, i, j, k)];
            for m in 0..n {
                s -= dg[(l, k, m)] * gamma[(m, i, j)] + gm[(k, m)] * dgamma[(l, m, i, j)];
            }
            s
        });
        let dginv = inverse_partials(&ginv, &dg);
        Ok(raise_partials(&ginv, &dginv, &a, &da))
    }))
}

/// Levi-Civita connection of `g`.
pub fn levi_civita(g: &MetricField) -> ConnectionField {
    let (g1, g2) = (g.clone(), g.clone());
    let lowered = |dg: &Array3| -> Array3 {
        let n = dg.dim();
        Array3::from_fn(n, |i, j, l| {
            0.5 * (dg[(i, j, l)] + dg[(j, i, l)] - dg[(l, i, j)])
        })
    };
    ConnectionField::new(
        g.chart().clone(),
        format!("levi-civita({})", g.chart().label()),
        move |p| {
            let ginv = g1.inverse_at(p)?;
            Ok(raise(&ginv, &lowered(&g1.partials_at(p)?)))
        },
    )
    .with_partials(move |p| {
        let ginv = g2.inverse_at(p)?;
        let n = ginv.dim();
        let dg = g2.partials_at(p)?;
        let ddg = g2.second_partials_at(p)?;
        let b = lowered(&dg);
        let db = Array4::from_fn(n, |m, i, j, l| {
            0.5 * (ddg[(m, i, j, l)] + ddg[(m, j, i, l)] - ddg[(m, l, i, j)])
        });
        Ok(raise_partials(
            &ginv,
            &inverse_partials(&ginv, &dg),
            &b,
            &db,
        ))
    })
}

/// `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}`.
pub fn torsion_at(nabla: &ConnectionField, p: &[f64]) -> Result<Array3> {
    let gamma = nabla.at(p)?;
    Ok(Array3::from_fn(gamma.dim(), |k, i, j| {
        gamma[(k, i, j)] - gamma[(k, j, i)]
    }))
}

/// Curvature `(l, k, i, j) ↦ R^l_{kij}`, the `∂_l` component of `R(∂_i, ∂_j) ∂_k`.
pub fn curvature_at(nabla: &ConnectionField, p: &[f64]) -> Result<Array4> {
    let gamma = nabla.at(p)?;
    let dgamma = nabla.partials_at(p)?;
    Ok(curvature_from(&gamma, &dgamma))
}

fn curvature_from(gamma: &Array3, dgamma: &Array4) -> Array4 {
    let n = gamma.dim();
    Array4::from_fn(n, |l, k, i, j| {
        let mut r = dgamma[(i, l, j, k)] - dgamma[(j, l, i, k)];
        for m in 0..n {
            r += gamma[(l, i, m)] * gamma[(m, j, k)] - gamma[(l, j, m)] * gamma[(m, i, k)];
        }
        r
    })
}

/// `P = (∇ − ∇*)/2`. Rejects connections with torsion on the chart's default grid.
pub fn p_tensor(g: &MetricField, nabla: &ConnectionField) -> Result<PTensorField> {
    same_chart(g, nabla)?;
    let mut worst: f64 = 0.0;
    for p in &nabla.chart().default_grid() {
        worst = worst.max(torsion_at(nabla, p)?.max_abs());
    }
    if worst > TORSION_TOL {
        return Err(GeomError::Torsion { max: worst });
    }
    let dual = dual_connection(g, nabla)?;
    let nabla = nabla.clone();
    Ok(PTensorField::new(nabla.chart().clone(), move |p| {
        Ok(nabla.at(p)?.zip_with(&dual.at(p)?, |a, b| 0.5 * (a - b)))
    }))
}

/// `|2g(∇_X Y, Z) − (X g(Y,Z) + Y g(X,Z) − Z g(X,Y) + 2g(Y, P_X Z))|` for
/// constant-coefficient (hence commuting) vectors.
pub fn koszul_residual(
    g: &MetricField,
    nabla: &ConnectionField,
    p: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<f64> {
    same_chart(g, nabla)?;
    let gm = g.at(p)?;
    let dg = g.partials_at(p)?;
    let gamma = nabla.at(p)?;
    let dual = dual_connection(g, nabla)?.at(p)?;
    let n = gm.dim();
    let deriv = |v: &[f64], a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += v[i] * dg[(i, j, k)] * a[j] * b[k];
                }
            }
        }
        s
    };
    let lhs = 2.0 * gm.bilinear(&contract(&gamma, x, y), z);
    let pxz: Vec<f64> = contract(&gamma, x, z)
        .iter()
        .zip(contract(&dual, x, z))
        .map(|(a, b)| 0.5 * (a - b))
        .collect();
    let rhs = deriv(x, y, z) + deriv(y, x, z) - deriv(z, x, y) + 2.0 * gm.bilinear(y, &pxz);
    Ok((lhs - rhs).abs())
}

/// Max over the grid of `|R^l_{kij} − k (g_{jk} δ^l_i − g_{ik} δ^l_j)|`.
pub fn constant_curvature_residual(
    g: &MetricField,
    nabla: &ConnectionField,
    k: f64,
    grid: &SampleGrid,
) -> Result<f64> {
    same_chart(g, nabla)?;
    let mut worst: f64 = 0.0;
    for p in grid {
        let r = curvature_at(nabla, p)?;
        let gm = g.at(p)?;
        let n = gm.dim();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for l in 0..n {
            for kk in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let model = k * (gm[(j, kk)] * delta(l, i) - gm[(i, kk)] * delta(l, j));
                        worst = worst.max((r[(l, kk, i, j)] - model).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `∂_i g_{jk} − Γ_{ij,k} − Γ*_{ik,j}` at `p`, stored `(i, j, k)`.
pub fn duality_defect(
    g: &MetricField,
    nabla: &ConnectionField,
    dual: &ConnectionField,
    p: &[f64],
) -> Result<Array3> {
    let gm = g.at(p)?;
    let dg = g.partials_at(p)?;
    let low = lower(&gm, &nabla.at(p)?);
    let low_dual = lower(&gm, &dual.at(p)?);
    Ok(Array3::from_fn(gm.dim(), |i, j, k| {
        dg[(i, j, k)] - low[(i, j, k)] - low_dual[(i, k, j)]
    }))
}

/// `(∇g)_{ijk} = ∂_i g_{jk} − Γ_{ij,k} − Γ_{ik,j}`, stored `(i, j, k)`.
pub fn metric_derivative(g: &MetricField, nabla: &ConnectionField, p: &[f64]) -> Result<Array3> {
    duality_defect(g, nabla, nabla, p)
}
