//! Shape of the horizontal part of `P` on a warped product with a flat
//! compatible connection.

use alloc::vec;
use alloc::vec::Vec;

use crate::chart::SampleGrid;
use crate::error::{precondition, Result};
use crate::tensor::{p_tensor, ConnectionField};
use crate::warped::{assumption_check, warped_metric, WarpMode, WarpedSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PStructureReport {
    pub mode: WarpMode,
    /// Max of `|G(V,V) G(grad w, P_U U) − G(U,U) G(grad w, P_V V)|`.
    pub gradient_balance: f64,
    /// Max of `|‖grad w‖²/w² (G(V,V)G(U,U) − G(U,V)²) − G(Hor P_V V, Hor P_U U)
    /// + G(Hor P_V U, Hor P_V U)|`.
    pub curvature_balance: f64,
    /// Max of `‖Hor P_V W − G(V,W) Π‖_G` with `Π = Hor P_U U / G(U,U)`. In an
    /// orthonormal fiber frame this is `‖Hor P_V W‖` for `V ⊥ W`.
    pub off_diagonal: f64,
    /// Max of `|G(Π, Π) − ‖grad w‖²/w²|`.
    pub magnitude: f64,
    /// Sign of the first base component of `Π` at each sample.
    pub branches: Vec<i8>,
    pub samples: usize,
}

impl PStructureReport {
    /// The common branch when every sample agrees.
    pub fn branch(&self) -> Option<i8> {
        let first = *self.branches.first()?;
        self.branches.iter().all(|&b| b == first).then_some(first)
    }

    pub fn max_residual(&self) -> f64 {
        self.gradient_balance
            .max(self.curvature_balance)
            .max(self.off_diagonal)
            .max(self.magnitude)
    }
}

/// Evaluates the horizontal `P` identities over `grid`. `w` is the fiber warp.
pub fn p_structure_check(
    spec: &WarpedSpec,
    d: &ConnectionField,
    grid: &SampleGrid,
) -> Result<PStructureReport> {
    let rep = assumption_check(spec, d, grid)?;
    if !rep.pass {
        return Err(precondition(
            "warped horizontality",
            alloc::format!(
                "{} is {:e}",
                rep.worst_component,
                rep.vertical_leak.max(rep.base_dependence)
            ),
        ));
    }
    let g = warped_metric(spec)?;
    let pf = p_tensor(&g, d)?;
    let nb = spec.base_dim();
    let nf = spec.fiber_dim();
    let mut out = PStructureReport {
        mode: spec.mode(),
        gradient_balance: 0.0,
        curvature_balance: 0.0,
        off_diagonal: 0.0,
        magnitude: 0.0,
        branches: Vec::with_capacity(grid.len()),
        samples: grid.len(),
    };
    for p in grid {
        let x = &p[..nb];
        let gm = g.at(p)?;
        let pt = pf.at(p)?;
        let w = spec.fiber_warp().value(x)?;
        let grad = spec.fiber_warp_gradient(x)?;
        let g_base = |u: &[f64], v: &[f64]| -> f64 {
            let mut s = 0.0;
            for a in 0..nb {
                for b in 0..nb {
                    s += u[a] * gm[(a, b)] * v[b];
                }
            }
            s
        };
        let hor =
            |u: usize, v: usize| -> Vec<f64> { (0..nb).map(|a| pt[(a, u + nb, v + nb)]).collect() };
        let gv = |u: usize, v: usize| gm[(u + nb, v + nb)];
        let ratio = g_base(&grad, &grad) / (w * w);

        let pi: Vec<f64> = hor(0, 0).iter().map(|h| h / gv(0, 0)).collect();
        out.magnitude = out.magnitude.max((g_base(&pi, &pi) - ratio).abs());
        out.branches.push(if pi[0] >= 0.0 { 1 } else { -1 });

        for u in 0..nf {
            for v in 0..nf {
                let (puu, pvv, puv) = (hor(u, u), hor(v, v), hor(v, u));
                let a = gv(v, v) * g_base(&grad, &puu) - gv(u, u) * g_base(&grad, &pvv);
                out.gradient_balance = out.gradient_balance.max(a.abs());
                let b = ratio * (gv(v, v) * gv(u, u) - gv(u, v) * gv(u, v)) - g_base(&pvv, &puu)
                    + g_base(&puv, &puv);
                out.curvature_balance = out.curvature_balance.max(b.abs());
                let mut r = vec![0.0; nb];
                for a in 0..nb {
                    r[a] = puv[a] - gv(v, u) * pi[a];
                }
                out.off_diagonal = out.off_diagonal.max(libm::sqrt(g_base(&r, &r).max(0.0)));
            }
        }
    }
    Ok(out)
}
