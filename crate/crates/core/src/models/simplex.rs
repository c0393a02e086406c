//! Probability simplex on `m` atoms with the Fisher metric and α-connections,
//! and its denormalization `{τ p}`.
//!
//! Both the metric and the lowered connection are evaluated as literal
//! finite sums of the `l^(α)` integrands. Analytic partials use the closed
//! forms those sums reduce to.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::ChartBox;
use crate::error::{domain, Result};
use crate::linalg::{Array3, Array4, Matrix};
use crate::tensor::{ConnectionField, MetricField};

/// Probabilities below this are treated as the boundary of the simplex.
pub const BOUNDARY_EPS: f64 = 1e-8;

/// `L'_α(u) = u^{−(1+α)/2}`.
pub fn l_prime(alpha: f64, u: f64) -> f64 {
    libm::pow(u, -(1.0 + alpha) / 2.0)
}

/// `L''_α(u) = −(1+α)/2 · u^{−(3+α)/2}`.
pub fn l_second(alpha: f64, u: f64) -> f64 {
    -(1.0 + alpha) / 2.0 * libm::pow(u, -(3.0 + alpha) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexFamily {
    /// Number of atoms, at least 2.
    pub atoms: usize,
    pub alpha: f64,
}

impl SimplexFamily {
    pub fn new(atoms: usize, alpha: f64) -> Result<Self> {
        if atoms < 2 {
            return Err(domain(format!(
                "simplex needs at least 2 atoms, got {atoms}"
            )));
        }
        if !alpha.is_finite() {
            return Err(domain("alpha must be finite"));
        }
        Ok(SimplexFamily { atoms, alpha })
    }

    pub fn dim(&self) -> usize {
        self.atoms - 1
    }

    /// Chart `(p_1, …, p_{m−1})` with a window keeping `Σ p_i < 1`.
    pub fn chart(&self) -> ChartBox {
        let n = self.dim();
        let m = self.atoms as f64;
        let names: Vec<_> = (1..=n).map(|i| format!("p{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        ChartBox::new("simplex", vec![(0.0, 1.0); n])
            .and_then(|c| c.with_names(&refs))
            .and_then(|c| c.with_window(vec![(0.2 / m, 0.9 / (m - 1.0)); n]))
            .expect("simplex chart is well formed")
    }

    /// All `m` probabilities at `ξ`, the last one being `1 − Σ ξ_i`.
    pub fn probabilities(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let mut p = xi.to_vec();
        p.push(1.0 - xi.iter().sum::<f64>());
        if let Some((i, &v)) = p.iter().enumerate().find(|(_, &v)| !(v >= BOUNDARY_EPS)) {
            return Err(domain(format!(
                "atom {} has probability {v} < {BOUNDARY_EPS} at {xi:?}",
                i + 1
            )));
        }
        Ok(p)
    }

    /// `∂_i p_x`: `δ_{ix}` for the free atoms, `−1` for the last one.
    fn dp(&self, i: usize, x: usize) -> f64 {
        if x == self.dim() {
            -1.0
        } else if x == i {
            1.0
        } else {
            0.0
        }
    }
}

/// Closed-form inverse Fisher metric `g^{ij} = p_i δ_{ij} − p_i p_j`.
fn inverse_fisher(p: &[f64]) -> Matrix {
    let n = p.len() - 1;
    Matrix::from_fn(n, |i, j| if i == j { p[i] } else { 0.0 } - p[i] * p[j])
}

/// `g_ij = Σ_x ∂_i l^(α) ∂_j l^(−α)`, evaluated with the family's α.
pub fn simplex_fisher(fam: &SimplexFamily) -> MetricField {
    let f = *fam;
    let n = f.dim();
    MetricField::new(f.chart(), move |xi| {
        let p = f.probabilities(xi)?;
        Ok(Matrix::from_fn(n, |i, j| {
            (0..=n)
                .map(|x| l_prime(f.alpha, p[x]) * f.dp(i, x) * l_prime(-f.alpha, p[x]) * f.dp(j, x))
                .sum()
        }))
    })
    .with_partials(move |xi| {
        let p = f.probabilities(xi)?;
        let pm = p[n];
        Ok(Array3::from_fn(n, |l, i, j| {
            let diag = if i == j && j == l {
                -1.0 / (p[i] * p[i])
            } else {
                0.0
            };
            diag + 1.0 / (pm * pm)
        }))
    })
    .with_second_partials(move |xi| {
        let p = f.probabilities(xi)?;
        let pm = p[n];
        Ok(Array4::from_fn(n, |k, l, i, j| {
            let diag = if i == j && j == l && l == k {
                2.0 / (p[i] * p[i] * p[i])
            } else {
                0.0
            };
            diag + 2.0 / (pm * pm * pm)
        }))
    })
}

/// Lowered α-connection `Γ_{ij,k} = Σ_x ∂_i∂_j l^(α) ∂_k l^(−α)` as a literal sum.
pub fn simplex_lowered_connection(fam: &SimplexFamily, xi: &[f64]) -> Result<Array3> {
    let p = fam.probabilities(xi)?;
    let n = fam.dim();
    // ∂_i∂_j p_x = 0 in this chart, so only the L'' term survives.
    Ok(Array3::from_fn(n, |i, j, k| {
        (0..=n)
            .map(|x| {
                l_second(fam.alpha, p[x])
                    * fam.dp(i, x)
                    * fam.dp(j, x)
                    * l_prime(-fam.alpha, p[x])
                    * fam.dp(k, x)
            })
            .sum()
    }))
}

/// The α-connection `Γ^k_{ij}` on the simplex chart.
pub fn simplex_alpha_connection(fam: &SimplexFamily) -> ConnectionField {
    let f = *fam;
    let n = f.dim();
    let c = -(1.0 + f.alpha) / 2.0;
    ConnectionField::new(f.chart(), format!("simplex α={}", f.alpha), move |xi| {
        let p = f.probabilities(xi)?;
        let ginv = inverse_fisher(&p);
        let low = simplex_lowered_connection(&f, xi)?;
        Ok(Array3::from_fn(n, |k, i, j| {
            (0..n).map(|m| ginv[(k, m)] * low[(i, j, m)]).sum()
        }))
    })
    .with_partials(move |xi| {
        let p = f.probabilities(xi)?;
        let pm = p[n];
        let ginv = inverse_fisher(&p);
        // Γ^k_{ij} = g^{km} Γ_{ij,m} with Γ_{ij,m} = c (δ_{ijm}/p_i² − 1/p_m²).
        let low = |i: usize, j: usize, m: usize| {
            c * (if i == j && j == m {
                1.0 / (p[i] * p[i])
            } else {
                0.0
            } - 1.0 / (pm * pm))
        };
        let dlow = |l: usize, i: usize, j: usize, m: usize| {
            -2.0 * c
                * (if i == j && j == m && m == l {
                    1.0 / (p[i] * p[i] * p[i])
                } else {
                    0.0
                } + 1.0 / (pm * pm * pm))
        };
        // ∂_l g^{km} = δ_{lk}δ_{km} − δ_{lk} p_m − p_k δ_{lm}.
        let dginv = |l: usize, k: usize, m: usize| {
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            d(l, k) * d(k, m) - d(l, k) * p[m] - p[k] * d(l, m)
        };
        Ok(Array4::from_fn(n, |l, k, i, j| {
            (0..n)
                .map(|m| dginv(l, k, m) * low(i, j, m) + ginv[(k, m)] * dlow(l, i, j, m))
                .sum()
        }))
    })
}

/// Simplex family extended by a scale `τ > 0`, chart `(τ, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenormalizedFamily {
    pub simplex: SimplexFamily,
}

impl DenormalizedFamily {
    pub fn new(atoms: usize, alpha: f64) -> Result<Self> {
        Ok(DenormalizedFamily {
            simplex: SimplexFamily::new(atoms, alpha)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.simplex.alpha
    }

    pub fn dim(&self) -> usize {
        self.simplex.atoms
    }

    /// Chart `(τ, p_1, …, p_{m−1})`; `τ` is sampled in `[1/16, 1]`, i.e. `t ∈ [0.5, 2]`.
    pub fn chart(&self) -> ChartBox {
        let tau = ChartBox::new("tau", vec![(0.0, f64::INFINITY)])
            .and_then(|c| c.with_names(&["tau"]))
            .and_then(|c| c.with_window(vec![(1.0 / 16.0, 1.0)]))
            .expect("tau chart is well formed");
        tau.product(&self.simplex.chart(), "denormalized simplex")
    }

    /// Chart `(t, ξ)` with `τ = t²/4`.
    pub fn t_chart(&self) -> ChartBox {
        let t = ChartBox::new("t", vec![(0.0, f64::INFINITY)])
            .and_then(|c| c.with_names(&["t"]))
            .and_then(|c| c.with_window(vec![(0.5, 2.0)]))
            .expect("t chart is well formed");
        t.product(&self.simplex.chart(), "denormalized simplex (t)")
    }
}

/// Metric `g̃_ττ = 1/τ`, `g̃_ij = τ g_ij` and α-connection
/// `∇̃_X̃ Ỹ = (∇_X Y)~ − (1+α)/2 ⟨X̃,Ỹ⟩ ∂τ`, `∇̃_∂τ X̃ = (1−α)/(2τ) X̃`,
/// `∇̃_∂τ ∂τ = −(1+α)/(2τ) ∂τ` on the `(τ, ξ)` chart.
pub fn denormalization_geometry(fam: &DenormalizedFamily) -> (MetricField, ConnectionField) {
    let alpha = fam.alpha();
    let n = fam.dim();
    let base_g = simplex_fisher(&fam.simplex);
    let base_c = simplex_alpha_connection(&fam.simplex);
    let chart = fam.chart();

    let (g0, g1, g2) = (base_g.clone(), base_g.clone(), base_g.clone());
    let metric = MetricField::new(chart.clone(), move |q| {
        let tau = q[0];
        let g = g0.at(&q[1..])?;
        Ok(Matrix::from_fn(n, |a, b| match (a, b) {
            (0, 0) => 1.0 / tau,
            (0, _) | (_, 0) => 0.0,
            _ => tau * g[(a - 1, b - 1)],
        }))
    })
    .with_partials(move |q| {
        let tau = q[0];
        let g = g1.at(&q[1..])?;
        let dg = g1.partials_at(&q[1..])?;
        Ok(Array3::from_fn(n, |c, a, b| match (c, a, b) {
            (0, 0, 0) => -1.0 / (tau * tau),
            (_, 0, _) | (_, _, 0) => 0.0,
            (0, _, _) => g[(a - 1, b - 1)],
            _ => tau * dg[(c - 1, a - 1, b - 1)],
        }))
    })
    .with_second_partials(move |q| {
        let tau = q[0];
        let dg = g2.partials_at(&q[1..])?;
        let ddg = g2.second_partials_at(&q[1..])?;
        Ok(Array4::from_fn(n, |c, e, a, b| match (c, e, a, b) {
            (0, 0, 0, 0) => 2.0 / (tau * tau * tau),
            (_, _, 0, _) | (_, _, _, 0) => 0.0,
            (0, 0, _, _) => 0.0,
            (0, _, _, _) => dg[(e - 1, a - 1, b - 1)],
            (_, 0, _, _) => dg[(c - 1, a - 1, b - 1)],
            _ => tau * ddg[(c - 1, e - 1, a - 1, b - 1)],
        }))
    });

    let (bg0, bc0) = (base_g.clone(), base_c.clone());
    let (bg1, bc1) = (base_g, base_c);
    let mixed = (1.0 - alpha) / 2.0;
    let vert = -(1.0 + alpha) / 2.0;
    let connection = ConnectionField::new(chart, format!("denormalized α={alpha}"), move |q| {
        let tau = q[0];
        let g = bg0.at(&q[1..])?;
        let gamma = bc0.at(&q[1..])?;
        Ok(Array3::from_fn(n, |k, i, j| match (k, i, j) {
            (0, 0, 0) => vert / tau,
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, _, _) => vert * tau * g[(i - 1, j - 1)],
            (_, 0, 0) => 0.0,
            (_, 0, _) => {
                if k == j {
                    mixed / tau
                } else {
                    0.0
                }
            }
            (_, _, 0) => {
                if k == i {
                    mixed / tau
                } else {
                    0.0
                }
            }
            _ => gamma[(k - 1, i - 1, j - 1)],
        }))
    })
    .with_partials(move |q| {
        let tau = q[0];
        let g = bg1.at(&q[1..])?;
        let dg = bg1.partials_at(&q[1..])?;
        let dgamma = bc1.partials_at(&q[1..])?;
        Ok(Array4::from_fn(n, |l, k, i, j| match (k, i, j) {
            (0, 0, 0) => {
                if l == 0 {
                    -vert / (tau * tau)
                } else {
                    0.0
                }
            }
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, _, _) => {
                if l == 0 {
                    vert * g[(i - 1, j - 1)]
                } else {
                    vert * tau * dg[(l - 1, i - 1, j - 1)]
                }
            }
            (_, 0, 0) => 0.0,
            (_, 0, _) | (_, _, 0) => {
                let hit = (i == 0 && k == j) || (j == 0 && k == i);
                if hit && l == 0 {
                    -mixed / (tau * tau)
                } else {
                    0.0
                }
            }
            _ => {
                if l == 0 {
                    0.0
                } else {
                    dgamma[(l - 1, k - 1, i - 1, j - 1)]
                }
            }
        }))
    });
    (metric, connection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{dual_connection, flatness_report};

    #[test]
    fn two_atoms_at_half() {
        let g = simplex_fisher(&SimplexFamily::new(2, 0.3).unwrap());
        assert!((g.at(&[0.5]).unwrap()[(0, 0)] - 4.0).abs() < 1e-12);
        let p = 0.3;
        assert!((g.at(&[p]).unwrap()[(0, 0)] - 1.0 / (p * (1.0 - p))).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_a_domain_error() {
        let g = simplex_fisher(&SimplexFamily::new(3, 0.0).unwrap());
        assert!(matches!(
            g.at(&[0.5, 0.5 - 1e-9]),
            Err(crate::GeomError::Domain { .. })
        ));
    }

    #[test]
    fn dual_of_alpha_is_minus_alpha() {
        let fam = SimplexFamily::new(3, 0.4).unwrap();
        let g = simplex_fisher(&fam);
        let dual = dual_connection(&g, &simplex_alpha_connection(&fam)).unwrap();
        let minus = simplex_alpha_connection(&SimplexFamily::new(3, -0.4).unwrap());
        let p = [0.21, 0.37];
        assert!(dual.at(&p).unwrap().max_abs_diff(&minus.at(&p).unwrap()) < 1e-8);
    }

    #[test]
    fn tau_metric_entry() {
        let (g, _) = denormalization_geometry(&DenormalizedFamily::new(3, 0.5).unwrap());
        assert!((g.at(&[4.0, 0.2, 0.3]).unwrap()[(0, 0)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exponential_and_mixture_are_flat() {
        for alpha in [1.0, -1.0] {
            let fam = SimplexFamily::new(3, alpha).unwrap();
            let g = simplex_fisher(&fam);
            let c = simplex_alpha_connection(&fam);
            let rep = flatness_report(&g, &c, &fam.chart().default_grid(), 1e-8).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}
