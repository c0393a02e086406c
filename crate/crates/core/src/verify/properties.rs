//! Identities every torsion-free dual pair satisfies, evaluated over a zoo of
//! model spaces.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::Check;
use crate::chart::SampleGrid;
use crate::error::Result;
use crate::linalg::{Array3, Matrix};
use crate::models::{
    denormalization_geometry, elliptic_metric, mixture_connection, monotone_metric_field,
    simplex_alpha_connection, simplex_fisher, takano_geometry, upper_half_plane_metric,
    DenormalizedFamily, EllipticFamily, Generator, MatrixChart, MonotoneSymbol, SimplexFamily,
    TakanoSpace,
};
use crate::tensor::{
    curvature_at, default_tolerance, dual_connection, duality_defect, koszul_residual, levi_civita,
    lower, metric_derivative, p_tensor, torsion_at, ConnectionField, MetricField,
};
use crate::verify::line::{constant_l_solve, line_connection, LinePair};
use crate::warped::{cone_extend, euclidean_metric, ConeExtensionSpec, ConeSign};
use crate::ChartBox;

/// Spec for the involution check `∇** = ∇`.
pub const INVOLUTION_TOL: f64 = 1e-10;
/// Agreement between finite-difference and analytic curvature.
pub const FD_CURVATURE_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub metric: MetricField,
    pub connection: ConnectionField,
}

fn entry(name: impl Into<String>, metric: MetricField, connection: ConnectionField) -> ZooEntry {
    ZooEntry {
        name: name.into(),
        metric,
        connection,
    }
}

/// Torsion-free dual pairs on every model in the crate, flat and curved.
pub fn model_zoo() -> Result<Vec<ZooEntry>> {
    let mut zoo = Vec::new();
    let plane = euclidean_metric(ChartBox::new("plane", vec![(-2.0, 2.0); 2])?);
    zoo.push(entry(
        "euclidean",
        plane.clone(),
        ConnectionField::zero(plane.chart().clone(), "zero"),
    ));
    for (n, alpha) in [(1, 1.0), (1, 0.0), (1, -1.0), (2, 0.5), (3, -0.3)] {
        let (g, c) = takano_geometry(&TakanoSpace::new(n, alpha)?);
        zoo.push(entry(format!("takano n={n} α={alpha}"), g, c));
    }
    for (m, alpha) in [(3, 1.0), (3, 0.3), (4, -1.0)] {
        let fam = SimplexFamily::new(m, alpha)?;
        zoo.push(entry(
            format!("simplex m={m} α={alpha}"),
            simplex_fisher(&fam),
            simplex_alpha_connection(&fam),
        ));
    }
    for (m, alpha) in [(2, 1.0), (3, -1.0), (3, 0.5)] {
        let (g, c) = denormalization_geometry(&DenormalizedFamily::new(m, alpha)?);
        zoo.push(entry(format!("denormalized m={m} α={alpha}"), g, c));
    }
    let gauss = EllipticFamily::closed_form(Generator::Gauss)?;
    let g = elliptic_metric(&gauss);
    zoo.push(entry(
        "elliptic gauss levi-civita",
        g.clone(),
        levi_civita(&g),
    ));
    let (k, l) = constant_l_solve(gauss.b)?;
    zoo.push(entry(
        "elliptic gauss flat line",
        g,
        line_connection(&gauss, &LinePair::constant(k, l), 1.0),
    ));
    let uhp = upper_half_plane_metric(2.0)?;
    zoo.push(entry(
        "upper half plane λ=2",
        uhp.clone(),
        levi_civita(&uhp),
    ));
    let (cg, cc) = cone_extend(
        &ConeExtensionSpec {
            fiber_connection: ConnectionField::zero(plane.chart().clone(), "zero"),
            sign: ConeSign::Plus,
        },
        &plane,
    )?;
    zoo.push(entry("cone over plane", cg, cc));
    zoo.push(entry(
        "bkm density mixture",
        monotone_metric_field(MonotoneSymbol::Bkm, MatrixChart::Density),
        mixture_connection(MatrixChart::Density)?,
    ));
    Ok(zoo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub space: String,
    pub samples: usize,
    pub tolerance: f64,
    pub duality_reconstruction: f64,
    pub involution: f64,
    /// `max |P^k_{ij} − P^k_{ji}|`.
    pub p_symmetry: f64,
    /// `max |g(P_X Y, Z) − g(Y, P_X Z)|` on coordinate vectors.
    pub p_self_adjoint: f64,
    /// `max |P_{fX} Y − f P_X Y| + |P_X (fY) − f P_X Y|` for non-constant `f, Y`.
    pub p_tensorial: f64,
    pub koszul: f64,
    /// `max |(Γ + Γ*)/2 − Γ_LC|`.
    pub levi_civita_average: f64,
    /// `max |(∇g)_{ijk} − (∇g)_{jik}|`.
    pub metric_derivative_asymmetry: f64,
    pub torsion: f64,
    pub dual_torsion: f64,
    pub curvature: f64,
    pub dual_curvature: f64,
    /// `max |R_fd − R_analytic|`, present when the connection has analytic partials.
    pub fd_curvature_gap: Option<f64>,
}

impl PropertyReport {
    /// Whether the torsion/metric conditions hold all together or not at all
    /// beyond one.
    pub fn condition_count(&self) -> usize {
        [
            self.torsion <= self.tolerance,
            self.dual_torsion <= self.tolerance,
            self.metric_derivative_asymmetry <= self.tolerance,
            self.levi_civita_average <= self.tolerance,
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    pub fn checks(&self) -> Vec<Check> {
        let tol = self.tolerance;
        let name = |what: &str| format!("{}: {what}", self.space);
        let mut out = vec![
            Check::at_most(
                name("duality reconstruction"),
                self.duality_reconstruction,
                tol,
            ),
            Check::at_most(name("dual involution"), self.involution, INVOLUTION_TOL),
            Check::at_most(name("P symmetric"), self.p_symmetry, tol),
            Check::at_most(name("P self-adjoint"), self.p_self_adjoint, tol),
            Check::at_most(name("P tensorial"), self.p_tensorial, tol),
            Check::at_most(name("koszul"), self.koszul, tol),
            Check::at_most(name("levi-civita average"), self.levi_civita_average, tol),
            Check::at_most(name("∇g symmetric"), self.metric_derivative_asymmetry, tol),
            Check::flag(
                name("torsion conditions all hold"),
                self.condition_count() == 4,
            ),
            Check::flag(
                name("|R| small iff |R*| small"),
                (self.curvature <= tol) == (self.dual_curvature <= tol),
            ),
        ];
        if let Some(gap) = self.fd_curvature_gap {
            out.push(Check::at_most(
                name("fd vs analytic curvature"),
                gap,
                FD_CURVATURE_TOL,
            ));
        }
        out
    }
}

/// `∇_X Y` for a field with value `y` and partials `dy[(i, k)] = ∂_i Y^k`.
fn act(gamma: &Array3, x: &[f64], y: &[f64], dy: &Matrix) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                s += x[i] * dy[(i, k)];
                for j in 0..n {
                    s += gamma[(k, i, j)] * x[i] * y[j];
                }
            }
            s
        })
        .collect()
}

fn tensorial_defect(gamma: &Array3, dual: &Array3, p: &[f64]) -> f64 {
    let n = p.len();
    // f = 1 + Σ p_i²/3 and Y^k = 1 + k + p_k, evaluated together with their derivatives.
    let f = 1.0 + p.iter().map(|v| v * v).sum::<f64>() / 3.0;
    let df: Vec<f64> = p.iter().map(|v| 2.0 * v / 3.0).collect();
    let y: Vec<f64> = (0..n).map(|k| 1.0 + k as f64 + p[k]).collect();
    let dy = Matrix::identity(n);
    let half_diff = |x: &[f64], y: &[f64], dy: &Matrix| -> Vec<f64> {
        act(gamma, x, y, dy)
            .iter()
            .zip(act(dual, x, y, dy))
            .map(|(a, b)| 0.5 * (a - b))
            .collect()
    };
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut x = vec![0.0; n];
        x[i] = 1.0;
        let base = half_diff(&x, &y, &dy);
        let fx: Vec<f64> = x.iter().map(|v| f * v).collect();
        let scaled_x = half_diff(&fx, &y, &dy);
        let fy: Vec<f64> = y.iter().map(|v| f * v).collect();
        let dfy = Matrix::from_fn(n, |a, k| df[a] * y[k] + f * dy[(a, k)]);
        let scaled_y = half_diff(&x, &fy, &dfy);
        for k in 0..n {
            worst = worst
                .max((scaled_x[k] - f * base[k]).abs())
                .max((scaled_y[k] - f * base[k]).abs());
        }
    }
    worst
}

/// Evaluates every identity for `(g, ∇)` over `grid`.
pub fn property_report(e: &ZooEntry, grid: &SampleGrid) -> Result<PropertyReport> {
    let (g, nabla) = (&e.metric, &e.connection);
    let tolerance = default_tolerance(g, nabla);
    let dual = dual_connection(g, nabla)?;
    let dual2 = dual_connection(g, &dual)?;
    let lc = levi_civita(g);
    let pf = p_tensor(g, nabla)?;
    let fd_nabla = nabla
        .has_analytic_partials()
        .then(|| nabla.clone().without_partials());
    let n = g.dim();
    let mut r = PropertyReport {
        space: e.name.clone(),
        samples: grid.len(),
        tolerance,
        duality_reconstruction: 0.0,
        involution: 0.0,
        p_symmetry: 0.0,
        p_self_adjoint: 0.0,
        p_tensorial: 0.0,
        koszul: 0.0,
        levi_civita_average: 0.0,
        metric_derivative_asymmetry: 0.0,
        torsion: 0.0,
        dual_torsion: 0.0,
        curvature: 0.0,
        dual_curvature: 0.0,
        fd_curvature_gap: fd_nabla.as_ref().map(|_| 0.0),
    };
    let units: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for p in grid {
        let gm = g.at(p)?;
        let gamma = nabla.at(p)?;
        let dgamma = dual.at(p)?;
        r.duality_reconstruction = r
            .duality_reconstruction
            .max(duality_defect(g, nabla, &dual, p)?.max_abs());
        r.involution = r.involution.max(dual2.at(p)?.max_abs_diff(&gamma));
        let pt = pf.at(p)?;
        let low = lower(&gm, &pt);
        let lcv = lc.at(p)?;
        let nabla_g = metric_derivative(g, nabla, p)?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r.p_symmetry = r.p_symmetry.max((pt[(k, i, j)] - pt[(k, j, i)]).abs());
                    r.p_self_adjoint = r
                        .p_self_adjoint
                        .max((low[(i, j, k)] - low[(i, k, j)]).abs());
                    r.levi_civita_average = r
                        .levi_civita_average
                        .max((0.5 * (gamma[(k, i, j)] + dgamma[(k, i, j)]) - lcv[(k, i, j)]).abs());
                    r.metric_derivative_asymmetry = r
                        .metric_derivative_asymmetry
                        .max((nabla_g[(i, j, k)] - nabla_g[(j, i, k)]).abs());
                    r.koszul = r.koszul.max(koszul_residual(
                        g, nabla, p, &units[i], &units[j], &units[k],
                    )?);
                }
            }
        }
        r.p_tensorial = r.p_tensorial.max(tensorial_defect(&gamma, &dgamma, p));
        r.torsion = r.torsion.max(torsion_at(nabla, p)?.max_abs());
        r.dual_torsion = r.dual_torsion.max(torsion_at(&dual, p)?.max_abs());
        let curv = curvature_at(nabla, p)?;
        r.curvature = r.curvature.max(curv.max_abs());
        r.dual_curvature = r.dual_curvature.max(curvature_at(&dual, p)?.max_abs());
        if let (Some(fd), Some(gap)) = (&fd_nabla, r.fd_curvature_gap.as_mut()) {
            *gap = gap.max(curvature_at(fd, p)?.max_abs_diff(&curv));
        }
    }
    Ok(r)
}

/// A constant connection with torsion on the plane, paired with its dual:
/// exactly one of the four torsion/metric conditions holds.
pub fn torsion_example() -> Result<PropertyReport> {
    let plane = euclidean_metric(ChartBox::new("plane", vec![(-2.0, 2.0); 2])?);
    let twisted = ConnectionField::new(plane.chart().clone(), "twisted", |_| {
        let mut a = Array3::zeros(2);
        a[(0, 0, 1)] = 1.0;
        Ok(a)
    })
    .with_partials(|_| Ok(crate::linalg::Array4::zeros(2)));
    let dual = dual_connection(&plane, &twisted)?;
    let lc = levi_civita(&plane);
    let grid = plane.chart().default_grid();
    let mut r = PropertyReport {
        space: "twisted plane".into(),
        samples: grid.len(),
        tolerance: default_tolerance(&plane, &twisted),
        duality_reconstruction: 0.0,
        involution: 0.0,
        p_symmetry: 0.0,
        p_self_adjoint: 0.0,
        p_tensorial: 0.0,
        koszul: 0.0,
        levi_civita_average: 0.0,
        metric_derivative_asymmetry: 0.0,
        torsion: 0.0,
        dual_torsion: 0.0,
        curvature: 0.0,
        dual_curvature: 0.0,
        fd_curvature_gap: None,
    };
    for p in &grid {
        let gamma = twisted.at(p)?;
        let dg = dual.at(p)?;
        let lcv = lc.at(p)?;
        let ng = metric_derivative(&plane, &twisted, p)?;
        r.torsion = r.torsion.max(torsion_at(&twisted, p)?.max_abs());
        r.dual_torsion = r.dual_torsion.max(torsion_at(&dual, p)?.max_abs());
        r.levi_civita_average = r
            .levi_civita_average
            .max(gamma.zip_with(&dg, |a, b| 0.5 * (a + b)).max_abs_diff(&lcv));
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    r.metric_derivative_asymmetry = r
                        .metric_derivative_asymmetry
                        .max((ng[(i, j, k)] - ng[(j, i, k)]).abs());
                }
            }
        }
    }
    Ok(r)
}
