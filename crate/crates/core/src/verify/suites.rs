//! The full verification run behind `igwp verify all`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::line::{
    constant_l_solve, line_connection, line_connection_build, line_curvature_closed_form,
    line_curvature_numeric, ode_family_solution, ode_residual, takano_line_pair, LinePair,
};
use super::mismatch::coordinate_mismatch_demo;
use super::properties::{model_zoo, property_report, torsion_example};
use super::scan::{linspace, scan_cone_line, scan_takano_line, SCAN_TOL};
use super::structure::p_structure_check;
use super::tables::{elliptic_constants_table, elliptic_dually_flat_table};
use super::Check;
use crate::chart::DEFAULT_SAMPLES;
use crate::error::Result;
use crate::linalg::{Array3, Matrix};
use crate::models::{
    bkm_cone_geometry, cone_fiber_metric, denormalization_geometry, elliptic_metric,
    elliptic_warped_spec, mixture_connection, monotone_metric_2x2, monotone_metric_field,
    takano_geometry, takano_warped_spec, DenormalizedFamily, EllipticFamily, Generator, Herm2,
    MatrixChart, MonotoneSymbol, QuadratureConfig, TakanoSpace,
};
use crate::tensor::{
    constant_curvature_residual, default_tolerance, flatness_report, levi_civita,
    pullback_connection, pullback_metric, ChartMap, ConnectionField, MapJet,
};
use crate::warped::{
    assumption_check, cone_extend, cone_spec, euclidean_metric, gauss_equation_residual,
    oneill_mixed_residual, second_fundamental_residual, ConeExtensionSpec, ConeSign,
};
use crate::ChartBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Replaces every residual tolerance when set.
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tolerance: None,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub checks: Vec<Check>,
    /// Set when the suite aborted with an error.
    pub error: Option<String>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

type SuiteFn = fn(&SuiteConfig) -> Result<Vec<Check>>;

const SUITES: &[(&str, SuiteFn)] = &[
    ("takano_constant_curvature", takano_curvature),
    ("cone_scan", cone_scan),
    ("takano_scan", takano_scan),
    ("bkm_cone_structure", bkm_structure),
    ("cone_extension", cone_extension),
    ("mixture_flatness", mixture_flatness),
    ("elliptic", elliptic),
    ("denormalization", denormalization),
    ("tensor_properties", tensor_properties),
    ("coordinate_mismatch", coordinate_mismatch),
    ("warped_structure", warped_structure),
];

/// Names of the suites in run order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs every suite; an error inside one suite is recorded, not propagated.
pub fn run_suites(cfg: &SuiteConfig) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|(name, f)| match f(cfg) {
            Ok(checks) => SuiteOutcome {
                name: (*name).to_string(),
                checks: match cfg.tolerance {
                    Some(t) => checks.into_iter().map(|c| c.with_tolerance(t)).collect(),
                    None => checks,
                },
                error: None,
            },
            Err(e) => SuiteOutcome {
                name: (*name).to_string(),
                checks: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn takano_curvature(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for alpha in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let space = TakanoSpace::new(n, alpha)?;
            let (g, c) = takano_geometry(&space);
            let grid = space.chart().grid(cfg.samples, cfg.seed);
            let r = constant_curvature_residual(&g, &c, space.curvature_constant(), &grid)?;
            out.push(Check::at_most(format!("n={n} α={alpha}"), r, 1e-8));
        }
    }
    Ok(out)
}

fn plane() -> Result<crate::tensor::MetricField> {
    Ok(euclidean_metric(ChartBox::new(
        "plane",
        vec![(-2.0, 2.0); 2],
    )?))
}

fn cone_scan(_: &SuiteConfig) -> Result<Vec<Check>> {
    let g_f = plane()?;
    let zero = ConnectionField::zero(g_f.chart().clone(), "zero");
    let values = linspace(-3.0, 3.0, 601);
    let scan = scan_cone_line(&g_f, &zero, &values, SCAN_TOL)?;
    let mut out = vec![Check::flag(
        format!(
            "accepted {:?}",
            scan.accepted_values()
                .iter()
                .map(|v| v.0)
                .collect::<Vec<_>>()
        ),
        scan.accepted.len() == 2,
    )];
    let spacing = 6.0 / 600.0;
    for root in [-1.0, 1.0] {
        let hit = scan
            .accepted
            .iter()
            .any(|p| (p.value - root).abs() <= 0.5 * spacing);
        out.push(Check::flag(format!("root {root} accepted"), hit));
        let (g, d) =
            crate::warped::cone_candidate(&g_f, &zero, root, super::scan::branch_of(root))?;
        let rep = flatness_report(&g, &d, &cone_spec(&g_f)?.chart().default_grid(), SCAN_TOL)?;
        out.push(Check::at_most(
            format!("flatness at {root}"),
            rep.max_flatness(),
            SCAN_TOL,
        ));
    }
    out.push(Check::flag(
        "|R| small iff |R*| small",
        scan.curvatures_agree(),
    ));
    let far = scan
        .points
        .iter()
        .filter(|p| {
            scan.accepted
                .iter()
                .all(|a| (a.value - p.value).abs() > 0.05)
        })
        .map(|p| p.residual())
        .fold(f64::INFINITY, f64::min);
    out.push(Check::flag(
        format!("residual away from roots ≥ 10·tol (min {far:e})"),
        far > 10.0 * SCAN_TOL,
    ));
    Ok(out)
}

fn takano_scan(_: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let values = linspace(-4.0, 2.0, 601);
    for n in [1, 2] {
        let scan = scan_takano_line(n, &values, SCAN_TOL)?;
        let acc = scan.accepted_values();
        let ok = acc.len() == 2
            && acc
                .iter()
                .any(|&(c, b)| (c - 1.0).abs() < 1e-9 && b == ConeSign::Plus)
            && acc
                .iter()
                .any(|&(c, b)| (c + 3.0).abs() < 1e-9 && b == ConeSign::Minus);
        out.push(Check::flag(format!("n={n} accepted {{(1,+), (−3,−)}}"), ok));
        out.push(Check::flag(
            format!("n={n} |R| small iff |R*| small"),
            scan.curvatures_agree(),
        ));
        for (alpha, expected) in [(1.0, -3.0), (-1.0, 1.0)] {
            let space = TakanoSpace::new(n, alpha)?;
            let (_, c) = takano_geometry(&space);
            let sigma = 1.3;
            let mut p = vec![0.0; n + 1];
            p[0] = sigma;
            let coeff = c.at(&p)?[(0, 0, 0)] * sigma;
            out.push(Check::close(
                format!("n={n} α={alpha} line coefficient"),
                coeff,
                expected,
                1e-12,
            ));
            out.push(Check::close(
                format!("n={n} α={alpha} −(1+2α)"),
                space.line_coefficient(),
                expected,
                0.0,
            ));
        }
    }
    Ok(out)
}

fn bkm_structure(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cone = bkm_cone_geometry(MonotoneSymbol::Bkm)?;
    let chart = MatrixChart::ConeWarped.chart();
    let grid = chart.grid(cfg.samples, cfg.seed);
    let mut unit: f64 = 0.0;
    let mut scaling: f64 = 0.0;
    for p in &grid {
        let g = cone.warped_metric.at(p)?;
        unit = unit.max((g[(0, 0)] - 1.0).abs());
        for t in [0.5, 1.0, 3.0] {
            let mut q = p.clone();
            q[0] = t;
            let gt = cone.warped_metric.at(&q)?;
            q[0] = 1.0;
            let g1 = cone.warped_metric.at(&q)?;
            for i in 1..4 {
                for j in 1..4 {
                    let scale = g1[(i, j)].abs().max(1e-300);
                    scaling = scaling
                        .max((gt[(i, j)] - t * t * g1[(i, j)]).abs() / scale.max(g1.max_abs()));
                }
            }
        }
    }
    out.push(Check::at_most("G(∂t, ∂t) = 1", unit, 1e-10));
    out.push(Check::at_most("fiber block scales as t²", scaling, 1e-10));
    let rhos = [
        Herm2::new(0.6, 0.1, 0.1, 0.4),
        Herm2::new(0.3, -0.05, -0.05, 0.7),
    ];
    let xs = [
        Herm2::new(1.0, 0.2, 0.2, -0.5),
        Herm2::new(0.0, 1.0, 1.0, 0.0),
    ];
    for symbol in [MonotoneSymbol::Bkm, MonotoneSymbol::Sld] {
        let mut worst: f64 = 0.0;
        for k in [0.5, 2.0, 10.0] {
            for rho in rhos {
                for x in xs {
                    let lhs = monotone_metric_2x2(symbol, rho.scale(k), x.scale(k), x.scale(k))?;
                    let rhs = k * monotone_metric_2x2(symbol, rho, x, x)?;
                    worst = worst.max((lhs - rhs).abs() / rhs.abs());
                }
            }
        }
        out.push(Check::at_most(
            format!("{symbol:?} homogeneity"),
            worst,
            1e-10,
        ));
    }
    Ok(out)
}

fn cone_extension(_: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let flat = plane()?;
    let fibers = [
        (
            "euclidean fiber",
            flat.clone(),
            ConnectionField::zero(flat.chart().clone(), "zero"),
        ),
        (
            "density fiber",
            cone_fiber_metric(MonotoneSymbol::Bkm),
            mixture_connection(MatrixChart::Density)?,
        ),
    ];
    for (name, g_f, nabla) in fibers {
        for sign in [ConeSign::Plus, ConeSign::Minus] {
            let (g, d) = cone_extend(
                &ConeExtensionSpec {
                    fiber_connection: nabla.clone(),
                    sign,
                },
                &g_f,
            )?;
            let rep = flatness_report(&g, &d, &g.chart().default_grid(), 1e-6)?;
            out.push(Check::at_most(
                format!("{name} {sign:?} flatness"),
                rep.max_flatness(),
                1e-6,
            ));
        }
    }
    Ok(out)
}

fn mixture_flatness(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for chart in [MatrixChart::Entries, MatrixChart::Density] {
        let g = monotone_metric_field(MonotoneSymbol::Bkm, chart);
        let m = mixture_connection(chart)?;
        let rep = flatness_report(&g, &m, &chart.chart().grid(cfg.samples, cfg.seed), 1e-6)?;
        out.push(Check::at_most(
            format!("{chart:?} max(|R|,|R*|,|T|,|T*|)"),
            rep.max_flatness(),
            1e-6,
        ));
    }
    Ok(out)
}

fn elliptic_generators() -> Result<Vec<Generator>> {
    Ok(vec![
        Generator::Gauss,
        Generator::Cauchy,
        Generator::student(3.0)?,
        Generator::student(5.0)?,
        Generator::student(10.0)?,
    ])
}

fn elliptic(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let gens = elliptic_generators()?;
    for row in elliptic_constants_table(&gens, QuadratureConfig::default())? {
        out.push(Check::at_most(
            format!("{} constants", row.model),
            row.discrepancy,
            1e-8,
        ));
    }
    let fams: Vec<EllipticFamily> = gens
        .iter()
        .map(|g| EllipticFamily::closed_form(*g))
        .collect::<Result<_>>()?;
    let ts = linspace(0.5, 2.0, 16);
    for fam in &fams {
        let name = fam.generator.map(|g| g.name()).unwrap_or_default();
        let (k, l) = constant_l_solve(fam.b)?;
        let res = ode_residual(&LinePair::constant(k, l), fam.b, &ts)?;
        out.push(Check::at_most(
            format!("{name} constant solution ODE"),
            res.max_abs(),
            1e-12,
        ));
    }
    for row in elliptic_dually_flat_table(&fams) {
        match row.alpha_coefficient {
            Some(c) => out.push(Check::close(
                format!(
                    "{} α-coefficient at α={:?} equals 2/√(4b−1)",
                    row.model, row.alpha
                ),
                c,
                row.flat_coefficient,
                1e-12,
            )),
            None => out.push(Check::flag(
                format!("{} has no dually flat α", row.model),
                row.alpha.is_none(),
            )),
        }
    }
    let cauchy = EllipticFamily::closed_form(Generator::Cauchy)?;
    let worst = linspace(-3.0, 3.0, 61)
        .into_iter()
        .map(|a| cauchy.alpha_line_coefficient(a).unwrap_or(f64::NAN).abs())
        .fold(0.0, f64::max);
    out.push(Check::at_most("cauchy α-coefficient ≡ 0", worst, 1e-15));
    for fam in [&fams[0], &fams[1]] {
        let name = fam.generator.map(|g| g.name()).unwrap_or_default();
        let g = elliptic_metric(fam);
        let grid = fam.chart().grid(cfg.samples, cfg.seed);
        let (k, l) = constant_l_solve(fam.b)?;
        for gamma in [0.0, 1.0, -2.0] {
            let d = line_connection_build(fam, &LinePair::constant(k, l), gamma)?;
            let rep = flatness_report(&g, &d, &grid, 1e-8)?;
            out.push(Check::at_most(
                format!("{name} γ={gamma} flatness"),
                rep.max_flatness(),
                1e-8,
            ));
        }
        let moving = ode_family_solution(fam.b, 0.3)?;
        let d = line_connection_build(fam, &moving, 0.5)?;
        let rep = flatness_report(&g, &d, &grid, 1e-8)?;
        out.push(Check::at_most(
            format!("{name} non-constant solution flatness"),
            rep.max_flatness(),
            1e-8,
        ));
        let probe = LinePair::new(|t| 0.7 + 0.1 * t, |t| 0.3 - 0.2 * t * t);
        let d = line_connection(fam, &probe, 0.4);
        let mut gap: f64 = 0.0;
        for p in &grid {
            let (r, rs) = line_curvature_numeric(fam, &d, p)?;
            let (cr, crs) = line_curvature_closed_form(fam, &probe, p[0]);
            gap = gap.max((r - cr).abs()).max((rs - crs).abs());
        }
        out.push(Check::at_most(
            format!("{name} curvature closed form"),
            gap,
            1e-8,
        ));
    }
    for n in [1, 2] {
        let pair = takano_line_pair(n)?;
        let (k, l) = constant_l_solve((2.0 * n as f64 + 1.0) / 4.0)?;
        out.push(Check::close(
            format!("takano n={n} k in t"),
            pair.k,
            k,
            1e-8,
        ));
        out.push(Check::close(
            format!("takano n={n} l in t"),
            pair.l,
            l,
            1e-8,
        ));
        out.push(Check::at_most(
            format!("takano n={n} (k, l) constant"),
            pair.spread,
            1e-8,
        ));
    }
    Ok(out)
}

/// `(t, ξ) ↦ (t²/4, ξ)`.
pub(crate) fn tau_map(fam: &DenormalizedFamily) -> ChartMap {
    let n = fam.dim();
    ChartMap::new(fam.t_chart(), move |u| {
        let t = u[0];
        let mut value = u.to_vec();
        value[0] = t * t / 4.0;
        let mut jacobian = Matrix::identity(n);
        jacobian[(0, 0)] = t / 2.0;
        let mut hessian = Array3::zeros(n);
        hessian[(0, 0, 0)] = 0.5;
        Ok(MapJet {
            value,
            jacobian,
            hessian,
        })
    })
}

fn denormalization(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for m in [2, 3] {
        for alpha in [1.0, -1.0] {
            let fam = DenormalizedFamily::new(m, alpha)?;
            let (g, c) = denormalization_geometry(&fam);
            let grid = fam.chart().grid(cfg.samples, cfg.seed);
            let rep = flatness_report(&g, &c, &grid, default_tolerance(&g, &c))?;
            out.push(Check::at_most(
                format!("m={m} α={alpha} flatness"),
                rep.max_flatness().max(rep.duality_identity),
                rep.tolerance,
            ));
            let map = tau_map(&fam);
            let gt = pullback_metric(&g, &map)?;
            let ct = pullback_connection(&c, &map, "denormalized in t")?;
            let mut unit: f64 = 0.0;
            let mut line: f64 = 0.0;
            for p in &fam.t_chart().grid(cfg.samples, cfg.seed) {
                unit = unit.max((gt.at(p)?[(0, 0)] - 1.0).abs());
                line = line.max((ct.at(p)?[(0, 0, 0)] * p[0] + alpha).abs());
            }
            out.push(Check::at_most(
                format!("m={m} α={alpha} G(∂t,∂t) = 1"),
                unit,
                1e-10,
            ));
            out.push(Check::at_most(
                format!("m={m} α={alpha} line coefficient −α/t"),
                line,
                1e-8,
            ));
        }
    }
    Ok(out)
}

fn tensor_properties(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for e in model_zoo()? {
        let grid = e
            .metric
            .chart()
            .grid(cfg.samples.max(DEFAULT_SAMPLES), cfg.seed);
        out.extend(property_report(&e, &grid)?.checks());
    }
    let twisted = torsion_example()?;
    out.push(Check::flag(
        "twisted plane: exactly one torsion/metric condition holds",
        twisted.condition_count() == 1,
    ));
    Ok(out)
}

fn coordinate_mismatch(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let rep = coordinate_mismatch_demo(cfg.samples, cfg.seed)?;
    Ok(vec![
        Check::at_most("∇̄_∂α ∂t = ∂a − ∂d", rep.nabla_bar_error, 1e-8),
        Check::flag("∇̄_∂α ∂t ≠ 0", rep.nabla_bar_size > 0.1),
        Check::at_most("D̄_∂α ∂t = 0", rep.d_bar_component, 0.0),
        Check::at_most(
            "∇̄ flat",
            rep.nabla_bar_flatness.max_flatness(),
            rep.nabla_bar_flatness.tolerance,
        ),
        Check::at_most(
            "D̄ flat",
            rep.d_bar_flatness.curvature.max(rep.d_bar_flatness.torsion),
            rep.d_bar_flatness.tolerance,
        ),
        Check::at_most(
            "D̄* curvature",
            rep.d_bar_flatness.dual_curvature,
            rep.d_bar_flatness.tolerance,
        ),
        Check::flag(
            "D̄* has torsion, so (G, D̄) is not dually flat",
            rep.d_bar_flatness.dual_torsion > 1e-3,
        ),
    ])
}

fn warped_structure(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tol = 1e-9;
    for n in [1, 2] {
        let spec = takano_warped_spec(n)?;
        let g = crate::warped::warped_metric(&spec)?;
        let (g_t, _) = takano_geometry(&TakanoSpace::new(n, 0.0)?);
        let grid = spec.chart().grid(cfg.samples, cfg.seed);
        let mut gap: f64 = 0.0;
        for p in &grid {
            gap = gap.max(g.at(p)?.max_abs_diff(&g_t.at(p)?));
        }
        out.push(Check::at_most(
            format!("takano n={n} as doubly warped"),
            gap,
            1e-12,
        ));
        for (alpha, branch) in [(1.0, -1), (-1.0, 1)] {
            let (_, d) = takano_geometry(&TakanoSpace::new(n, alpha)?);
            let name = format!("takano n={n} α={alpha}");
            out.push(Check::at_most(
                format!("{name} mixed"),
                oneill_mixed_residual(&spec, &d, &grid)?,
                tol,
            ));
            out.push(Check::at_most(
                format!("{name} second fundamental form"),
                second_fundamental_residual(&spec, &d, &grid)?,
                tol,
            ));
            let rep = p_structure_check(&spec, &d, &grid)?;
            out.push(Check::at_most(
                format!("{name} P identities"),
                rep.max_residual(),
                tol,
            ));
            out.push(Check::flag(
                format!("{name} branch {branch}"),
                rep.branch() == Some(branch),
            ));
        }
    }
    let flat = plane()?;
    let spec = cone_spec(&flat)?;
    let grid = spec.chart().grid(cfg.samples, cfg.seed);
    let zero = ConnectionField::zero(flat.chart().clone(), "zero");
    for (sign, branch) in [(ConeSign::Plus, 1), (ConeSign::Minus, -1)] {
        let (_, d) = cone_extend(
            &ConeExtensionSpec {
                fiber_connection: zero.clone(),
                sign,
            },
            &flat,
        )?;
        let name = format!("cone {sign:?}");
        out.push(Check::at_most(
            format!("{name} mixed"),
            oneill_mixed_residual(&spec, &d, &grid)?,
            tol,
        ));
        out.push(Check::at_most(
            format!("{name} second fundamental form"),
            second_fundamental_residual(&spec, &d, &grid)?,
            tol,
        ));
        out.push(Check::at_most(
            format!("{name} gauss equation"),
            gauss_equation_residual(&spec, &d, &zero, &grid)?,
            tol,
        ));
        let rep = p_structure_check(&spec, &d, &grid)?;
        out.push(Check::at_most(
            format!("{name} P identities"),
            rep.max_residual(),
            tol,
        ));
        out.push(Check::flag(
            format!("{name} branch {branch}"),
            rep.branch() == Some(branch),
        ));
    }
    let lc = levi_civita(&crate::warped::warped_metric(&spec)?);
    out.push(Check::at_most(
        "cone levi-civita mixed",
        oneill_mixed_residual(&spec, &lc, &grid)?,
        tol,
    ));
    let fam = DenormalizedFamily::new(3, -1.0)?;
    let (_, c) = denormalization_geometry(&fam);
    let ct = pullback_connection(&c, &tau_map(&fam), "denormalized in t")?;
    let fiber = crate::models::simplex_fisher(&fam.simplex);
    let fiber = crate::tensor::MetricField::new(fiber.chart().clone(), {
        let f = fiber.clone();
        move |p| Ok(f.at(p)?.scale(0.25))
    });
    let dspec = cone_spec(&fiber)?;
    let rep = p_structure_check(&dspec, &ct, &fam.t_chart().grid(cfg.samples, cfg.seed))?;
    out.push(Check::flag(
        "denormalized α=−1 branch +1",
        rep.branch() == Some(1),
    ));
    let ell = EllipticFamily::closed_form(Generator::Gauss)?;
    let espec = elliptic_warped_spec(&ell)?;
    let (k, l) = constant_l_solve(ell.b)?;
    let d = line_connection(&ell, &LinePair::constant(k, l), 1.0);
    let egrid = ell.chart().grid(cfg.samples, cfg.seed);
    let arep = assumption_check(&espec, &d, &egrid)?;
    out.push(Check::flag(
        "elliptic flat line satisfies horizontality",
        arep.pass,
    ));
    Ok(out)
}
