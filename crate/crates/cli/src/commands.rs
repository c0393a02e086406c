//! The subcommands, each producing a [`Document`] and an outcome.

use std::time::Instant;

use igwp_core::models::{
    cone_fiber_metric, denormalization_geometry, elliptic_metric, mixture_connection,
    simplex_alpha_connection, simplex_fisher, takano_geometry, upper_half_plane_family,
    DenormalizedFamily, EllipticFamily, Generator, MatrixChart, MonotoneSymbol, QuadratureConfig,
    SimplexFamily, TakanoSpace,
};
use igwp_core::tensor::{default_tolerance, dual_connection, flatness_report};
use igwp_core::verify::{
    constant_l_solve, elliptic_constants_table, elliptic_dually_flat_table, line_connection,
    linspace, run_suites, scan_cone_line, scan_takano_line, LinePair, ScanResult, SuiteConfig,
    SCAN_TOL,
};
use igwp_core::warped::{cone_extend, euclidean_metric, ConeExtensionSpec, ConeSign};
use igwp_core::{ChartBox, ConnectionField, GeomError, MetricField};
use serde_json::{json, Value};

use crate::output::{num, nums, opt_num, Cell, Document};

/// Exit-code classes: 1 for failed checks or computations, 2 for bad input.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

fn compute(e: GeomError) -> CliError {
    CliError::Compute(e.to_string())
}

fn config(e: GeomError) -> CliError {
    CliError::Config(e.to_string())
}

/// A rendered result plus the failures that make the exit code 1.
pub struct Outcome {
    pub doc: Document,
    pub failures: Vec<String>,
}

pub fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

pub fn grid_size(name: &str, n: usize) -> Result<usize, CliError> {
    if n >= 2 {
        Ok(n)
    } else {
        Err(CliError::Config(format!(
            "{name} must be at least 2, got {n}"
        )))
    }
}

fn branch_name(b: ConeSign) -> &'static str {
    match b {
        ConeSign::Plus => "plus",
        ConeSign::Minus => "minus",
    }
}

pub fn verify_all(tolerance: Option<f64>, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    if let Some(t) = tolerance {
        positive("--tol", t)?;
    }
    grid_size("--samples", samples)?;
    let cfg = SuiteConfig {
        tolerance,
        samples,
        seed,
    };
    let suites = run_suites(&cfg);
    let mut doc = Document::new(
        "verify_all",
        vec!["suite", "check", "value", "tolerance", "pass"],
    );
    let mut failures = Vec::new();
    let mut suites_json = Vec::new();
    for s in &suites {
        let mut checks = Vec::new();
        for c in &s.checks {
            doc.row(vec![
                s.name.as_str().into(),
                c.name.as_str().into(),
                c.value.into(),
                c.tolerance.into(),
                c.pass.into(),
            ]);
            checks.push(json!({
                "name": c.name,
                "value": num(c.value),
                "tolerance": opt_num(c.tolerance),
                "pass": c.pass,
            }));
            if !c.pass {
                failures.push(match c.tolerance {
                    Some(t) => format!("{} / {}: {:e} > {:e}", s.name, c.name, c.value, t),
                    None => format!("{} / {}", s.name, c.name),
                });
            }
        }
        if let Some(e) = &s.error {
            doc.row(vec![
                s.name.as_str().into(),
                format!("error: {e}").into(),
                Cell::Empty,
                Cell::Empty,
                false.into(),
            ]);
            failures.push(format!("{}: {e}", s.name));
        }
        suites_json.push(json!({
            "name": s.name,
            "pass": s.pass(),
            "error": s.error,
            "checks": checks,
        }));
    }
    let passed = suites.iter().filter(|s| s.pass()).count();
    doc.set(
        "config",
        json!({ "tolerance": opt_num(tolerance), "samples": samples, "seed": seed }),
    );
    doc.set("suites", Value::Array(suites_json));
    doc.set("pass", Value::Bool(failures.is_empty()));
    doc.summary
        .push(format!("{passed} of {} suites passed", suites.len()));
    Ok(Outcome { doc, failures })
}

pub fn parse_models(list: &str, student_k: f64) -> Result<Vec<Generator>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|m| match m {
            "gauss" => Ok(Generator::Gauss),
            "cauchy" => Ok(Generator::Cauchy),
            "student" => Generator::student(student_k).map_err(config),
            other => Err(CliError::Config(format!(
                "unknown model `{other}` (expected gauss, cauchy or student)"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(CliError::Config("--models is empty".into()))
            } else {
                Ok(v)
            }
        })
}

pub fn table_elliptic_constants(models: &[Generator]) -> Result<Outcome, CliError> {
    let rows = elliptic_constants_table(models, QuadratureConfig::default()).map_err(compute)?;
    let mut doc = Document::new(
        "table_elliptic_constants",
        vec![
            "model",
            "a",
            "b",
            "d",
            "a_closed_form",
            "b_closed_form",
            "d_closed_form",
            "discrepancy",
        ],
    );
    let mut out = Vec::new();
    for r in &rows {
        let (q, c) = (&r.quadrature, &r.closed_form);
        doc.row(vec![
            r.model.as_str().into(),
            q.a.into(),
            q.b.into(),
            q.d.into(),
            c.a.into(),
            c.b.into(),
            c.d.into(),
            r.discrepancy.into(),
        ]);
        out.push(json!({
            "model": r.model,
            "quadrature": { "a": num(q.a), "b": num(q.b), "d": num(q.d) },
            "closed_form": { "a": num(c.a), "b": num(c.b), "d": num(c.d) },
            "discrepancy": num(r.discrepancy),
        }));
    }
    let worst = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    doc.set("rows", Value::Array(out));
    doc.set("max_discrepancy", num(worst));
    doc.summary.push(format!("max discrepancy {worst:e}"));
    Ok(Outcome {
        doc,
        failures: Vec::new(),
    })
}

pub fn table_dually_flat(student_k: f64) -> Result<Outcome, CliError> {
    let gens = [
        Generator::Gauss,
        Generator::Cauchy,
        Generator::student(student_k).map_err(config)?,
    ];
    let fams = gens
        .iter()
        .map(|g| EllipticFamily::closed_form(*g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(config)?;
    let rows = elliptic_dually_flat_table(&fams);
    let mut doc = Document::new(
        "table_dually_flat",
        vec![
            "model",
            "b",
            "flat_coefficient",
            "alpha",
            "alpha_coefficient",
            "listed_alpha_coefficient",
        ],
    );
    let mut out = Vec::new();
    for r in &rows {
        doc.row(vec![
            r.model.as_str().into(),
            r.b.into(),
            r.flat_coefficient.into(),
            r.alpha.into(),
            r.alpha_coefficient.into(),
            r.listed_alpha_coefficient.into(),
        ]);
        out.push(json!({
            "model": r.model,
            "b": num(r.b),
            "flat_coefficient": num(r.flat_coefficient),
            "alpha": opt_num(r.alpha),
            "alpha_coefficient": opt_num(r.alpha_coefficient),
            "listed_alpha_coefficient": opt_num(r.listed_alpha_coefficient),
        }));
        if let (Some(got), Some(listed)) = (r.alpha_coefficient, r.listed_alpha_coefficient) {
            if (got - listed).abs() > 1e-12 {
                doc.summary.push(format!(
                    "{}: computed alpha coefficient {got:.12} differs from the listed {listed:.12}",
                    r.model
                ));
            }
        }
    }
    doc.set("rows", Value::Array(out));
    Ok(Outcome {
        doc,
        failures: Vec::new(),
    })
}

/// Grid values nearest to each predicted root inside `[lo, hi]`.
fn predicted(grid: &[f64], roots: &[(f64, ConeSign)]) -> Vec<(f64, ConeSign)> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    roots
        .iter()
        .filter(|(r, _)| (lo..=hi).contains(r))
        .map(|&(r, b)| {
            let nearest = grid
                .iter()
                .copied()
                .min_by(|x, y| (x - r).abs().total_cmp(&(y - r).abs()))
                .expect("non-empty grid");
            (nearest, b)
        })
        .collect()
}

fn scan_document(
    command: &str,
    res: &ScanResult,
    roots: &[(f64, ConeSign)],
    grid: &[f64],
    timing: bool,
) -> Outcome {
    let mut doc = Document::new(
        command,
        vec![
            "c",
            "branch",
            "curvature",
            "dual_curvature",
            "residual",
            "accepted",
        ],
    );
    for p in &res.points {
        doc.row(vec![
            p.value.into(),
            branch_name(p.branch).into(),
            p.curvature.into(),
            p.dual_curvature.into(),
            p.residual().into(),
            (p.residual() < res.tolerance).into(),
        ]);
    }
    let expected = predicted(grid, roots);
    let got = res.accepted_values();
    let pair = |(c, b): &(f64, ConeSign)| json!({ "c": num(*c), "branch": branch_name(*b) });
    doc.set("label", Value::from(res.label.as_str()));
    doc.set("grid", nums(grid));
    doc.set("tolerance", num(res.tolerance));
    doc.set("samples", Value::from(res.samples));
    doc.set(
        "points",
        Value::Array(
            res.points
                .iter()
                .map(|p| {
                    json!({
                        "c": num(p.value),
                        "branch": branch_name(p.branch),
                        "curvature": num(p.curvature),
                        "dual_curvature": num(p.dual_curvature),
                    })
                })
                .collect(),
        ),
    );
    doc.set("accepted", Value::Array(got.iter().map(pair).collect()));
    doc.set(
        "predicted",
        Value::Array(expected.iter().map(pair).collect()),
    );
    doc.set(
        "argmin",
        res.argmin
            .map_or(Value::Null, |p| json!({ "c": num(p.value), "branch": branch_name(p.branch), "residual": num(p.residual()) })),
    );
    doc.set(
        "runtime_secs",
        if timing {
            opt_num(res.runtime_secs)
        } else {
            Value::Null
        },
    );
    let matches = got == expected;
    doc.set("matches_prediction", Value::Bool(matches));
    let list = |v: &[(f64, ConeSign)]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter()
                .map(|(c, b)| format!("c = {} ({})", crate::output::sig(*c, 6), branch_name(*b)))
                .collect::<Vec<_>>()
                .join(", ")
        }
    };
    doc.summary.push(format!("accepted roots: {}", list(&got)));
    let mut failures = Vec::new();
    if !matches {
        let in_grid: Vec<(f64, ConeSign)> = roots
            .iter()
            .copied()
            .filter(|(r, _)| (grid[0]..=grid[grid.len() - 1]).contains(r))
            .collect();
        let mut why = format!(
            "accepted set ({}) differs from the predicted roots {} whose nearest grid values are {} (grid spacing {})",
            list(&got),
            list(&in_grid),
            list(&expected),
            crate::output::sig(grid[1] - grid[0], 6)
        );
        if let Some(p) = res.argmin {
            why.push_str(&format!(
                "; smallest residual {:e} at c = {} ({}) with tolerance {:e}",
                p.residual(),
                crate::output::sig(p.value, 6),
                branch_name(p.branch),
                res.tolerance
            ));
        }
        for (r, _) in roots {
            if !(grid[0]..=grid[grid.len() - 1]).contains(r) {
                why.push_str(&format!("; root c = {r} lies outside the grid"));
            }
        }
        doc.summary.push(why.clone());
        failures.push(why);
    }
    if let Some(t) = res.runtime_secs {
        if timing {
            doc.summary.push(format!("runtime {t:.3} s"));
        }
    }
    Outcome { doc, failures }
}

pub fn scan_cone(c_min: f64, c_max: f64, steps: usize, timing: bool) -> Result<Outcome, CliError> {
    grid_size("--steps", steps)?;
    if !(c_min < c_max) || !c_min.is_finite() || !c_max.is_finite() {
        return Err(CliError::Config(format!(
            "need finite --c-min < --c-max, got {c_min} and {c_max}"
        )));
    }
    let chart = ChartBox::new("plane", vec![(-1.0, 1.0); 2])
        .and_then(|c| c.with_names(&["x", "y"]))
        .map_err(compute)?;
    let g = euclidean_metric(chart.clone());
    let zero = ConnectionField::zero(chart, "zero");
    let grid = linspace(c_min, c_max, steps);
    let start = Instant::now();
    let mut res = scan_cone_line(&g, &zero, &grid, SCAN_TOL).map_err(compute)?;
    res.runtime_secs = Some(start.elapsed().as_secs_f64());
    Ok(scan_document(
        "scan_cone",
        &res,
        &[(-1.0, ConeSign::Minus), (1.0, ConeSign::Plus)],
        &grid,
        timing,
    ))
}

pub fn scan_takano(
    n: usize,
    c_min: f64,
    c_max: f64,
    steps: usize,
    timing: bool,
) -> Result<Outcome, CliError> {
    grid_size("--steps", steps)?;
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    if !(c_min < c_max) || !c_min.is_finite() || !c_max.is_finite() {
        return Err(CliError::Config(format!(
            "need finite --c-min < --c-max, got {c_min} and {c_max}"
        )));
    }
    let grid = linspace(c_min, c_max, steps);
    let start = Instant::now();
    let mut res = scan_takano_line(n, &grid, SCAN_TOL).map_err(compute)?;
    res.runtime_secs = Some(start.elapsed().as_secs_f64());
    Ok(scan_document(
        "scan_takano",
        &res,
        &[(-3.0, ConeSign::Minus), (1.0, ConeSign::Plus)],
        &grid,
        timing,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    Simplex,
    Denorm,
    Takano,
    BkmCone,
    Elliptic,
    ConeExt,
    Uhp,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportParams {
    pub model: Model,
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub generator: Generator,
    pub lambda: f64,
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// `(1+α)/2 D + (1−α)/2 D*`: the α-family through a dually flat pair.
fn alpha_mix(
    g: &MetricField,
    d: &ConnectionField,
    alpha: f64,
) -> Result<ConnectionField, CliError> {
    let dual = dual_connection(g, d).map_err(compute)?;
    d.combine(0.5 * (1.0 + alpha), &dual, 0.5 * (1.0 - alpha))
        .map_err(compute)
}

fn flat_line(fam: &EllipticFamily) -> Result<ConnectionField, CliError> {
    let (k, l) = constant_l_solve(fam.b).map_err(compute)?;
    Ok(line_connection(fam, &LinePair::constant(k, l), 1.0))
}

fn report_geometry(p: &ReportParams) -> Result<(MetricField, ConnectionField, Value), CliError> {
    if !p.alpha.is_finite() {
        return Err(CliError::Config(format!(
            "--alpha must be finite, got {}",
            p.alpha
        )));
    }
    let alpha = num(p.alpha);
    Ok(match p.model {
        Model::Simplex => {
            let fam = SimplexFamily::new(p.m, p.alpha).map_err(config)?;
            (
                simplex_fisher(&fam),
                simplex_alpha_connection(&fam),
                json!({ "alpha": alpha, "m": p.m }),
            )
        }
        Model::Denorm => {
            let fam = DenormalizedFamily::new(p.m, p.alpha).map_err(config)?;
            let (g, c) = denormalization_geometry(&fam);
            (g, c, json!({ "alpha": alpha, "m": p.m }))
        }
        Model::Takano => {
            let space = TakanoSpace::new(p.n, p.alpha).map_err(config)?;
            let (g, c) = takano_geometry(&space);
            (g, c, json!({ "alpha": alpha, "n": p.n }))
        }
        Model::BkmCone => {
            let spec = ConeExtensionSpec {
                fiber_connection: mixture_connection(MatrixChart::Density).map_err(compute)?,
                sign: ConeSign::Plus,
            };
            let (g, d) =
                cone_extend(&spec, &cone_fiber_metric(MonotoneSymbol::Bkm)).map_err(compute)?;
            let c = alpha_mix(&g, &d, p.alpha)?;
            (
                g,
                c,
                json!({ "alpha": alpha, "fiber": "bkm density matrices", "fiber_connection": "mixture" }),
            )
        }
        Model::ConeExt => {
            let chart = ChartBox::new("plane", vec![(-1.0, 1.0); 2]).map_err(compute)?;
            let g_f = euclidean_metric(chart.clone());
            let spec = ConeExtensionSpec {
                fiber_connection: ConnectionField::zero(chart, "zero"),
                sign: ConeSign::Plus,
            };
            let (g, d) = cone_extend(&spec, &g_f).map_err(compute)?;
            let c = alpha_mix(&g, &d, p.alpha)?;
            (g, c, json!({ "alpha": alpha, "fiber": "euclidean plane" }))
        }
        Model::Elliptic => {
            let fam = EllipticFamily::closed_form(p.generator).map_err(config)?;
            let g = elliptic_metric(&fam);
            let c = alpha_mix(&g, &flat_line(&fam)?, p.alpha)?;
            (
                g,
                c,
                json!({ "alpha": alpha, "generator": p.generator.name() }),
            )
        }
        Model::Uhp => {
            let fam = upper_half_plane_family(positive("--lambda", p.lambda)?).map_err(config)?;
            let g = elliptic_metric(&fam);
            let c = alpha_mix(&g, &flat_line(&fam)?, p.alpha)?;
            (g, c, json!({ "alpha": alpha, "lambda": num(p.lambda) }))
        }
    })
}

pub fn report_flatness(p: &ReportParams) -> Result<Outcome, CliError> {
    if let Some(t) = p.tolerance {
        positive("--tol", t)?;
    }
    grid_size("--samples", p.samples)?;
    let (g, c, params) = report_geometry(p)?;
    let tol = p.tolerance.unwrap_or_else(|| default_tolerance(&g, &c));
    let grid = g.chart().grid(p.samples, p.seed);
    let rep = flatness_report(&g, &c, &grid, tol).map_err(compute)?;
    let model = p.model.name();
    let mut doc = Document::new(
        "report_flatness",
        vec!["model", "residual", "value", "tolerance"],
    );
    let residuals = [
        ("curvature", rep.curvature),
        ("dual_curvature", rep.dual_curvature),
        ("torsion", rep.torsion),
        ("dual_torsion", rep.dual_torsion),
        ("duality_identity", rep.duality_identity),
    ];
    let mut res_json = serde_json::Map::new();
    for (name, v) in residuals {
        doc.row(vec![
            model.into(),
            name.into(),
            v.into(),
            rep.tolerance.into(),
        ]);
        res_json.insert(name.into(), num(v));
    }
    doc.set("model", Value::from(model));
    doc.set("params", params);
    doc.set("residuals", Value::Object(res_json));
    doc.set("samples", Value::from(rep.samples));
    doc.set("tolerance", num(rep.tolerance));
    doc.set("pass", Value::Bool(rep.pass));
    doc.summary.push(format!(
        "{model}: {} (max flatness residual {:e}, tolerance {:e})",
        if rep.pass {
            "dually flat"
        } else {
            "not dually flat"
        },
        rep.max_flatness(),
        rep.tolerance
    ));
    let failures = if rep.pass {
        Vec::new()
    } else {
        vec![format!(
            "{model} is not dually flat: max residual {:e} > {:e}",
            rep.max_flatness(),
            rep.tolerance
        )]
    };
    Ok(Outcome { doc, failures })
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Simplex => "simplex",
            Model::Denorm => "denorm",
            Model::Takano => "takano",
            Model::BkmCone => "bkm-cone",
            Model::Elliptic => "elliptic",
            Model::ConeExt => "cone-ext",
            Model::Uhp => "uhp",
        }
    }
}

pub fn generator(name: &str, student_k: f64) -> Result<Generator, CliError> {
    parse_models(name, student_k).and_then(|v| match v.as_slice() {
        [g] => Ok(*g),
        _ => Err(CliError::Config("--generator takes a single model".into())),
    })
}
