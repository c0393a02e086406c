use igwp_core::models::{
    denormalization_geometry, simplex_fisher, takano_geometry, takano_warped_spec,
    DenormalizedFamily, EllipticFamily, Generator, TakanoSpace,
};
use igwp_core::tensor::flatness_report;
use igwp_core::verify::{
    constant_l_solve, constant_solutions, coordinate_mismatch_demo, elliptic_dually_flat_table,
    line_connection, line_connection_build, line_curvature_closed_form, line_curvature_numeric,
    linspace, ode_family_solution, ode_residual, p_structure_check, scan_cone_line,
    scan_takano_line, takano_candidate, takano_line_pair, LinePair, SCAN_TOL,
};
use igwp_core::warped::{
    cone_extend, cone_spec, euclidean_metric, ConeExtensionSpec, ConeSign, Warp, WarpedSpec,
};
use igwp_core::{Array3, Array4, ChartBox, ConnectionField, Matrix, MetricField};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn plane() -> (MetricField, ConnectionField) {
    let chart = ChartBox::new("plane", vec![(-1.0, 1.0); 2])
        .unwrap()
        .with_names(&["x", "y"])
        .unwrap();
    (
        euclidean_metric(chart.clone()),
        ConnectionField::zero(chart, "flat"),
    )
}

#[test]
fn cone_scan_three_values() {
    let (g, c) = plane();
    let res = scan_cone_line(&g, &c, &[-1.0, 0.0, 1.0], SCAN_TOL).unwrap();
    assert_eq!(
        res.accepted_values(),
        vec![(-1.0, ConeSign::Minus), (1.0, ConeSign::Plus)]
    );
    assert!(res.points[1].residual() > 1e-2);
    assert!(res.curvatures_agree());
}

#[test]
fn cone_scan_soundness_on_a_fine_grid() {
    let (g, c) = plane();
    let grid = linspace(-3.0, 3.0, 121);
    let res = scan_cone_line(&g, &c, &grid, SCAN_TOL).unwrap();
    let roots: Vec<f64> = res.accepted.iter().map(|p| p.value).collect();
    assert_eq!(roots.len(), 2, "{roots:?}");
    assert!((roots[0] + 1.0).abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
    for p in &res.points {
        if roots.iter().all(|r| (p.value - r).abs() > 0.05) {
            assert!(p.residual() > 10.0 * SCAN_TOL, "{p:?}");
        }
    }
    assert!(res.curvatures_agree());
    let cone_grid = cone_spec(&g).unwrap().chart().default_grid();
    for (value, sign) in res.accepted_values() {
        let (gm, d) = igwp_core::warped::cone_candidate(&g, &c, value, sign).unwrap();
        let rep = flatness_report(&gm, &d, &cone_grid, 1e-8).unwrap();
        assert!(rep.pass, "{value}: {rep:?}");
    }
}

#[test]
fn cone_scan_rejects_a_curved_fiber() {
    let (g, c) = takano_geometry(&TakanoSpace::new(1, 0.0).unwrap());
    assert!(scan_cone_line(&g, &c, &[-1.0, 1.0], SCAN_TOL).is_err());
    let (g, c) = plane();
    assert!(scan_cone_line(&g, &c, &[], SCAN_TOL).is_err());
    assert!(scan_cone_line(&g, &c, &[f64::NAN], SCAN_TOL).is_err());
}

#[test]
fn takano_scan() {
    for n in [1, 2] {
        let res = scan_takano_line(n, &[-3.0, -1.0, 0.0, 1.0], SCAN_TOL).unwrap();
        assert_eq!(
            res.accepted_values(),
            vec![(-3.0, ConeSign::Minus), (1.0, ConeSign::Plus)],
            "n={n}"
        );
        for p in res.points.iter().filter(|p| p.value == 0.0) {
            assert!(p.residual() > 1e-2);
        }
        assert!(res.curvatures_agree());
    }
}

#[test]
fn takano_alpha_line_coefficients() {
    for (alpha, c) in [(1.0, -3.0), (-1.0, 1.0)] {
        let space = TakanoSpace::new(2, alpha).unwrap();
        assert_eq!(space.line_coefficient(), c);
        let (_, d) = takano_geometry(&space);
        let gamma = d.at(&[1.5, 0.1, 0.2]).unwrap();
        assert!((gamma[(0, 0, 0)] - c / 1.5).abs() < 1e-15);
        // The accepted candidate with the same line coefficient is this connection.
        let branch = if c < 0.0 {
            ConeSign::Minus
        } else {
            ConeSign::Plus
        };
        let (_, cand) = takano_candidate(2, c, branch).unwrap();
        assert!(cand.at(&[1.5, 0.1, 0.2]).unwrap().max_abs_diff(&gamma) < 1e-15);
    }
}

#[test]
fn p_structure_branches() {
    let (g_f, zero) = plane();
    let (_, d) = cone_extend(
        &ConeExtensionSpec {
            fiber_connection: zero,
            sign: ConeSign::Plus,
        },
        &g_f,
    )
    .unwrap();
    let spec = cone_spec(&g_f).unwrap();
    let rep = p_structure_check(&spec, &d, &spec.chart().default_grid()).unwrap();
    assert_eq!(rep.branch(), Some(1));
    assert!(rep.off_diagonal <= 1e-9);
    assert!(rep.max_residual() <= 1e-9, "{rep:?}");

    let spec = takano_warped_spec(2).unwrap();
    for (alpha, branch) in [(1.0, -1), (-1.0, 1)] {
        let (_, d) = takano_geometry(&TakanoSpace::new(2, alpha).unwrap());
        let rep = p_structure_check(&spec, &d, &spec.chart().default_grid()).unwrap();
        assert_eq!(rep.branch(), Some(branch), "α={alpha}");
        assert!(rep.max_residual() <= 1e-9, "{rep:?}");
    }

    let tau = ChartBox::new("tau", vec![(0.0, f64::INFINITY)])
        .unwrap()
        .with_names(&["tau"])
        .unwrap()
        .with_window(vec![(1.0 / 16.0, 1.0)])
        .unwrap();
    let base = MetricField::new(tau, |p| Ok(Matrix::from_diag(&[1.0 / p[0]])))
        .with_partials(|p| Ok(Array3::from_fn(1, |_, _, _| -1.0 / (p[0] * p[0]))))
        .with_second_partials(|p| Ok(Array4::from_fn(1, |_, _, _, _| 2.0 / (p[0] * p[0] * p[0]))));
    let fam = DenormalizedFamily::new(3, -1.0).unwrap();
    let spec = WarpedSpec::singly(
        base,
        simplex_fisher(&fam.simplex),
        Warp::power_line(1.0, 0.5),
    )
    .unwrap();
    let (_, d) = denormalization_geometry(&fam);
    let rep = p_structure_check(&spec, &d, &fam.chart().default_grid()).unwrap();
    assert_eq!(rep.branch(), Some(1));
    assert!(rep.max_residual() <= 1e-8, "{rep:?}");
}

#[test]
fn ode_examples() {
    let ts = linspace(0.5, 2.0, 16);
    for b in [0.75, 0.375, 9.0 / 16.0, 2.0] {
        for (k, l) in constant_solutions(b).unwrap() {
            assert!(
                ode_residual(&LinePair::constant(k, l), b, &ts)
                    .unwrap()
                    .max_abs()
                    < 1e-15
            );
        }
    }
    assert!(
        ode_residual(&LinePair::constant(SQRT2, 1.0 / SQRT2), 0.75, &ts)
            .unwrap()
            .max_abs()
            < 1e-15
    );
    for b in [0.75, 0.375, 1.5] {
        let r = ode_residual(&LinePair::constant(0.0, 0.0), b, &ts).unwrap();
        assert!((r.algebraic + 1.0 / (4.0 * b - 1.0)).abs() < 1e-14);
    }
    assert!(ode_residual(&LinePair::constant(1.0, 1.0), 0.25, &ts).is_err());
}

#[test]
fn constant_l_solutions() {
    let cases = [
        (0.75, SQRT2, 1.0 / SQRT2),
        (0.375, 2.0 * SQRT2, SQRT2),
        (9.0 / 16.0, 4.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()),
    ];
    for (b, k, l) in cases {
        let (gk, gl) = constant_l_solve(b).unwrap();
        assert!((gk - k).abs() < 1e-15 && (gl - l).abs() < 1e-15, "b={b}");
    }
    // Student k = 5 matches √(2(k+3)/k).
    assert!((constant_l_solve(9.0 / 16.0).unwrap().0 - (16.0f64 / 5.0).sqrt()).abs() < 1e-15);
    // No other constant root on a grid of (k, l) pairs.
    let b = 0.75;
    let s = (4.0 * b - 1.0f64).sqrt();
    let axis = linspace(-3.0, 3.0, 241);
    for &k in &axis {
        for &l in &axis {
            let r = ode_residual(&LinePair::constant(k, l), b, &[1.0])
                .unwrap()
                .max_abs();
            if r < 1e-9 {
                assert!(
                    ((k - 2.0 / s).abs() < 1e-12 && (l - 1.0 / s).abs() < 1e-12)
                        || ((k + 2.0 / s).abs() < 1e-12 && (l + 1.0 / s).abs() < 1e-12),
                    "({k}, {l})"
                );
            }
        }
    }
}

#[test]
fn non_constant_solutions_satisfy_the_ode() {
    let ts = linspace(-1.0, 2.0, 31);
    for c in [0.0, 0.1, 2.0] {
        let pair = ode_family_solution(0.75, c).unwrap();
        assert!(
            ode_residual(&pair, 0.75, &ts).unwrap().max_abs() < 1e-12,
            "C={c}"
        );
    }
    assert!(ode_family_solution(0.75, -1.0).is_err());
}

#[test]
fn line_connection_is_flat_for_solutions() {
    let gauss = EllipticFamily::closed_form(Generator::Gauss).unwrap();
    let cauchy = EllipticFamily::closed_form(Generator::Cauchy).unwrap();
    let cases = [(gauss, 0.0), (gauss, 1.0), (cauchy, 1.0), (cauchy, -2.0)];
    for (fam, gamma) in cases {
        let (k, l) = constant_l_solve(fam.b).unwrap();
        let d = line_connection_build(&fam, &LinePair::constant(k, l), gamma).unwrap();
        let g = igwp_core::models::elliptic_metric(&fam);
        let rep = flatness_report(&g, &d, &fam.chart().default_grid(), 1e-8).unwrap();
        assert!(rep.pass, "{fam:?} γ={gamma}: {rep:?}");
    }
    // The flat Cauchy line is not any α-connection: those have zero line coefficient.
    let (k, _) = constant_l_solve(cauchy.b).unwrap();
    assert!((k - 2.0 * SQRT2).abs() < 1e-15);
    for alpha in linspace(-5.0, 5.0, 21) {
        assert_eq!(cauchy.alpha_line_coefficient(alpha).unwrap(), 0.0);
    }
    let pair = ode_family_solution(gauss.b, 0.3).unwrap();
    let d = line_connection_build(&gauss, &pair, 0.5).unwrap();
    let g = igwp_core::models::elliptic_metric(&gauss);
    assert!(
        flatness_report(&g, &d, &gauss.chart().default_grid(), 1e-6)
            .unwrap()
            .pass
    );
}

#[test]
fn line_connection_gate() {
    let fam = EllipticFamily::closed_form(Generator::Gauss).unwrap();
    assert!(line_connection_build(&fam, &LinePair::constant(0.0, 0.0), 0.0).is_err());
}

#[test]
fn line_curvature_closed_form_matches_the_tensor() {
    let fam = EllipticFamily::closed_form(Generator::Student { k: 4.0 }).unwrap();
    let pairs = [
        LinePair::constant(0.3, -0.7),
        LinePair::new(|t| 1.0 + 0.5 * t * t, |t| (0.4 * t).sin()),
        ode_family_solution(fam.b, 0.5).unwrap(),
    ];
    for pair in &pairs {
        let d = line_connection(&fam, pair, 0.7);
        for p in &fam.chart().default_grid() {
            let (r, rs) = line_curvature_closed_form(&fam, pair, p[0]);
            let (nr, nrs) = line_curvature_numeric(&fam, &d, p).unwrap();
            assert!(
                (r - nr).abs() < 1e-8 && (rs - nrs).abs() < 1e-8,
                "{p:?}: {r} {nr} {rs} {nrs}"
            );
        }
    }
}

#[test]
fn takano_in_the_line_chart() {
    let pair = takano_line_pair(1).unwrap();
    let (k, l) = constant_l_solve(0.75).unwrap();
    assert!(
        (pair.k - k).abs() < 1e-8 && (pair.l - l).abs() < 1e-8,
        "{pair:?}"
    );
    assert!(pair.spread < 1e-8);
}

#[test]
fn dually_flat_table_rows() {
    let fams = [
        EllipticFamily::closed_form(Generator::Gauss).unwrap(),
        EllipticFamily::closed_form(Generator::Cauchy).unwrap(),
        EllipticFamily::closed_form(Generator::Student { k: 5.0 }).unwrap(),
    ];
    let rows = elliptic_dually_flat_table(&fams);
    assert!((rows[0].flat_coefficient - SQRT2).abs() < 1e-12);
    assert_eq!(rows[0].alpha, Some(1.0));
    assert!((rows[0].alpha_coefficient.unwrap() - SQRT2).abs() < 1e-12);
    assert!((rows[1].flat_coefficient - 2.0 * SQRT2).abs() < 1e-12);
    assert_eq!(rows[1].alpha, None);
    assert_eq!(rows[1].alpha_coefficient, None);
    let student = &rows[2];
    assert!((student.flat_coefficient - 4.0 / 5f64.sqrt()).abs() < 1e-12);
    assert_eq!(student.alpha, Some(2.5));
    // The flat α-connection coincides with the flat constant solution.
    assert!((student.alpha_coefficient.unwrap() - student.flat_coefficient).abs() < 1e-12);
    assert!((student.listed_alpha_coefficient.unwrap() - 5.0 * SQRT2 / 8.0).abs() < 1e-15);
}

#[test]
fn coordinate_mismatch() {
    let rep = coordinate_mismatch_demo(64, 0).unwrap();
    assert_eq!(rep.points[0], vec![2.0, 0.5, 0.0, 0.0]);
    assert!(rep.nabla_bar_error <= 1e-8);
    assert!(rep.nabla_bar_size > 0.1);
    assert_eq!(rep.d_bar_component, 0.0);
    let nb = &rep.nabla_bar_flatness;
    assert!(nb.max_flatness() <= nb.tolerance, "{nb:?}");
    let db = &rep.d_bar_flatness;
    assert_eq!(db.curvature, 0.0);
    assert_eq!(db.torsion, 0.0);
    assert!(db.dual_curvature <= db.tolerance);
    // The BKM metric is not a Hessian metric in the linear cone chart, so the
    // dual of D̄ carries torsion.
    assert!(db.dual_torsion > 1e-3, "{db:?}");
}
