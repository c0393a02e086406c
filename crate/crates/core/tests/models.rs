use igwp_core::models::monotone::{Herm2, DENSITY_BASIS};
use igwp_core::models::{
    bkm_cone_geometry, denormalization_geometry, elliptic_constants, elliptic_fisher_sigma,
    elliptic_metric, mixture_connection, mixture_connection_action, monotone_metric_2x2,
    monotone_metric_field, simplex_alpha_connection, simplex_fisher, takano_geometry,
    upper_half_plane_metric, DenormalizedFamily, EllipticConstants, EllipticFamily, FieldJet,
    Generator, MatrixChart, MonotoneSymbol, QuadratureConfig, SimplexFamily, TakanoSpace,
};
use igwp_core::tensor::{
    constant_curvature_residual, curvature_at, dual_connection, flatness_report, levi_civita,
    lower, metric_derivative, pullback_connection, pullback_metric, ChartMap, MapJet,
};
use igwp_core::warped::assumption_check;
use igwp_core::{Array3, Matrix};
use proptest::prelude::*;

#[test]
fn simplex_fisher_two_atoms() {
    for alpha in [-1.0, 0.0, 0.6] {
        let g = simplex_fisher(&SimplexFamily::new(2, alpha).unwrap());
        assert!((g.at(&[0.5]).unwrap()[(0, 0)] - 4.0).abs() < 1e-12);
        for p in [0.15, 0.3, 0.42] {
            assert!((g.at(&[p]).unwrap()[(0, 0)] - 1.0 / (p * (1.0 - p))).abs() < 1e-10);
        }
    }
}

#[test]
fn simplex_fisher_is_alpha_independent() {
    for m in [3, 4] {
        let reference = simplex_fisher(&SimplexFamily::new(m, 0.0).unwrap());
        for alpha in [-1.0, 0.5, 0.7, 1.0] {
            let g = simplex_fisher(&SimplexFamily::new(m, alpha).unwrap());
            for p in &g.chart().default_grid() {
                assert!(g.at(p).unwrap().max_abs_diff(&reference.at(p).unwrap()) < 1e-10);
            }
        }
    }
}

#[test]
fn simplex_flat_exactly_at_plus_minus_one() {
    for m in [2, 3, 4] {
        for alpha in [1.0, -1.0] {
            let fam = SimplexFamily::new(m, alpha).unwrap();
            let (g, c) = (simplex_fisher(&fam), simplex_alpha_connection(&fam));
            let rep = flatness_report(&g, &c, &fam.chart().default_grid(), 1e-8).unwrap();
            assert!(rep.pass, "m={m} α={alpha}: {rep:?}");
        }
    }
    let fam = SimplexFamily::new(3, 0.0).unwrap();
    let c = simplex_alpha_connection(&fam);
    let worst = fam
        .chart()
        .default_grid()
        .iter()
        .map(|p| curvature_at(&c, p).unwrap().max_abs())
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn simplex_dual_is_minus_alpha() {
    let fam = SimplexFamily::new(3, 0.4).unwrap();
    let dual = dual_connection(&simplex_fisher(&fam), &simplex_alpha_connection(&fam)).unwrap();
    let minus = simplex_alpha_connection(&SimplexFamily::new(3, -0.4).unwrap());
    for p in &fam.chart().grid(16, 7) {
        assert!(dual.at(p).unwrap().max_abs_diff(&minus.at(p).unwrap()) < 1e-8);
    }
}

#[test]
fn denormalization_examples() {
    let fam = DenormalizedFamily::new(3, 1.0).unwrap();
    let (g, _) = denormalization_geometry(&fam);
    assert!((g.at(&[4.0, 0.2, 0.3]).unwrap()[(0, 0)] - 0.25).abs() < 1e-15);
    for alpha in [1.0, 0.3, -1.0] {
        let fam = DenormalizedFamily::new(3, alpha).unwrap();
        let (g, c) = denormalization_geometry(&fam);
        // τ = t²/4 on the same simplex point.
        let map = ChartMap::new(fam.t_chart(), |u| {
            let mut value = u.to_vec();
            value[0] = 0.25 * u[0] * u[0];
            let mut jacobian = Matrix::identity(3);
            jacobian[(0, 0)] = 0.5 * u[0];
            let hessian = Array3::from_fn(
                3,
                |a, i, j| if a == 0 && i == 0 && j == 0 { 0.5 } else { 0.0 },
            );
            Ok(MapJet {
                value,
                jacobian,
                hessian,
            })
        });
        let gt = pullback_metric(&g, &map).unwrap();
        let ct = pullback_connection(&c, &map, "t chart").unwrap();
        for p in &fam.t_chart().grid(32, 0) {
            let m = gt.at(p).unwrap();
            assert!((m[(0, 0)] - 1.0).abs() < 1e-10);
            // ∂t is already unit, so the normalized line coefficient is Γ^t_tt.
            assert!((ct.at(p).unwrap()[(0, 0, 0)] + alpha / p[0]).abs() < 1e-8);
            let base = simplex_fisher(&fam.simplex).at(&p[1..]).unwrap();
            for i in 1..3 {
                for j in 1..3 {
                    let expected = 0.25 * p[0] * p[0] * base[(i - 1, j - 1)];
                    assert!((m[(i, j)] - expected).abs() < 1e-10);
                }
            }
        }
        if alpha == 1.0 {
            assert!((ct.at(&[2.0, 0.2, 0.3]).unwrap()[(0, 0, 0)] + 0.5).abs() < 1e-8);
        }
    }
    for alpha in [1.0, -1.0] {
        let fam = DenormalizedFamily::new(3, alpha).unwrap();
        let (g, c) = denormalization_geometry(&fam);
        let rep = flatness_report(&g, &c, &fam.chart().default_grid(), 1e-6).unwrap();
        assert!(rep.pass, "α={alpha}: {rep:?}");
    }
}

#[test]
fn takano_closed_forms() {
    let (g, c) = takano_geometry(&TakanoSpace::new(1, 1.0).unwrap());
    let low = lower(&g.at(&[1.0, 0.0]).unwrap(), &c.at(&[1.0, 0.0]).unwrap());
    assert!((low[(0, 0, 0)] + 6.0).abs() < 1e-12);
    let (_, c) = takano_geometry(&TakanoSpace::new(1, 0.0).unwrap());
    let gamma = c.at(&[2.0, 0.4]).unwrap();
    assert!((gamma[(1, 1, 0)] + 0.5).abs() < 1e-15);
    assert!((gamma[(1, 0, 1)] + 0.5).abs() < 1e-15);
}

#[test]
fn takano_invariants() {
    for (n, alpha) in [(1, 0.0), (1, 1.0), (2, 0.3), (3, -0.8), (2, -1.0)] {
        let space = TakanoSpace::new(n, alpha).unwrap();
        let (g, c) = takano_geometry(&space);
        let grid = space.chart().default_grid();
        let k = -(1.0 - alpha * alpha) / (2.0 * n as f64);
        assert!(constant_curvature_residual(&g, &c, k, &grid).unwrap() <= 1e-8);
        for p in &grid {
            let m = g.at(p).unwrap();
            let s = p[0];
            assert!((m[(0, 0)] - 2.0 * n as f64 / (s * s)).abs() < 1e-14);
            for i in 1..=n {
                assert!((m[(i, i)] - 1.0 / (s * s)).abs() < 1e-14);
                assert_eq!(m[(0, i)], 0.0);
            }
            let dg = metric_derivative(&g, &c, p).unwrap();
            let d = n + 1;
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        assert!((dg[(i, j, l)] - dg[(j, i, l)]).abs() < 1e-12);
                        assert!((dg[(i, j, l)] - dg[(l, j, i)]).abs() < 1e-12);
                    }
                }
            }
        }
        let spec = igwp_core::models::takano_warped_spec(n).unwrap();
        assert!(assumption_check(&spec, &c, &grid).unwrap().pass);
    }
}

/// The tangents `X₁ = 2E₁₁` and `X₃ = E₁₂ + E₂₁`.
const X1: Herm2 = Herm2::new(2.0, 0.0, 0.0, 0.0);
const X3: Herm2 = Herm2::new(0.0, 1.0, 0.0, 0.0);

#[test]
fn bkm_off_diagonal_weight() {
    let rho = Herm2::new(2.0, 0.0, 0.0, 1.0);
    let v = monotone_metric_2x2(MonotoneSymbol::Bkm, rho, X3, X3).unwrap();
    assert!((v - 2.0 * std::f64::consts::LN_2).abs() < 1e-12, "{v}");
    assert!((MonotoneSymbol::Bkm.c(2.0, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn degenerate_spectrum_limit() {
    let rho = Herm2::new(0.5, 0.0, 0.0, 0.5);
    for s in [MonotoneSymbol::Bkm, MonotoneSymbol::Sld] {
        assert!((s.c(0.5, 0.5) - 2.0).abs() < 1e-15);
        let v = monotone_metric_2x2(s, rho, X1, X1).unwrap();
        assert!((v - 8.0).abs() < 1e-12, "{v}");
    }
}

#[test]
fn symbols_are_normalized_and_symmetric() {
    for s in [MonotoneSymbol::Bkm, MonotoneSymbol::Sld] {
        assert!((s.f(1.0) - 1.0).abs() < 1e-12);
        for (x, y) in [(0.3, 1.7), (2.0, 0.25), (1.0, 1.0 + 1e-10)] {
            assert!((s.c(x, y) - s.c(y, x)).abs() < 1e-12 * s.c(x, y));
            assert!((s.f(x) - x * s.f(1.0 / x)).abs() < 1e-12);
        }
    }
}

#[test]
fn positivity_is_required() {
    let rho = Herm2::new(1.0, 2.0, 0.0, 1.0);
    assert!(monotone_metric_2x2(MonotoneSymbol::Bkm, rho, X1, X1).is_err());
}

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn conj(self) -> C {
        C(self.0, -self.1)
    }
}

type M2 = [[C; 2]; 2];

fn to_m2(h: Herm2) -> M2 {
    [[C(h.a, 0.0), C(h.b, h.c)], [C(h.b, -h.c), C(h.d, 0.0)]]
}

fn conjugate(u: &M2, h: Herm2) -> Herm2 {
    let m = to_m2(h);
    let prod = |x: &M2, y: &M2| -> M2 {
        let mut r = [[C(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = x[i][0].mul(y[0][j]).add(x[i][1].mul(y[1][j]));
            }
        }
        r
    };
    let ustar = [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ];
    let r = prod(&prod(u, &m), &ustar);
    Herm2::new(r[0][0].0, r[0][1].0, r[0][1].1, r[1][1].0)
}

fn unitary(theta: f64, phi: f64, psi: f64) -> M2 {
    let (c, s) = (theta.cos(), theta.sin());
    let e = |a: f64| C(a.cos(), a.sin());
    let g = e(psi);
    [
        [g.mul(e(phi)).mul(C(c, 0.0)), g.mul(C(-s, 0.0))],
        [g.mul(C(s, 0.0)), g.mul(e(-phi)).mul(C(c, 0.0))],
    ]
}

fn herm(v: &[f64]) -> Herm2 {
    Herm2::from_slice(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_homogeneity_and_unitary_invariance(
        l in prop::collection::vec(-1.0f64..1.0, 3),
        x in prop::collection::vec(-1.0f64..1.0, 4),
        y in prop::collection::vec(-1.0f64..1.0, 4),
        angles in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        // ρ = L L* + 0.2 I with L lower triangular.
        let rho = Herm2::new(
            l[0] * l[0] + 0.2,
            l[0] * l[1],
            l[0] * l[2],
            l[1] * l[1] + l[2] * l[2] + 0.2,
        );
        let u = unitary(angles[0], angles[1], angles[2]);
        for s in [MonotoneSymbol::Bkm, MonotoneSymbol::Sld] {
            let (x, y) = (herm(&x), herm(&y));
            let base = monotone_metric_2x2(s, rho, x, y).unwrap();
            let scaled = monotone_metric_2x2(s, rho.scale(3.0), x.scale(3.0), y.scale(3.0)).unwrap();
            prop_assert!((scaled - 3.0 * base).abs() < 1e-10 * base.abs().max(1.0));
            let rotated = monotone_metric_2x2(s, conjugate(&u, rho), conjugate(&u, x), conjugate(&u, y)).unwrap();
            prop_assert!((rotated - base).abs() < 1e-10 * base.abs().max(1.0));
        }
    }
}

#[test]
fn unitary_helper_is_unitary() {
    let u = unitary(0.7, -1.3, 2.1);
    let id = conjugate(&u, Herm2::new(1.0, 0.0, 0.0, 1.0));
    assert!((id.a - 1.0).abs() < 1e-14 && (id.d - 1.0).abs() < 1e-14);
    assert!(id.b.abs() < 1e-14 && id.c.abs() < 1e-14);
}

#[test]
fn bkm_cone_warped_chart() {
    let cone = bkm_cone_geometry(MonotoneSymbol::Bkm).unwrap();
    let g = &cone.warped_metric;
    for p in &g.chart().default_grid() {
        assert!((g.at(p).unwrap()[(0, 0)] - 1.0).abs() < 1e-10);
        let mut unit = p.clone();
        unit[0] = 1.0;
        let (m, m1) = (g.at(p).unwrap(), g.at(&unit).unwrap());
        for i in 1..4 {
            for j in 1..4 {
                assert!(
                    (m[(i, j)] - p[0] * p[0] * m1[(i, j)]).abs() < 1e-10 * m[(i, j)].abs().max(1.0)
                );
            }
        }
    }
    let p = [3.0, 0.4, 0.1, -0.05];
    let mut unit = p;
    unit[0] = 1.0;
    let z = 3;
    assert!((g.at(&p).unwrap()[(z, z)] - 9.0 * g.at(&unit).unwrap()[(z, z)]).abs() < 1e-10);
}

#[test]
fn mixture_connection_action_examples() {
    let p = [0.45, 0.05, -0.1];
    let zero = mixture_connection_action(
        MatrixChart::Density,
        &p,
        &[1.0, 0.0, 0.0],
        &FieldJet::constant(vec![0.0, 1.0, 0.0]),
    )
    .unwrap();
    assert_eq!(zero.max_abs(), 0.0);
    // Y = φ ∂y with φ = x², so ∂φ/∂x = 2x.
    let y = FieldJet {
        value: vec![0.0, p[0] * p[0], 0.0],
        partials: vec![0.0, 2.0 * p[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    };
    let v = mixture_connection_action(MatrixChart::Density, &p, &[1.0, 0.0, 0.0], &y).unwrap();
    let expected = DENSITY_BASIS[1].scale(2.0 * p[0]);
    assert!(v.add(expected.scale(-1.0)).max_abs() < 1e-15);
    assert_eq!(expected, X3.scale(2.0 * p[0]));

    let g = monotone_metric_field(MonotoneSymbol::Bkm, MatrixChart::Density);
    let c = mixture_connection(MatrixChart::Density).unwrap();
    let rep = flatness_report(&g, &c, &MatrixChart::Density.chart().default_grid(), 1e-6).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn elliptic_constants_match_closed_forms() {
    let cfg = QuadratureConfig::default();
    let cases = [
        (
            Generator::Gauss,
            EllipticConstants::new(0.25, 0.75, -15.0 / 8.0),
        ),
        (
            Generator::Cauchy,
            EllipticConstants::new(0.125, 0.375, -5.0 / 16.0),
        ),
        (
            Generator::Student { k: 5.0 },
            EllipticConstants::new(3.0 / 16.0, 9.0 / 16.0, -27.0 / 32.0),
        ),
    ];
    for (gen, expected) in cases {
        let got = elliptic_constants(&gen, cfg).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-8, "{gen:?}: {got:?}");
        assert!(gen.closed_form().max_abs_diff(&expected) < 1e-15);
    }
}

#[test]
fn elliptic_line_coefficients() {
    let gauss = EllipticFamily::closed_form(Generator::Gauss).unwrap();
    // α(6b + 4d − 1)/(4b − 1)^{3/2} = −4/2^{3/2}; the tabulated form carries the opposite sign.
    assert!((gauss.alpha_line_coefficient(1.0).unwrap() + 2f64.sqrt()).abs() < 1e-12);
    assert!((gauss.half_difference_coefficient(1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let cauchy = EllipticFamily::closed_form(Generator::Cauchy).unwrap();
    for alpha in [-2.0, 0.0, 1.0, 7.0] {
        assert_eq!(cauchy.alpha_line_coefficient(alpha).unwrap(), 0.0);
    }
    // At α = (k+5)/(k−1) the Student coefficient is √(2(k+3)/k).
    for k in [2.0, 3.0, 5.0, 11.0] {
        let fam = EllipticFamily::closed_form(Generator::Student { k }).unwrap();
        let alpha = (k + 5.0) / (k - 1.0);
        let expected = (2.0 * (k + 3.0) / k).sqrt();
        assert!((fam.half_difference_coefficient(alpha).unwrap() - expected).abs() < 1e-12);
    }
    assert!(EllipticFamily::from_ab(0.25, 0.2).is_err());
}

#[test]
fn elliptic_metric_charts_agree() {
    for gen in [
        Generator::Gauss,
        Generator::Cauchy,
        Generator::Student { k: 4.0 },
    ] {
        let fam = EllipticFamily::closed_form(gen).unwrap();
        let s = fam.s();
        let map = ChartMap::new(fam.chart(), move |u| {
            let sigma = (u[0] / s).exp();
            let mut jacobian = Matrix::zeros(2);
            jacobian[(0, 1)] = 1.0;
            jacobian[(1, 0)] = sigma / s;
            let hessian = Array3::from_fn(2, |a, i, j| {
                if a == 1 && i == 0 && j == 0 {
                    sigma / (s * s)
                } else {
                    0.0
                }
            });
            Ok(MapJet {
                value: vec![u[1], sigma],
                jacobian,
                hessian,
            })
        });
        let pulled = pullback_metric(&elliptic_fisher_sigma(&fam), &map).unwrap();
        let direct = elliptic_metric(&fam);
        for p in &fam.chart().default_grid() {
            assert!(pulled.at(p).unwrap().max_abs_diff(&direct.at(p).unwrap()) < 1e-10);
            let f = fam.warp(p[0]);
            assert!((direct.at(p).unwrap()[(1, 1)] - f * f).abs() < 1e-14);
        }
    }
}

#[test]
fn upper_half_plane_examples() {
    let g = upper_half_plane_metric(1.0).unwrap();
    assert_eq!(
        g.at(&[0.3, 1.0])
            .unwrap()
            .max_abs_diff(&Matrix::identity(2)),
        0.0
    );
    let g = upper_half_plane_metric(2.0).unwrap();
    assert!(
        g.at(&[0.0, 2.0])
            .unwrap()
            .max_abs_diff(&Matrix::from_diag(&[0.25, 1.0]))
            < 1e-15
    );
    let analytic = levi_civita(&g);
    let numeric = levi_civita(&g.clone().without_partials());
    for p in &g.chart().default_grid() {
        let d = curvature_at(&analytic, p)
            .unwrap()
            .max_abs_diff(&curvature_at(&numeric, p).unwrap());
        assert!(d < 1e-4, "{d}");
    }
    assert!(upper_half_plane_metric(0.0).is_err());
    assert!(upper_half_plane_metric(-1.0).is_err());
}
