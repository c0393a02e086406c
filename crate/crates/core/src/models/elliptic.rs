//! One-dimensional elliptic location-scale families and the upper half plane.
//!
//! For a generator `h`, `Z` has density `h(z²)` on the line and
//! `W = d log h(u)/du` at `u = Z²`. The constants `a = E(Z²W²)`,
//! `b = E(Z⁴W²)`, `d = E(Z⁶W³)` determine the Fisher metric
//! `(4a dμ² + (4b − 1) dσ²)/σ²`, which becomes `dt² + f(t)² dμ²` under
//! `t = √(4b − 1) log σ` with `f(t) = √(4a) exp(−t/√(4b − 1))`.

use alloc::format;
use alloc::vec;

use super::quadrature::{integrate, QuadratureConfig};
use crate::chart::ChartBox;
use crate::error::{domain, Result};
use crate::linalg::{Array3, Array4, Matrix};
use crate::tensor::MetricField;
use crate::warped::{euclidean_metric, Warp, WarpedSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// `h(u) = (2π)^{−1/2} e^{−u/2}`.
    Gauss,
    /// `h(u) = 1/(π(1 + u))`.
    Cauchy,
    /// `h(u) = Γ((k+1)/2)/(√(kπ) Γ(k/2)) (1 + u/k)^{−(k+1)/2}`.
    Student { k: f64 },
}

impl Generator {
    pub fn student(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(domain(format!(
                "Student degrees of freedom must be positive, got {k}"
            )));
        }
        Ok(Generator::Student { k })
    }

    pub fn name(&self) -> alloc::string::String {
        match self {
            Generator::Gauss => "gauss".into(),
            Generator::Cauchy => "cauchy".into(),
            Generator::Student { k } => format!("student(k={k})"),
        }
    }

    pub fn h(&self, u: f64) -> f64 {
        match *self {
            Generator::Gauss => libm::exp(-0.5 * u) / libm::sqrt(2.0 * core::f64::consts::PI),
            Generator::Cauchy => 1.0 / (core::f64::consts::PI * (1.0 + u)),
            Generator::Student { k } => {
                let norm = libm::tgamma(0.5 * (k + 1.0))
                    / (libm::sqrt(k * core::f64::consts::PI) * libm::tgamma(0.5 * k));
                norm * libm::pow(1.0 + u / k, -0.5 * (k + 1.0))
            }
        }
    }

    /// `W(u) = d log h(u)/du`.
    pub fn w(&self, u: f64) -> f64 {
        match *self {
            Generator::Gauss => -0.5,
            Generator::Cauchy => -1.0 / (1.0 + u),
            Generator::Student { k } => -(k + 1.0) / (2.0 * (k + u)),
        }
    }

    /// Closed-form `(a, b, d)`.
    pub fn closed_form(&self) -> EllipticConstants {
        match *self {
            Generator::Gauss => EllipticConstants::new(0.25, 0.75, -15.0 / 8.0),
            Generator::Cauchy => EllipticConstants::new(0.125, 0.375, -5.0 / 16.0),
            Generator::Student { k } => EllipticConstants::new(
                (k + 1.0) / (4.0 * (k + 3.0)),
                3.0 * (k + 1.0) / (4.0 * (k + 3.0)),
                -15.0 * (k + 1.0) * (k + 1.0) / (8.0 * (k + 3.0) * (k + 5.0)),
            ),
        }
    }

    /// The α at which the α-connection on the `t` line is the flat constant
    /// solution, when there is one.
    pub fn dually_flat_alpha(&self) -> Option<f64> {
        match *self {
            Generator::Gauss => Some(1.0),
            Generator::Cauchy => None,
            Generator::Student { k } if k != 1.0 => Some((k + 5.0) / (k - 1.0)),
            Generator::Student { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticConstants {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl EllipticConstants {
    pub const fn new(a: f64, b: f64, d: f64) -> Self {
        EllipticConstants { a, b, d }
    }

    pub fn max_abs_diff(&self, o: &EllipticConstants) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.d - o.d).abs())
    }
}

/// `E[g(Z)] = 2 ∫_0^{π/2} g(tan θ) h(tan² θ) sec² θ dθ` for even `g`.
fn expectation(gen: &Generator, g: impl Fn(f64, f64) -> f64, cfg: QuadratureConfig) -> Result<f64> {
    let f = |theta: f64| {
        let z = libm::tan(theta);
        let c = libm::cos(theta);
        let u = z * z;
        let v = 2.0 * g(z, gen.w(u)) * gen.h(u) / (c * c);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&f, 0.0, core::f64::consts::FRAC_PI_2, cfg)
}

/// Numerical `(a, b, d)` by adaptive quadrature.
pub fn elliptic_constants(gen: &Generator, cfg: QuadratureConfig) -> Result<EllipticConstants> {
    let z2 = |z: f64| z * z;
    Ok(EllipticConstants {
        a: expectation(gen, |z, w| z2(z) * w * w, cfg)?,
        b: expectation(gen, |z, w| z2(z) * z2(z) * w * w, cfg)?,
        d: expectation(gen, |z, w| z2(z) * z2(z) * z2(z) * w * w * w, cfg)?,
    })
}

/// A warped line `dt² + f(t)² dμ²` with `f(t) = √(4a) e^{−t/√(4b−1)}`.
///
/// `d` is absent for metrics that are not built from a generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticFamily {
    pub generator: Option<Generator>,
    pub a: f64,
    pub b: f64,
    pub d: Option<f64>,
}

impl EllipticFamily {
    pub fn new(generator: Generator, constants: EllipticConstants) -> Result<Self> {
        let fam = EllipticFamily {
            generator: Some(generator),
            a: constants.a,
            b: constants.b,
            d: Some(constants.d),
        };
        fam.check()?;
        Ok(fam)
    }

    pub fn closed_form(generator: Generator) -> Result<Self> {
        Self::new(generator, generator.closed_form())
    }

    /// A family given only by `(a, b)`.
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        let fam = EllipticFamily {
            generator: None,
            a,
            b,
            d: None,
        };
        fam.check()?;
        Ok(fam)
    }

    fn check(&self) -> Result<()> {
        if !(4.0 * self.b - 1.0 > 0.0) {
            return Err(domain(format!(
                "4b − 1 = {} must be positive",
                4.0 * self.b - 1.0
            )));
        }
        if !(self.a > 0.0) {
            return Err(domain(format!("a = {} must be positive", self.a)));
        }
        Ok(())
    }

    /// `√(4b − 1)`.
    pub fn s(&self) -> f64 {
        libm::sqrt(4.0 * self.b - 1.0)
    }

    pub fn warp(&self, t: f64) -> f64 {
        libm::sqrt(4.0 * self.a) * libm::exp(-t / self.s())
    }

    /// Chart `(t, μ)`; both sampled away from nothing in particular,
    /// `t ∈ [0.5, 2]`, `μ ∈ [−1, 1]`.
    pub fn chart(&self) -> ChartBox {
        let inf = f64::INFINITY;
        ChartBox::new("elliptic (t, mu)", vec![(-inf, inf), (-inf, inf)])
            .and_then(|c| c.with_names(&["t", "mu"]))
            .and_then(|c| c.with_window(vec![(0.5, 2.0), (-1.0, 1.0)]))
            .expect("elliptic chart is well formed")
    }

    /// Chart `(μ, σ)` with `σ` sampled in `[0.5, 2]`.
    pub fn sigma_chart(&self) -> ChartBox {
        let inf = f64::INFINITY;
        ChartBox::new("elliptic (mu, sigma)", vec![(-inf, inf), (0.0, inf)])
            .and_then(|c| c.with_names(&["mu", "sigma"]))
            .and_then(|c| c.with_window(vec![(-1.0, 1.0), (0.5, 2.0)]))
            .expect("elliptic chart is well formed")
    }

    /// `6b + 4d − 1`, when `d` is known.
    pub fn a_coefficient(&self) -> Option<f64> {
        self.d.map(|d| 6.0 * self.b + 4.0 * d - 1.0)
    }

    /// `α (6b + 4d − 1)/(4b − 1)^{3/2}`, the `∂t` coefficient of `∇^(α)_∂t ∂t`.
    pub fn alpha_line_coefficient(&self, alpha: f64) -> Option<f64> {
        let s = self.s();
        self.a_coefficient().map(|a| alpha * a / (s * s * s))
    }

    /// `−α (6b + 4d − 1)/(4b − 1)^{3/2}`, the form compared against the flat
    /// constant solution.
    pub fn half_difference_coefficient(&self, alpha: f64) -> Option<f64> {
        self.alpha_line_coefficient(alpha).map(|c| -c)
    }
}

/// The elliptic metric on `(t, μ)` with analytic partials.
pub fn elliptic_metric(fam: &EllipticFamily) -> MetricField {
    let f = *fam;
    let s = f.s();
    MetricField::new(f.chart(), move |p| {
        let w = f.warp(p[0]);
        Ok(Matrix::from_diag(&[1.0, w * w]))
    })
    .with_partials(move |p| {
        let w = f.warp(p[0]);
        Ok(Array3::from_fn(2, |c, a, b| {
            if (c, a, b) == (0, 1, 1) {
                -2.0 * w * w / s
            } else {
                0.0
            }
        }))
    })
    .with_second_partials(move |p| {
        let w = f.warp(p[0]);
        Ok(Array4::from_fn(2, |c, e, a, b| {
            if (c, e, a, b) == (0, 0, 1, 1) {
                4.0 * w * w / (s * s)
            } else {
                0.0
            }
        }))
    })
}

/// `dt² + f(t)² dμ²` as a singly warped product over the `t` line.
pub fn elliptic_warped_spec(fam: &EllipticFamily) -> Result<WarpedSpec> {
    let full = fam.chart();
    let base = ChartBox::new("t", vec![full.bounds()[0]])?
        .with_names(&["t"])?
        .with_window(vec![full.window()[0]])?;
    let fiber = ChartBox::new("mu", vec![full.bounds()[1]])?
        .with_names(&["mu"])?
        .with_window(vec![full.window()[1]])?;
    WarpedSpec::singly(
        euclidean_metric(base),
        euclidean_metric(fiber),
        Warp::exp_line(libm::sqrt(4.0 * fam.a), -1.0 / fam.s()),
    )
}

/// `(4a dμ² + (4b − 1) dσ²)/σ²` on `(μ, σ)`, derivatives by finite differences.
pub fn elliptic_fisher_sigma(fam: &EllipticFamily) -> MetricField {
    let f = *fam;
    MetricField::new(f.sigma_chart(), move |p| {
        let s2 = p[1] * p[1];
        Ok(Matrix::from_diag(&[4.0 * f.a / s2, (4.0 * f.b - 1.0) / s2]))
    })
}

/// `(dx² + λ² dy²)/y²` on `(x, y)`, `y > 0`.
pub fn upper_half_plane_metric(lambda: f64) -> Result<MetricField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda = {lambda} must be positive")));
    }
    let inf = f64::INFINITY;
    let chart = ChartBox::new("upper half plane", vec![(-inf, inf), (0.0, inf)])?
        .with_names(&["x", "y"])?
        .with_window(vec![(-1.0, 1.0), (0.5, 2.0)])?;
    let l2 = lambda * lambda;
    let check = |p: &[f64]| {
        if p[1] > 0.0 {
            Ok(p[1])
        } else {
            Err(domain(format!("y = {} must be positive", p[1])))
        }
    };
    Ok(MetricField::new(chart, move |p| {
        let y = check(p)?;
        Ok(Matrix::from_diag(&[1.0 / (y * y), l2 / (y * y)]))
    })
    .with_partials(move |p| {
        let y = check(p)?;
        let y3 = y * y * y;
        Ok(Array3::from_fn(2, |c, a, b| match (c, a, b) {
            (1, 0, 0) => -2.0 / y3,
            (1, 1, 1) => -2.0 * l2 / y3,
            _ => 0.0,
        }))
    })
    .with_second_partials(move |p| {
        let y = check(p)?;
        let y4 = y * y * y * y;
        Ok(Array4::from_fn(2, |c, e, a, b| match (c, e, a, b) {
            (1, 1, 0, 0) => 6.0 / y4,
            (1, 1, 1, 1) => 6.0 * l2 / y4,
            _ => 0.0,
        }))
    }))
}

/// The upper half plane as a warped line: `t = λ log y`, fiber `x`, so
/// `a = 1/4` and `√(4b − 1) = λ`.
pub fn upper_half_plane_family(lambda: f64) -> Result<EllipticFamily> {
    if !(lambda > 0.0) {
        return Err(domain(format!("lambda = {lambda} must be positive")));
    }
    EllipticFamily::from_ab(0.25, 0.25 * (1.0 + lambda * lambda))
}
