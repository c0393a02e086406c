//! Coordinate boxes and deterministic sample grids.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{domain, GeomError, Result};

/// Margin removed from each side of the evaluation window before sampling,
/// as a fraction of its width.
pub const GRID_SHRINK: f64 = 0.1;

/// Default number of sample points per grid.
pub const DEFAULT_SAMPLES: usize = 64;

const HALTON_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A coordinate domain: an open box (possibly unbounded) together with a
/// finite evaluation window used for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartBox {
    label: String,
    names: Vec<String>,
    bounds: Vec<(f64, f64)>,
    window: Vec<(f64, f64)>,
}

impl ChartBox {
    /// Creates a chart from open-interval bounds. Infinite bounds are allowed;
    /// the evaluation window then defaults to the bound clipped to `[-1, 1]`
    /// around the finite end (see [`ChartBox::with_window`]).
    pub fn new(label: impl Into<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(GeomError::Shape {
                what: "chart must have at least one coordinate".into(),
            });
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(domain(format!(
                    "coordinate {i} has empty interval ({lo}, {hi})"
                )));
            }
        }
        let window = bounds
            .iter()
            .map(|&(lo, hi)| default_window(lo, hi))
            .collect();
        let names = (0..bounds.len()).map(|i| format!("x{i}")).collect();
        Ok(ChartBox {
            label: label.into(),
            names,
            bounds,
            window,
        })
    }

    /// Replaces the coordinate names used in diagnostics.
    pub fn with_names(mut self, names: &[&str]) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(GeomError::Shape {
                what: format!(
                    "chart `{}` has {} coordinates but {} names were given",
                    self.label,
                    self.dim(),
                    names.len()
                ),
            });
        }
        self.names = names.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    /// Sets the closed evaluation window; it must lie inside the open bounds.
    pub fn with_window(mut self, window: Vec<(f64, f64)>) -> Result<Self> {
        if window.len() != self.dim() {
            return Err(GeomError::Shape {
                what: format!(
                    "window has {} entries for a {}-chart",
                    window.len(),
                    self.dim()
                ),
            });
        }
        for (i, (&(lo, hi), &(blo, bhi))) in window.iter().zip(&self.bounds).enumerate() {
            if !(lo < hi) || !(lo > blo) || !(hi < bhi) {
                return Err(domain(format!(
                    "window [{lo}, {hi}] for `{}` is not inside ({blo}, {bhi})",
                    self.names[i]
                )));
            }
        }
        self.window = window;
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn window(&self) -> &[(f64, f64)] {
        &self.window
    }

    /// `true` when `p` has the right length and lies strictly inside every bound.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x > lo && x < hi)
    }

    /// Returns a domain error naming the first offending coordinate.
    pub fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(GeomError::Shape {
                what: format!(
                    "point of length {} on {}-dimensional chart `{}`",
                    p.len(),
                    self.dim(),
                    self.label
                ),
            });
        }
        for (i, (&x, &(lo, hi))) in p.iter().zip(&self.bounds).enumerate() {
            if !(x > lo && x < hi) {
                return Err(domain(format!(
                    "{} = {x} outside ({lo}, {hi}) on chart `{}`",
                    self.names[i], self.label
                )));
            }
        }
        Ok(())
    }

    /// Cartesian product chart: coordinates of `self` followed by those of `other`.
    pub fn product(&self, other: &ChartBox, label: impl Into<String>) -> ChartBox {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut bounds = self.bounds.clone();
        bounds.extend_from_slice(&other.bounds);
        let mut window = self.window.clone();
        window.extend_from_slice(&other.window);
        ChartBox {
            label: label.into(),
            names,
            bounds,
            window,
        }
    }

    /// Deterministic low-discrepancy grid inside the shrunk window.
    pub fn grid(&self, samples: usize, seed: u64) -> SampleGrid {
        let dim = self.dim();
        let mut points = Vec::with_capacity(samples);
        for s in 0..samples as u64 {
            let index = s + 1 + seed;
            let p: Vec<f64> = (0..dim)
                .map(|d| {
                    let (lo, hi) = self.window[d];
                    let margin = GRID_SHRINK * (hi - lo);
                    let u = radical_inverse(index, HALTON_BASES[d % HALTON_BASES.len()]);
                    (lo + margin) + u * (hi - lo - 2.0 * margin)
                })
                .collect();
            points.push(p);
        }
        SampleGrid { points }
    }

    pub fn default_grid(&self) -> SampleGrid {
        self.grid(DEFAULT_SAMPLES, 0)
    }
}

fn default_window(lo: f64, hi: f64) -> (f64, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            // Closed window strictly inside the open interval.
            let pad = 1e-6 * (hi - lo);
            (lo + pad, hi - pad)
        }
        (true, false) => (lo + 0.5, lo + 2.0),
        (false, true) => (hi - 2.0, hi - 0.5),
        (false, false) => (-1.0, 1.0),
    }
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// An ordered list of points on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// Wraps explicit points after checking each one against `chart`.
    pub fn from_points(chart: &ChartBox, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            chart.check(p)?;
        }
        Ok(SampleGrid { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Vec<f64>> {
        self.points.iter()
    }
}

impl<'a> IntoIterator for &'a SampleGrid {
    type Item = &'a Vec<f64>;
    type IntoIter = core::slice::Iter<'a, Vec<f64>>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
