//! Small dense arrays used by the tensor code.
//!
//! Every chart in this crate has dimension at most five or six, so all
//! storage is a flat `Vec<f64>` in row-major order and all loops are naive.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeomError, Result};

/// Relative determinant threshold below which a matrix is treated as singular.
const SINGULAR_RTOL: f64 = 1e-13;

/// Square `n × n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data; panics if `data.len() != n * n`.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Bilinear form `uᵀ M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += u[i] * self[(i, j)] * v[j];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|M_ij − M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        match self.n {
            0 => 1.0,
            1..=4 => cofactor_det(self, &mut (0..self.n).collect::<Vec<_>>(), 0),
            _ => lu_decompose(self).map_or(0.0, |lu| lu.det()),
        }
    }

    /// Inverse via the adjugate for `n ≤ 4`, LU with partial pivoting above.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        if n == 0 {
            return Some(self.clone());
        }
        let scale: f64 = (0..n)
            .map(|i| libm::sqrt((0..n).map(|j| self[(i, j)] * self[(i, j)]).sum::<f64>()))
            .product();
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        if n <= 4 {
            let det = self.determinant();
            if !(det.abs() > SINGULAR_RTOL * scale) {
                return None;
            }
            let mut inv = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let minor = self.minor(j, i);
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    inv[(i, j)] = sign * minor.determinant() / det;
                }
            }
            Some(inv)
        } else {
            let lu = lu_decompose(self)?;
            if !(lu.det().abs() > SINGULAR_RTOL * scale) {
                return None;
            }
            let mut inv = Matrix::zeros(n);
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let col = lu.solve(&e);
                for i in 0..n {
                    inv[(i, j)] = col[i];
                }
            }
            Some(inv)
        }
    }

    /// Inverse that reports the evaluation point on failure.
    pub fn inverse_at(&self, point: &[f64]) -> Result<Matrix> {
        self.inverse().ok_or_else(|| GeomError::SingularMetric {
            point: point.to_vec(),
        })
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        Some(self.inverse()?.mul_vec(b))
    }

    /// `true` when symmetric to `tol` and every leading principal minor is positive.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        if self.asymmetry() > tol {
            return false;
        }
        // Cholesky without storing the factor.
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return false;
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        true
    }

    fn minor(&self, row: usize, col: usize) -> Matrix {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != row) {
            for j in (0..n).filter(|&j| j != col) {
                data.push(self[(i, j)]);
            }
        }
        Matrix { n: n - 1, data }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

fn cofactor_det(m: &Matrix, cols: &mut Vec<usize>, row: usize) -> f64 {
    let k = cols.len();
    match k {
        0 => 1.0,
        1 => m[(row, cols[0])],
        2 => m[(row, cols[0])] * m[(row + 1, cols[1])] - m[(row, cols[1])] * m[(row + 1, cols[0])],
        _ => {
            let mut acc = 0.0;
            for idx in 0..k {
                let c = cols.remove(idx);
                let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * m[(row, c)] * cofactor_det(m, cols, row + 1);
                cols.insert(idx, c);
            }
            acc
        }
    }
}

struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    fn det(&self) -> f64 {
        (0..self.lu.n).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

fn lu_decompose(m: &Matrix) -> Option<Lu> {
    let n = m.n;
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| lu[(a, col)].abs().total_cmp(&lu[(b, col)].abs()))?;
        if lu[(pivot, col)] == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            perm.swap(col, pivot);
            sign = -sign;
        }
        for i in col + 1..n {
            let factor = lu[(i, col)] / lu[(col, col)];
            lu[(i, col)] = factor;
            for j in col + 1..n {
                let v = lu[(col, j)];
                lu[(i, j)] -= factor * v;
            }
        }
    }
    Some(Lu { lu, perm, sign })
}

/// Dense `n × n × n` array. The meaning of each slot is fixed by the producer
/// (Christoffel symbols use `(k, i, j) ↦ Γ^k_{ij}`, metric partials use
/// `(i, j, k) ↦ ∂_i g_{jk}`).
#[derive(Debug, Clone, PartialEq)]
pub struct Array3 {
    n: usize,
    data: Vec<f64>,
}

impl Array3 {
    pub fn zeros(n: usize) -> Self {
        Array3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a[(i, j, k)] = f(i, j, k);
                }
            }
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Array3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Array3 {
        Array3 {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Array3, f: impl Fn(f64, f64) -> f64) -> Array3 {
        Array3 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl core::ops::Index<(usize, usize, usize)> for Array3 {
    type Output = f64;
    #[inline]
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &f64 {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl core::ops::IndexMut<(usize, usize, usize)> for Array3 {
    #[inline]
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

/// Dense `n⁴` array (curvature tensors, partials of Christoffel symbols).
#[derive(Debug, Clone, PartialEq)]
pub struct Array4 {
    n: usize,
    data: Vec<f64>,
}

impl Array4 {
    pub fn zeros(n: usize) -> Self {
        Array4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        a[(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Array4) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl core::ops::Index<(usize, usize, usize, usize)> for Array4 {
    type Output = f64;
    #[inline]
    fn index(&self, (a, b, c, d): (usize, usize, usize, usize)) -> &f64 {
        &self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}

impl core::ops::IndexMut<(usize, usize, usize, usize)> for Array4 {
    #[inline]
    fn index_mut(&mut self, (a, b, c, d): (usize, usize, usize, usize)) -> &mut f64 {
        &mut self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}
