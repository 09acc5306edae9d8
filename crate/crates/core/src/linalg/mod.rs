//! Dense linear algebra on small square matrices.
//!
//! Everything here works on `f64` in row-major storage. The matrices that
//! flow through the workbench are tiny (transformations, symmetry elements,
//! moment matrices), so the routines favour exactness of the summation order
//! over blocking or vectorisation. The sparse module backs the finite-element
//! eigensolver.

mod eigen;
pub mod sparse;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{jacobi_eigen, SymmetricEigenResult};

/// Relative factor used by the invertibility test: `|det M|` must exceed
/// `DEGENERACY_FACTOR * (max |M_ij|)^d`.
pub const DEGENERACY_FACTOR: f64 = 1e-12;

/// Dense `d x d` real matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    /// `M x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `z M` for a row vector `z`.
    pub fn row_mul(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (i, &zi) in z.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += zi * m;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Hilbert-Schmidt (Frobenius) norm. Entries are summed in row-major
    /// order so the result is bit-reproducible.
    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_squared().sqrt()
    }

    pub fn hs_norm_squared(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.data {
            acc += v * v;
        }
        acc
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol * self.max_abs().max(1.0)
    }

    fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `M^T M = Id` entrywise to `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.transpose()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
            <= tol
    }

    /// Threshold below which `|det|` is treated as singular.
    pub fn degeneracy_threshold(&self) -> f64 {
        DEGENERACY_FACTOR * self.max_abs().powi(self.dim as i32)
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn det(&self) -> f64 {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..d {
            let mut p = k;
            for i in (k + 1)..d {
                if a[i * d + k].abs() > a[p * d + k].abs() {
                    p = i;
                }
            }
            let pivot = a[p * d + k];
            if pivot == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..d {
                    a.swap(k * d + j, p * d + j);
                }
                det = -det;
            }
            det *= pivot;
            for i in (k + 1)..d {
                let f = a[i * d + k] / pivot;
                if f != 0.0 {
                    for j in (k + 1)..d {
                        a[i * d + j] -= f * a[k * d + j];
                    }
                }
            }
        }
        det
    }

    fn check_invertible(&self) -> Result<()> {
        let det = self.det();
        let threshold = self.degeneracy_threshold();
        if !(det.abs() > threshold) {
            return Err(Error::Singular { det, threshold });
        }
        Ok(())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn invert(&self) -> Result<Self> {
        self.check_invertible()?;
        let d = self.dim;
        let mut a = self.data.clone();
        let mut inv = Self::identity(d).data;
        for k in 0..d {
            let mut p = k;
            for i in (k + 1)..d {
                if a[i * d + k].abs() > a[p * d + k].abs() {
                    p = i;
                }
            }
            if p != k {
                for j in 0..d {
                    a.swap(k * d + j, p * d + j);
                    inv.swap(k * d + j, p * d + j);
                }
            }
            let pivot = a[k * d + k];
            for j in 0..d {
                a[k * d + j] /= pivot;
                inv[k * d + j] /= pivot;
            }
            for i in 0..d {
                if i == k {
                    continue;
                }
                let f = a[i * d + k];
                if f != 0.0 {
                    for j in 0..d {
                        a[i * d + j] -= f * a[k * d + j];
                        inv[i * d + j] -= f * inv[k * d + j];
                    }
                }
            }
        }
        Ok(Self { dim: d, data: inv })
    }

    /// `(M^{-1})^T`.
    pub fn inverse_transpose(&self) -> Result<Self> {
        Ok(self.invert()?.transpose())
    }

    /// Symmetric eigendecomposition, ascending.
    pub fn sym_eigen(&self) -> Result<SymmetricEigenResult> {
        eigen::sym_eigen(self, None)
    }

    /// Generalized symmetric problem `S v = lambda B v` with `B` SPD.
    pub fn sym_eigen_generalized(&self, b: &Self) -> Result<SymmetricEigenResult> {
        eigen::sym_eigen(self, Some(b))
    }

    /// Singular values in ascending order, from the eigenvalues of `M^T M`.
    pub fn singular_values(&self) -> Vec<f64> {
        let gram = self.transpose().matmul(self);
        let eig = jacobi_eigen(&gram);
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect()
    }

    /// Lower-triangular Cholesky factor `L` with `L L^T = self`.
    pub fn cholesky(&self) -> Result<Self> {
        let d = self.dim;
        let mut l = Self::zeros(d);
        for i in 0..d {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(l)
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        m.to_rows()
    }
}

/// Dense `rows x cols` matrix, row-major. Used for the `Y` and `W` arguments
/// of the frame and boundary-form operations.
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// All columns must share the same length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn hs_norm_squared(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.data {
            acc += v * v;
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_squared().sqrt()
    }

    /// `A Y` for a square `A` with as many columns as `Y` has rows.
    pub fn left_mul(&self, a: &SquareMatrix) -> Self {
        assert_eq!(a.dim(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for k in 0..self.rows {
                let aik = a[(i, k)];
                for j in 0..self.cols {
                    out.data[i * self.cols + j] += aik * self.data[k * self.cols + j];
                }
            }
        }
        out
    }

    /// `z Y` for a row vector `z`.
    pub fn row_mul(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &zi) in z.iter().enumerate() {
            for (o, &y) in out.iter_mut().zip(&self.data[i * self.cols..(i + 1) * self.cols]) {
                *o += zi * y;
            }
        }
        out
    }

    /// `Y Y^T`, a `rows x rows` symmetric matrix.
    pub fn gram_rows(&self) -> SquareMatrix {
        let mut g = SquareMatrix::zeros(self.rows);
        for i in 0..self.rows {
            for k in 0..self.rows {
                let mut s = 0.0;
                for j in 0..self.cols {
                    s += self.data[i * self.cols + j] * self.data[k * self.cols + j];
                }
                g[(i, k)] = s;
            }
        }
        g
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs_norm_examples() {
        assert!((SquareMatrix::identity(3).hs_norm() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(SquareMatrix::diagonal(&[1.0, 1.0, 0.5]).hs_norm(), 1.5);
        let inv = SquareMatrix::diagonal(&[1.0, 1.0, 0.5]).invert().unwrap();
        assert!((inv.hs_norm() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invert_diagonal_and_identity() {
        let id = SquareMatrix::identity(4);
        assert_eq!(id.invert().unwrap(), id);
        let d = SquareMatrix::diagonal(&[2.0, 4.0, 0.5]);
        let inv = d.invert().unwrap();
        assert!(inv.max_abs_diff(&SquareMatrix::diagonal(&[0.5, 0.25, 2.0])) < 1e-15);
    }

    #[test]
    fn invert_rejects_singular() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(m.invert(), Err(Error::Singular { .. })));
        let tiny = SquareMatrix::diagonal(&[1.0, 1e-13]);
        assert!(tiny.invert().is_err());
    }

    #[test]
    fn inverse_transpose_of_shear() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let it = m.inverse_transpose().unwrap();
        let expect = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![-2.0, 1.0]]).unwrap();
        assert!(it.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn singular_values_examples() {
        let sv = SquareMatrix::diagonal(&[3.0, -2.0]).singular_values();
        assert!((sv[0] - 2.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        let (s, c) = (0.3f64.sin(), 0.3f64.cos());
        let rot = SquareMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        for v in rot.singular_values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn determinant_sign_and_value() {
        let m = SquareMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert_eq!(m.det(), -2.0);
    }

    #[test]
    fn serde_as_nested_rows() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: SquareMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SquareMatrix>("[[1.0,2.0],[3.0]]").is_err());
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(m.cholesky(), Err(Error::NotPositiveDefinite { .. })));
    }
}
