//! Small real matrices: symmetric, antisymmetric and general, with
//! determinant/adjugate kernels that only need field arithmetic.
//!
//! Dimensions 2 and 3 use explicit polynomial closed forms (the 3×3 cofactor
//! table below is written out entry by entry); larger dimensions fall back to
//! Gaussian elimination with partial pivoting.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> RMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * rhs[(k, j)])
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| if x.magnitude() > acc { x.magnitude() } else { acc })
    }
}

impl<T> Index<(usize, usize)> for RMat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

/// Real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Field> SymMatrix<T> {
    /// Builds from the upper triangle: `f(i, j)` is only called for `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// `(M + Mᵀ)/2` of a square matrix.
    pub fn from_symmetric_part(m: &RMat<T>) -> Self {
        assert_eq!(m.rows(), m.cols(), "symmetric part of a non-square matrix");
        let two = T::one() + T::one();
        Self::from_fn(m.rows(), |i, j| (m[(i, j)] + m[(j, i)]) / two)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rmat(&self) -> RMat<T> {
        RMat {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.to_rmat().max_abs()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    pub fn det(&self) -> T {
        det_dense(self.dim, &self.data)
    }

    /// Adjugate (transposed cofactor matrix); `adj(M)·M = det(M)·I`.
    pub fn adjugate(&self) -> Self {
        let n = self.dim;
        let g = |i: usize, j: usize| self.get(i, j);
        match n {
            0 => Self::zeros(0),
            1 => Self::from_fn(1, |_, _| T::one()),
            2 => Self::from_fn(2, |i, j| match (i, j) {
                (0, 0) => g(1, 1),
                (1, 1) => g(0, 0),
                _ => -g(0, 1),
            }),
            3 => {
                let (xx, xy, xz) = (g(0, 0), g(0, 1), g(0, 2));
                let (yy, yz, zz) = (g(1, 1), g(1, 2), g(2, 2));
                Self::from_fn(3, |i, j| match (i, j) {
                    (0, 0) => yy * zz - yz * yz,
                    (0, 1) => xz * yz - xy * zz,
                    (0, 2) => xy * yz - xz * yy,
                    (1, 1) => xx * zz - xz * xz,
                    (1, 2) => xy * xz - xx * yz,
                    (2, 2) => xx * yy - xy * xy,
                    _ => unreachable!(),
                })
            }
            _ => Self::from_fn(n, |i, j| cofactor(n, &self.data, j, i)),
        }
    }
}

impl<T: Real> SymMatrix<T> {
    /// Checked constructor from row-major data; symmetric to `1e-12` of the
    /// largest entry.
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut dev = T::zero();
        let mut scale = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                dev = dev.max((data[i * dim + j] - data[j * dim + i]).abs());
                scale = scale.max(data[i * dim + j].abs());
            }
        }
        if dev > T::tol(1e-12) * scale {
            return Err(Error::NonHermitianInput {
                deviation: dev.as_f64(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    /// Scale-aware determinant threshold `1e-12·|tr(M)/dim|^dim`.
    pub fn det_threshold(&self) -> T {
        if self.dim == 0 {
            return T::zero();
        }
        let mean = (self.trace() / T::lit(self.dim as f64)).abs();
        T::tol(1e-12) * mean.powi(self.dim as i32)
    }
}

/// Real antisymmetric matrix (zero diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct AntisymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Field> AntisymMatrix<T> {
    /// Builds from the strict upper triangle: `f(i, j)` is called for `i < j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = -v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    /// `(M - Mᵀ)/2` of a square matrix.
    pub fn from_antisymmetric_part(m: &RMat<T>) -> Self {
        assert_eq!(m.rows(), m.cols());
        let two = T::one() + T::one();
        Self::from_fn(m.rows(), |i, j| (m[(i, j)] - m[(j, i)]) / two)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rmat(&self) -> RMat<T> {
        RMat {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.to_rmat().max_abs()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// Determinant; zero in odd dimension by antisymmetry.
    pub fn det(&self) -> T {
        if self.dim % 2 == 1 {
            return T::zero();
        }
        det_dense(self.dim, &self.data)
    }
}

impl<T: Real> AntisymMatrix<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let mut dev = T::zero();
        let mut scale = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                dev = dev.max((data[i * dim + j] + data[j * dim + i]).abs());
                scale = scale.max(data[i * dim + j].abs());
            }
        }
        if dev > T::tol(1e-12) * scale {
            return Err(Error::NonHermitianInput {
                deviation: dev.as_f64(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| data[i * dim + j]))
    }
}

/// Determinant of a dense row-major `n×n` matrix.
pub fn det_dense<T: Field>(n: usize, a: &[T]) -> T {
    debug_assert_eq!(a.len(), n * n);
    let g = |i: usize, j: usize| a[i * n + j];
    match n {
        0 => T::one(),
        1 => g(0, 0),
        2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
        3 => {
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        }
        _ => det_elimination(n, a.to_vec()),
    }
}

fn det_elimination<T: Field>(n: usize, mut a: Vec<T>) -> T {
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .magnitude()
                    .partial_cmp(&a[s * n + col].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot * n + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                a[r * n + j] = a[r * n + j] - factor * a[col * n + j];
            }
        }
    }
    det
}

/// Signed cofactor `(-1)^{i+j} det(minor_ij)`.
fn cofactor<T: Field>(n: usize, a: &[T], i: usize, j: usize) -> T {
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for r in (0..n).filter(|&r| r != i) {
        for c in (0..n).filter(|&c| c != j) {
            minor.push(a[r * n + c]);
        }
    }
    let d = det_dense(n - 1, &minor);
    if (i + j) % 2 == 0 {
        d
    } else {
        -d
    }
}

/// Determinant, adjugate and (when well conditioned) inverse of a symmetric
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DetAdjInv<T> {
    pub det: T,
    pub adj: SymMatrix<T>,
    /// `None` when `|det| <= det_threshold` (the degenerate case).
    pub inv: Option<SymMatrix<T>>,
    pub threshold: T,
}

impl<T> DetAdjInv<T> {
    pub fn is_degenerate(&self) -> bool {
        self.inv.is_none()
    }
}

pub fn sym_det_adj_inv<T: Real>(m: &SymMatrix<T>) -> DetAdjInv<T> {
    let det = m.det();
    let adj = m.adjugate();
    let threshold = m.det_threshold();
    let inv = (det.abs() > threshold).then(|| adj.scale(det.recip()));
    DetAdjInv {
        det,
        adj,
        inv,
        threshold,
    }
}
