//! Small dense complex linear algebra.
//!
//! Everything here targets matrices of dimension at most a few dozen, so the
//! storage is a flat row-major `Vec` and the eigensolver is cyclic Jacobi,
//! which is accurate to working precision on Hermitian input and needs no
//! external LAPACK.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::Error;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` for an unnormalized amplitude slice.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self += factor * other`, shapes must agree.
    pub fn add_scaled(&mut self, factor: f64, other: &CMatrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M[j,k] − conj(M[k,j])|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.rows {
            for k in j..self.cols {
                worst = worst.max((self[(j, k)] - self[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |j, k| {
            (self[(j, k)] + self[(k, j)].conj()) * 0.5
        })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order and
/// eigenvectors stored as the matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Full eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen, Error> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut work = a.hermitian_part().data;
    let mut vecs = CMatrix::identity(n).data;
    jacobi(&mut work, n, Some(&mut vecs))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[j * n + j].re.total_cmp(&work[i * n + i].re));
    let values = order.iter().map(|&k| work[k * n + k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vecs[i * n + order[j]]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>, Error> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut work = a.hermitian_part().data;
    jacobi(&mut work, n, None)?;
    let mut values: Vec<f64> = (0..n).map(|k| work[k * n + k].re).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// In-place Jacobi diagonalization of the Hermitian `n×n` row-major buffer.
/// On return the diagonal holds the eigenvalues; `vecs`, if given, is
/// right-multiplied by the accumulated unitary.
pub(crate) fn jacobi(a: &mut [C64], n: usize, mut vecs: Option<&mut [C64]>) -> Result<(), Error> {
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 || n < 2 {
        return Ok(());
    }
    let threshold = total * 1e-32;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= threshold {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // drop rotations that cannot move either diagonal entry
                if r < 1e-18 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase = apq.conj() / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = phase * (-s);
                let u_qq = phase * c;
                for k in 0..n {
                    let x = a[k * n + p];
                    let y = a[k * n + q];
                    a[k * n + p] = x * u_pp + y * u_qp;
                    a[k * n + q] = x * u_pq + y * u_qq;
                }
                for k in 0..n {
                    let x = a[p * n + k];
                    let y = a[q * n + k];
                    a[p * n + k] = u_pp.conj() * x + u_qp.conj() * y;
                    a[q * n + k] = u_pq.conj() * x + u_qq.conj() * y;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                if let Some(v) = vecs.as_deref_mut() {
                    for k in 0..n {
                        let x = v[k * n + p];
                        let y = v[k * n + q];
                        v[k * n + p] = x * u_pp + y * u_qp;
                        v[k * n + q] = x * u_pq + y * u_qq;
                    }
                }
            }
        }
    }
    Err(Error::EigenSolver { dim: n })
}

/// Eigenvalues of the 2×2 Hermitian matrix `[[a, b], [b*, d]]`, larger first.
#[inline]
pub(crate) fn eigenvalues_2x2(a: f64, b: C64, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let radius = (half * half + b.norm_sqr()).sqrt();
    let hi = mean + radius;
    // product form keeps the small eigenvalue accurate near rank one
    let det = a * d - b.norm_sqr();
    let lo = if hi > 0.0 { det / hi } else { mean - radius };
    (hi, lo)
}

/// Orthonormalizes the columns of `m` in place (modified Gram–Schmidt).
/// Returns `false` if a column is numerically dependent.
pub(crate) fn orthonormalize_columns(m: &mut CMatrix) -> bool {
    let (rows, cols) = (m.rows, m.cols);
    for j in 0..cols {
        for k in 0..j {
            let proj: C64 = (0..rows).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..rows {
                let t = m[(i, k)] * proj;
                m[(i, j)] -= t;
            }
        }
        let nrm = (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-13 {
            return false;
        }
        for i in 0..rows {
            m[(i, j)] /= nrm;
        }
    }
    true
}
