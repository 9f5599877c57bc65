//! Small dense and sparse complex matrices.
//!
//! The composite spaces in this crate are at most a few hundred states wide,
//! so a row-major `Vec<C64>` is all the dense storage we need. Hamiltonians are
//! built as [`SparseMatrix`] (each term is a qubit operator times a ladder
//! operator, so rows carry only a handful of entries) and applied to blocks of
//! column vectors during propagation.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use num_traits::{Float, Zero};

/// Dense complex matrix, row-major.
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
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
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

    /// Builds a matrix from row-major entries. Panics if the length is wrong.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "row-major data has the wrong length"
        );
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// `self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// `max |H − H†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    /// `max |U†U − 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).max_abs()
    }

    /// Matrix exponential by scaling and squaring with a Taylor kernel.
    ///
    /// The argument is scaled until its 1-norm is at most 1/2, the series is
    /// summed until the next term falls below machine precision, and the
    /// result is squared back up.
    pub fn expm(&self) -> Self {
        assert!(self.is_square(), "expm of a non-square matrix");
        let n = self.rows;
        let norm = self.norm_one();
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.5 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(C64::new(scale, 0.0));
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=40 {
            term = term.matmul(&a).scale(C64::new(1.0 / k as f64, 0.0));
            result = &result + &term;
            if term.max_abs() <= f64::EPSILON * 1e-2 * result.max_abs() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add dimension mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub dimension mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Builds an `n × n` matrix from `(row, col, value)` triplets; duplicate
    /// positions are summed and exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry exists") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                rows_of.push(i);
                last = Some((i, j));
            }
        }
        let mut kept_cols = Vec::with_capacity(col_idx.len());
        let mut kept_vals = Vec::with_capacity(values.len());
        for ((i, j), v) in rows_of.into_iter().zip(col_idx).zip(values) {
            if !v.is_zero() {
                row_ptr[i + 1] += 1;
                kept_cols.push(j);
                kept_vals.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx: kept_cols,
            values: kept_vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] += self.values[k];
            }
        }
        m
    }

    /// Induced 1-norm.
    pub fn norm_one(&self) -> f64 {
        let mut col_sums = vec![0.0; self.n];
        for (&j, v) in self.col_idx.iter().zip(&self.values) {
            col_sums[j] += v.norm();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }

    /// `self · block` for a dense block of column vectors.
    pub fn mul_dense(&self, block: &CMatrix) -> CMatrix {
        assert_eq!(self.n, block.rows, "sparse-dense dimension mismatch");
        let cols = block.cols;
        let mut out = CMatrix::zeros(self.n, cols);
        for i in 0..self.n {
            let out_row = &mut out.data[i * cols..(i + 1) * cols];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.values[k];
                let j = self.col_idx[k];
                for (o, &b) in out_row
                    .iter_mut()
                    .zip(&block.data[j * cols..(j + 1) * cols])
                {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Replaces `block` with `exp(scale · self) · block`.
    ///
    /// The interval is split so that each substep has `‖scale·H‖₁ ≤ 1/2`, and
    /// each substep sums the Taylor series until the update is below machine
    /// precision.
    pub fn expm_apply(&self, scale: C64, block: &mut CMatrix) {
        let norm = self.norm_one() * scale.norm();
        let substeps = if norm > 0.5 {
            Float::ceil(norm / 0.5) as usize
        } else {
            1
        };
        let s = scale / substeps as f64;
        for _ in 0..substeps {
            let mut term = block.clone();
            for k in 1..=40 {
                term = self.mul_dense(&term).scale(s / k as f64);
                let size = term.max_abs();
                for (b, &t) in block.data.iter_mut().zip(&term.data) {
                    *b += t;
                }
                if size <= f64::EPSILON * 1e-2 * block.max_abs() {
                    break;
                }
            }
        }
    }
}

/// Renormalizes a vector to unit 2-norm; zero vectors are returned unchanged.
pub fn normalize(v: &mut [C64]) {
    let norm = Float::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// `⟨u|v⟩`, antilinear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
