//! Dense and sparse complex matrices.
//!
//! `CMatrix` is a row-major dense matrix, `CsrMatrix` a compressed sparse
//! row matrix. `Operator` wraps either one behind a common interface so the
//! walk operators can switch representation by size without changing the
//! code that uses them.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
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
        CMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from real rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
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

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[C64]) {
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            m.set_column(j, col);
        }
        m
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&CMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        CMatrix { rows, cols, data }
    }

    pub fn hstack(blocks: &[&CMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = CMatrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    m[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference and where it occurs.
    pub fn max_abs_diff_at(&self, other: &CMatrix) -> (f64, usize, usize) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut best = (0.0, 0, 0);
        for (idx, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            let d = (a - b).norm();
            if d > best.0 {
                best = (d, idx / self.cols.max(1), idx % self.cols.max(1));
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.max_abs_diff_at(other).0
    }

    pub fn hermitian_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        let mut triplets = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self[(i, j)];
                if v != ZERO {
                    triplets.push((i, j, v));
                }
            }
        }
        CsrMatrix::from_triplets(self.rows, self.cols, &triplets)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<C64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            assert!(i < rows && j < cols, "triplet ({i}, {j}) out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().expect("entry present") += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, ONE)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows)
            .flat_map(move |i| (self.indptr[i]..self.indptr[i + 1]).map(move |k| (i, self.indices[k], self.values[k])))
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    /// `y = A x`; returns the number of multiply-adds performed.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) -> usize {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi = acc;
        }
        self.nnz()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn adjoint(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.cols, self.rows, &triplets)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= s;
        }
        m
    }

    /// Sparse product. Structural entries are kept even when they cancel,
    /// so the pattern of `A B` is the boolean product of the patterns.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.rows, "sparse matmul dimension mismatch");
        let mut triplets = Vec::new();
        let mut acc = vec![ZERO; other.cols];
        let mut seen = vec![false; other.cols];
        let mut touched = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row_entries(i) {
                for (j, b) in other.row_entries(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                triplets.push((i, j, acc[j]));
                acc[j] = ZERO;
                seen[j] = false;
            }
            touched.clear();
        }
        CsrMatrix::from_triplets(self.rows, other.cols, &triplets)
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut triplets: Vec<_> = self.triplets().collect();
        triplets.extend(other.triplets());
        CsrMatrix::from_triplets(self.rows, self.cols, &triplets)
    }

    pub fn mul_dense(&self, block: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, block.rows());
        let mut out = CMatrix::zeros(self.rows, block.cols());
        for i in 0..self.rows {
            for (k, a) in self.row_entries(i) {
                for j in 0..block.cols() {
                    out[(i, j)] += a * block[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint_mul_dense(&self, block: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, block.rows());
        let mut out = CMatrix::zeros(self.cols, block.cols());
        for i in 0..self.rows {
            for (k, a) in self.row_entries(i) {
                let a = a.conj();
                for j in 0..block.cols() {
                    out[(k, j)] += a * block[(i, j)];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// Adds `delta` to entry `(i, j)`, inserting it when absent.
    pub fn perturb(&mut self, i: usize, j: usize, delta: C64) {
        let mut triplets: Vec<_> = self.triplets().collect();
        triplets.push((i, j, delta));
        *self = CsrMatrix::from_triplets(self.rows, self.cols, &triplets);
    }
}

/// A linear map stored densely or sparsely.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Dense(CMatrix),
    Sparse(CsrMatrix),
}

impl Operator {
    pub fn rows(&self) -> usize {
        match self {
            Operator::Dense(m) => m.rows(),
            Operator::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Operator::Dense(m) => m.cols(),
            Operator::Sparse(m) => m.cols(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Operator::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match self {
            Operator::Dense(m) => m.rows() * m.cols(),
            Operator::Sparse(m) => m.nnz(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Operator::Dense(m) => m.matvec(x),
            Operator::Sparse(m) => m.matvec(x),
        }
    }

    /// `y = A x`, returning the number of multiply-adds.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) -> usize {
        match self {
            Operator::Dense(m) => {
                y.copy_from_slice(&m.matvec(x));
                m.rows() * m.cols()
            }
            Operator::Sparse(m) => m.matvec_into(x, y),
        }
    }

    pub fn apply_block(&self, block: &CMatrix) -> CMatrix {
        match self {
            Operator::Dense(m) => m.matmul(block),
            Operator::Sparse(m) => m.mul_dense(block),
        }
    }

    pub fn apply_adjoint_block(&self, block: &CMatrix) -> CMatrix {
        match self {
            Operator::Dense(m) => m.adjoint().matmul(block),
            Operator::Sparse(m) => m.adjoint_mul_dense(block),
        }
    }

    pub fn adjoint(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m.adjoint()),
            Operator::Sparse(m) => Operator::Sparse(m.adjoint()),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            Operator::Dense(m) => m.to_sparse(),
            Operator::Sparse(m) => m.clone(),
        }
    }

    /// `self * other`; the result is sparse only when both factors are.
    pub fn compose(&self, other: &Operator) -> Operator {
        match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => Operator::Sparse(a.matmul(b)),
            (a, b) => Operator::Dense(a.apply_block(&b.to_dense())),
        }
    }

    pub fn perturb(&mut self, i: usize, j: usize, delta: C64) {
        match self {
            Operator::Dense(m) => m[(i, j)] += delta,
            Operator::Sparse(m) => m.perturb(i, j, delta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sparse_and_dense_products_agree() {
        let a = CMatrix::from_fn(3, 4, |i, j| c((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let b = CMatrix::from_fn(4, 2, |i, j| c(1.0 / (1.0 + (i + j) as f64), 0.5));
        let dense = a.matmul(&b);
        let sparse = a.to_sparse().matmul(&b.to_sparse()).to_dense();
        assert!(dense.max_abs_diff(&sparse) < 1e-12);
        assert!(dense.max_abs_diff(&a.to_sparse().mul_dense(&b)) < 1e-12);
        let adj = a.to_sparse().adjoint_mul_dense(&CMatrix::identity(3));
        assert!(adj.max_abs_diff(&a.adjoint()) < 1e-15);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, ONE), (0, 1, ONE), (1, 0, c(0.0, 1.0))]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.to_dense()[(0, 1)], c(2.0, 0.0));
    }

    #[test]
    fn stacking_shapes() {
        let a = CMatrix::identity(2);
        let b = CMatrix::zeros(3, 2);
        assert_eq!(CMatrix::vstack(&[&a, &b]).rows(), 5);
        assert_eq!(CMatrix::hstack(&[&a, &a]).cols(), 4);
    }
}
