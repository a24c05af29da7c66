//! Compressed sparse row storage and the symmetric wrapper used for Gram
//! matrices.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::cholesky::SkylineCholesky;
use crate::error::{Error, Result};

/// Rectangular matrix in compressed sparse row format.
///
/// Column indices within a row are strictly increasing and no explicit zeros
/// are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        indptr.push(0);
        for (i, &d) in diag.iter().enumerate() {
            if d != 0.0 {
                indices.push(i);
                values.push(d);
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: n,
            ncols: n,
            indptr,
            indices,
            values,
        }
    }

    /// Assembles from `(row, col, value)` triplets, summing duplicates in
    /// input order. Entries that sum to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows];
        for &(i, j, _) in triplets {
            if i >= nrows {
                return Err(Error::DimensionMismatch {
                    what: "triplet row",
                    expected: nrows,
                    found: i,
                });
            }
            if j >= ncols {
                return Err(Error::DimensionMismatch {
                    what: "triplet column",
                    expected: ncols,
                    found: j,
                });
            }
            counts[i] += 1;
        }
        let mut rows: Vec<Vec<(usize, f64)>> = counts.iter().map(|&c| Vec::with_capacity(c)).collect();
        for &(i, j, v) in triplets {
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        for row in &mut rows {
            // stable sort keeps duplicate summation in input order
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.iter().peekable();
            while let Some(&(j, mut v)) = iter.next() {
                while let Some(&&(jn, vn)) = iter.peek() {
                    if jn != j {
                        break;
                    }
                    v += vn;
                    iter.next();
                }
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let (nrows, ncols) = m.shape();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = m[(i, j)];
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Iterates over stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "mul_vec: input length");
        assert_eq!(y.len(), self.nrows, "mul_vec: output length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// Computes `selfᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "tr_mul_vec: input length");
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.iter() {
            let p = next[j];
            indices[p] = i;
            values[p] = v;
            next[j] += 1;
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr,
            indices,
            values,
        }
    }

    /// Sparse product `self · rhs`.
    pub fn mul(&self, rhs: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "sparse product: inner dimension");
        let mut acc = vec![0.0; rhs.ncols];
        let mut mark = vec![usize::MAX; rhs.ncols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..self.nrows {
            pattern.clear();
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let (rcols, rvals) = rhs.row(k);
                for (&j, &b) in rcols.iter().zip(rvals) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                if acc[j] != 0.0 {
                    indices.push(j);
                    values.push(acc[j]);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: self.nrows,
            ncols: rhs.ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Dense product `self · rhs`.
    pub fn mul_dense(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.ncols, rhs.nrows(), "sparse-dense product: inner dimension");
        let mut out = DMatrix::zeros(self.nrows, rhs.ncols());
        for c in 0..rhs.ncols() {
            let x = rhs.column(c);
            for i in 0..self.nrows {
                let (cols, vals) = self.row(i);
                out[(i, c)] = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            }
        }
        out
    }

    /// Dense product `selfᵀ · rhs`.
    pub fn tr_mul_dense(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.nrows, rhs.nrows(), "sparse-dense product: inner dimension");
        let mut out = DMatrix::zeros(self.ncols, rhs.ncols());
        for c in 0..rhs.ncols() {
            for i in 0..self.nrows {
                let xi = rhs[(i, c)];
                if xi == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out[(j, c)] += v * xi;
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        if s == 0.0 {
            out = Self::zeros(self.nrows, self.ncols);
        }
        out
    }

    /// Scales row `i` by `s[i]`.
    pub fn scale_rows(&self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.nrows, "scale_rows: length");
        let mut out = self.clone();
        for i in 0..self.nrows {
            for p in out.indptr[i]..out.indptr[i + 1] {
                out.values[p] *= s[i];
            }
        }
        out
    }

    /// Entrywise `alpha·self + beta·other` on the union pattern.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Self {
        assert_eq!(self.shape(), other.shape(), "sparse sum: shapes");
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..self.nrows {
            let (ac, av) = self.row(i);
            let (bc, bv) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ac.len() || q < bc.len() {
                let (j, v) = if q >= bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                    p += 1;
                    (ac[p - 1], alpha * av[p - 1])
                } else if p >= ac.len() || bc[q] < ac[p] {
                    q += 1;
                    (bc[q - 1], beta * bv[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ac[p - 1], alpha * av[p - 1] + beta * bv[q - 1])
                };
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Returns the diagonal if the matrix is square with no off-diagonal entries.
    pub fn as_diagonal(&self) -> Option<Vec<f64>> {
        if self.nrows != self.ncols {
            return None;
        }
        let mut d = vec![0.0; self.nrows];
        for (i, j, v) in self.iter() {
            if i != j {
                return None;
            }
            d[i] = v;
        }
        Some(d)
    }
}

/// Square matrix whose stored pattern and values are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(CsrMatrix);

impl SymMatrix {
    /// Wraps a CSR matrix after checking squareness and exact symmetry.
    pub fn new(m: CsrMatrix) -> Result<Self> {
        if m.nrows != m.ncols {
            return Err(Error::DimensionMismatch {
                what: "symmetric matrix columns",
                expected: m.nrows,
                found: m.ncols,
            });
        }
        for (i, j, v) in m.iter() {
            if j > i && m.get(j, i) != v {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
            if j < i && m.get(j, i) == 0.0 {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
        Ok(Self(m))
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(CsrMatrix::from_dense(m))
    }

    /// Averages `m` with its transpose, removing roundoff asymmetry.
    pub fn symmetrized(m: &CsrMatrix) -> Result<Self> {
        if m.nrows != m.ncols {
            return Err(Error::DimensionMismatch {
                what: "symmetric matrix columns",
                expected: m.nrows,
                found: m.ncols,
            });
        }
        let avg = m.add_scaled(0.5, &m.transpose(), 0.5);
        // (a + b)/2 and (b + a)/2 round identically, so `avg` is exactly symmetric.
        Ok(Self(avg))
    }

    pub fn identity(n: usize) -> Self {
        Self(CsrMatrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(CsrMatrix::from_diagonal(diag))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows
    }

    pub fn as_csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.0.to_dense()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.0.mul_vec(x)
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "bilinear: left length");
        assert_eq!(y.len(), self.dim(), "bilinear: right length");
        let mut s = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.0.row(i);
            let row: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * y[j]).sum();
            s += xi * row;
        }
        s
    }

    /// Congruence `Vᵀ M V` for a dense basis `V`.
    pub fn congruence(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mv = self.0.mul_dense(v);
        let mut c = v.transpose() * mv;
        symmetrize_dense(&mut c);
        c
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scaled(s))
    }

    /// `alpha·self + beta·other`.
    pub fn add_scaled(&self, alpha: f64, other: &SymMatrix, beta: f64) -> Self {
        Self(self.0.add_scaled(alpha, &other.0, beta))
    }

    /// Envelope Cholesky factorization; fails with `NotSpd` on a non-positive pivot.
    pub fn cholesky(&self) -> Result<SkylineCholesky> {
        SkylineCholesky::new(self)
    }
}

/// Overwrites `m` with `(m + mᵀ)/2`.
pub fn symmetrize_dense(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
