//! Cholesky factorizations: an envelope (skyline) variant for sparse Gram
//! matrices and a plain dense one for small congruence-reduced problems.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::sparse::SymMatrix;
use crate::error::{Error, Result};

/// `M = L Lᵀ` with `L` stored row by row from its first nonzero column.
///
/// Fill-in stays inside the row envelope, so banded Gram matrices from
/// structured meshes factor in `O(n·b²)`.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
    min_pivot: f64,
}

impl SkylineCholesky {
    pub fn new(m: &SymMatrix) -> Result<Self> {
        let n = m.dim();
        let csr = m.as_csr();
        let mut first = Vec::with_capacity(n);
        for i in 0..n {
            let (cols, _) = csr.row(i);
            first.push(cols.first().map_or(i, |&j| j.min(i)));
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, vals) = csr.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[start[i] + (j - first[i])] = v;
                }
            }
        }

        let mut min_pivot = f64::INFINITY;
        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[row_i + (j - fi)];
                let ri = row_i + (lo - fi);
                let rj = start[j] + (lo - fj);
                for k in 0..(j - lo) {
                    s -= data[ri + k] * data[rj + k];
                }
                let ljj = data[start[j] + (j - fj)];
                data[row_i + (j - fi)] = s / ljj;
            }
            let diag_at = row_i + (i - fi);
            let mut d = data[diag_at];
            for k in row_i..diag_at {
                d -= data[k] * data[k];
            }
            if !(d > 0.0) {
                return Err(Error::NotSpd { index: i, pivot: d });
            }
            min_pivot = min_pivot.min(d);
            data[diag_at] = libm::sqrt(d);
        }
        Ok(Self {
            n,
            first,
            start,
            data,
            min_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest pivot `d_i` encountered (before the square root).
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n, "cholesky solve: rhs length");
        // L y = b
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = x[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                s -= l * x[fi + k];
            }
            x[i] = s / row[i - fi];
        }
        // Lᵀ x = y
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let xi = x[i] / row[i - fi];
            x[i] = xi;
            for (k, &l) in row[..i - fi].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }

    /// Solves for every column of `b`.
    pub fn solve_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = b.clone();
        for mut col in out.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        out
    }
}

/// Dense lower Cholesky factor.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    l: DMatrix<f64>,
}

impl DenseCholesky {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "cholesky columns",
                expected: n,
                found: m.ncols(),
            });
        }
        let mut l = m.clone();
        for j in 0..n {
            let mut d = l[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotSpd { index: j, pivot: d });
            }
            let ljj = libm::sqrt(d);
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = l[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        for j in 1..n {
            for i in 0..j {
                l[(i, j)] = 0.0;
            }
        }
        Ok(Self { l })
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Overwrites `b` with `L⁻¹ b`.
    pub fn solve_lower_in_place(&self, b: &mut DMatrix<f64>) {
        let n = self.l.nrows();
        for mut col in b.column_iter_mut() {
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.l[(i, k)] * col[k];
                }
                col[i] = s / self.l[(i, i)];
            }
        }
    }

    /// Overwrites `b` with `L⁻ᵀ b`.
    pub fn solve_upper_in_place(&self, b: &mut DMatrix<f64>) {
        let n = self.l.nrows();
        for mut col in b.column_iter_mut() {
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in (i + 1)..n {
                    s -= self.l[(k, i)] * col[k];
                }
                col[i] = s / self.l[(i, i)];
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut m = DMatrix::from_column_slice(b.len(), 1, b);
        self.solve_lower_in_place(&mut m);
        self.solve_upper_in_place(&mut m);
        m.as_slice().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::CsrMatrix;

    #[test]
    fn skyline_matches_dense_on_banded_matrix() {
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        t.push((0, 5, 0.5));
        t.push((5, 0, 0.5));
        let m = SymMatrix::new(CsrMatrix::from_triplets(n, n, &t).unwrap()).unwrap();
        let f = m.cholesky().unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let x = f.solve(&b);
        let r = m.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
        let dense = DenseCholesky::new(&m.to_dense()).unwrap();
        let xd = dense.solve(&b);
        for (a, c) in x.iter().zip(&xd) {
            assert!((a - c).abs() < 1e-13);
        }
    }

    #[test]
    fn indefinite_matrix_reports_pivot() {
        let m = SymMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).unwrap();
        match m.cholesky() {
            Err(Error::NotSpd { index, pivot }) => {
                assert_eq!(index, 1);
                assert!((pivot + 3.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(DenseCholesky::new(&m.to_dense()).is_err());
    }

    #[test]
    fn zero_row_is_not_spd() {
        let m = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(m.cholesky(), Err(Error::NotSpd { index: 1, .. })));
    }
}
