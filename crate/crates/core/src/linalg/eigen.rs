//! Dense generalized symmetric-definite eigenproblems and SVD-based kernels.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SVD};

use super::cholesky::DenseCholesky;
use super::qr::HouseholderQr;
use super::sparse::{symmetrize_dense, SymMatrix};
use crate::error::{Error, Result};

/// Reduces `num x = λ den x` to a standard symmetric problem `C y = λ y` with
/// `C = L⁻¹ num L⁻ᵀ`, `den = L Lᵀ`.
fn reduce(num: &DMatrix<f64>, den: &DMatrix<f64>) -> Result<(DMatrix<f64>, DenseCholesky)> {
    if num.shape() != den.shape() || num.nrows() != num.ncols() {
        return Err(Error::DimensionMismatch {
            what: "generalized eigenproblem",
            expected: den.nrows(),
            found: num.nrows(),
        });
    }
    let chol = DenseCholesky::new(den)?;
    let mut x = num.clone();
    chol.solve_lower_in_place(&mut x);
    let mut c = x.transpose();
    chol.solve_lower_in_place(&mut c);
    symmetrize_dense(&mut c);
    Ok((c, chol))
}

fn restrict(m: &DMatrix<f64>, basis: &DMatrix<f64>) -> DMatrix<f64> {
    let mut r = basis.transpose() * (m * basis);
    symmetrize_dense(&mut r);
    r
}

/// Smallest and largest eigenvalue of `num x = λ den x`, optionally restricted
/// to the column span of `subspace`.
pub fn gen_eig_extremes(num: &DMatrix<f64>, den: &DMatrix<f64>, subspace: Option<&DMatrix<f64>>) -> Result<(f64, f64)> {
    let (c, _) = match subspace {
        Some(v) => {
            if v.ncols() == 0 {
                return Err(Error::EmptySubspace);
            }
            if v.nrows() != num.nrows() {
                return Err(Error::DimensionMismatch {
                    what: "subspace basis rows",
                    expected: num.nrows(),
                    found: v.nrows(),
                });
            }
            reduce(&restrict(num, v), &restrict(den, v))?
        }
        None => {
            if num.nrows() == 0 {
                return Err(Error::EmptySubspace);
            }
            reduce(num, den)?
        }
    };
    let eig = c.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Full generalized eigendecomposition: eigenvalues ascending, eigenvectors as
/// `den`-orthonormal columns.
pub fn gen_eig(num: &DMatrix<f64>, den: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let (c, chol) = reduce(num, den)?;
    let n = c.nrows();
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_fn(n, order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    chol.solve_upper_in_place(&mut vectors);
    Ok((values, vectors))
}

/// Orthonormal basis of `{x : ‖m x‖ ≤ tol·σ_max·‖x‖}` from a singular value
/// cutoff; a zero-column matrix when `m` is injective.
pub fn kernel_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if rows >= cols {
        let r = HouseholderQr::new(m.clone()).r();
        let sv = r.singular_values();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let cut = tol * smax;
        if smax > 0.0 && sv.iter().all(|&s| s > cut) {
            return DMatrix::zeros(cols, 0);
        }
        let svd = SVD::new(r, false, true);
        let vt = svd.v_t.expect("requested V");
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| smax == 0.0 || svd.singular_values[i] <= cut)
            .collect();
        let basis = DMatrix::from_fn(cols, keep.len(), |i, k| vt[(keep[k], i)]);
        return basis;
    }

    // Wide: the kernel is the orthogonal complement of the row space. Factor
    // mᵀ = Q R and rotate the trailing columns of Q together with the
    // rank-deficient directions of R.
    let qr = HouseholderQr::new(m.transpose());
    let r = qr.r();
    let svd = SVD::new(r, true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol * smax;
    let small: Vec<usize> = (0..rows)
        .filter(|&i| smax == 0.0 || svd.singular_values[i] <= cut)
        .collect();
    let k = small.len() + (cols - rows);
    let mut basis = DMatrix::zeros(cols, k);
    for (c, &i) in small.iter().enumerate() {
        for r in 0..rows {
            basis[(r, c)] = u[(r, i)];
        }
    }
    for t in 0..(cols - rows) {
        basis[(rows + t, small.len() + t)] = 1.0;
    }
    qr.apply_q(&mut basis);
    basis
}

const SUBSPACE_BLOCK: usize = 6;
const SUBSPACE_MAX_ITER: usize = 2000;
const SUBSPACE_RTOL: f64 = 1e-14;

/// Largest eigenvalue of `num x = λ den x` for sparse forms, by subspace
/// iteration with `den⁻¹ num` and Rayleigh–Ritz on a small block. Ritz
/// values approach the eigenvalue from below.
pub fn gen_eig_max_sparse(num: &SymMatrix, den: &SymMatrix) -> Result<f64> {
    let n = num.dim();
    if den.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "generalized eigenproblem",
            expected: den.dim(),
            found: n,
        });
    }
    if n == 0 {
        return Err(Error::EmptySubspace);
    }
    let chol = den.cholesky()?;
    let p = SUBSPACE_BLOCK.min(n);
    // Fixed, well-spread start block.
    let mut x = DMatrix::from_fn(n, p, |i, k| {
        let t = (i as f64 + 1.0) * (k as f64 + 1.0);
        libm::sin(0.7548776662 * t) + libm::cos(0.5698402910 * t * t)
    });
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..SUBSPACE_MAX_ITER {
        let y = chol.solve_dense(&num.as_csr().mul_dense(&x));
        let a = num.congruence(&y);
        let b = den.congruence(&y);
        let (vals, vecs) = gen_eig(&a, &b)?;
        let theta = vals[vals.len() - 1];
        x = y * vecs;
        if (theta - prev).abs() <= SUBSPACE_RTOL * theta.abs() {
            return Ok(theta);
        }
        prev = theta;
    }
    Err(Error::NoConvergence {
        iterations: SUBSPACE_MAX_ITER,
    })
}
