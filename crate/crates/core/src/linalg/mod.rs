//! Symmetric linear-algebra kernels: SPD solves, generalized eigenvalue
//! extremes, kernel bases and the dense matrix exponential.

mod cholesky;
mod eigen;
mod expm;
mod qr;
mod sparse;

use alloc::vec::Vec;

pub use cholesky::{DenseCholesky, SkylineCholesky};
pub use eigen::{gen_eig, gen_eig_extremes, gen_eig_max_sparse, kernel_basis};
pub use expm::{expm, expm_apply, DENSE_LIMIT};
pub(crate) use sparse::dot;
pub use sparse::{symmetrize_dense, CsrMatrix, SymMatrix};

use crate::error::{Error, Result};

/// Relative tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular value cutoff, relative to the largest singular value.
    pub kernel: f64,
    /// Compatibility residual accepted by primitive initialization, relative
    /// to the γ-norm of the initial `u*`.
    pub compatibility: f64,
    /// Multiplicative slack on the certified decay bound.
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel: 1e-10,
            compatibility: 1e-8,
            bound_slack: 1e-8,
        }
    }
}

/// Solves `m x = rhs` for SPD `m`.
pub fn spd_solve(m: &SymMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            what: "spd_solve rhs",
            expected: m.dim(),
            found: rhs.len(),
        });
    }
    Ok(m.cholesky()?.solve(rhs))
}
