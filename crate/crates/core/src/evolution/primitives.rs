//! Initial values of the primitives `(w, w*)` from the saddle system
//! `Bm w₀ − Kᵀ w₀* = −A u₀`, `K w₀ = −G u*₀`, with `w₀*` chosen
//! γ-orthogonal to `ker Kᵀ`, i.e. compatible like `u*`. The time integral of
//! a compatible `u*` stays in that subspace, so re-solving at a later step
//! reproduces the summed primitives.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::compat::{CompatibilityAnalysis, Regularized};
use crate::complex::{ComplexSegment, PrimitivePair, State};
use crate::error::{Error, Result};
use crate::linalg::{symmetrize_dense, DenseCholesky, SkylineCholesky, SymMatrix, Tolerances};

pub fn initialize_primitives(seg: &ComplexSegment, s0: &State) -> Result<PrimitivePair> {
    let tol = Tolerances::default();
    let mut analysis = CompatibilityAnalysis::new(seg, tol.kernel)?;
    initialize_primitives_with(seg, s0, &mut analysis, &tol)
}

/// Same as [`initialize_primitives`], reusing a prepared analysis.
pub fn initialize_primitives_with(
    seg: &ComplexSegment,
    s0: &State,
    analysis: &mut CompatibilityAnalysis,
    tol: &Tolerances,
) -> Result<PrimitivePair> {
    seg.check_state(s0)?;
    let report = analysis.check(&s0.ustar)?;
    if !report.is_compatible(tol.compatibility) {
        return Err(Error::IncompatibleInitialData {
            residual: report.residual_norm,
            threshold: tol.compatibility * report.ustar_norm,
        });
    }
    PrimitiveSolver::new(seg, analysis.kernel())?.solve(s0)
}

/// Prefactored saddle solver; assumes compatible input.
#[derive(Debug, Clone)]
pub struct PrimitiveSolver {
    seg: ComplexSegment,
    z: DMatrix<f64>,
    normal: Regularized,
    /// `KᵀG⁻¹K + ZZᵀ`.
    coupling: Regularized,
    g: SkylineCholesky,
    kernel_block: Option<DenseCholesky>,
}

impl PrimitiveSolver {
    /// `z` is an orthonormal basis of `ker D`.
    pub fn new(seg: &ComplexSegment, z: &DMatrix<f64>) -> Result<Self> {
        let k = seg.k();
        let ktk = SymMatrix::symmetrized(&k.transpose().mul(k))?;
        let normal = Regularized::new(&ktk, z)?;
        let coupling = Regularized::new(&seg.coupling_form()?, z)?;
        let kernel_block = if z.ncols() > 0 {
            let bz = seg.bm().as_csr().mul_dense(z);
            let mut m = z.transpose() * &bz;
            symmetrize_dense(&mut m);
            Some(DenseCholesky::new(&m).map_err(|_| Error::SingularSaddle)?)
        } else {
            None
        };
        Ok(Self {
            seg: seg.clone(),
            z: z.clone(),
            normal,
            coupling,
            g: seg.g().cholesky()?,
            kernel_block,
        })
    }

    pub fn solve(&self, s: &State) -> Result<PrimitivePair> {
        let seg = &self.seg;
        seg.check_state(s)?;
        let k = seg.k();

        // particular solution of K w = −G u*, orthogonal to ker K
        let gu = seg.g().mul_vec(&s.ustar);
        let rhs: Vec<f64> = k.tr_mul_vec(&gu).iter().map(|v| -v).collect();
        let mut w = self.normal.solve(&rhs);

        let au = seg.a().mul_vec(&s.u);
        if let Some(chol) = &self.kernel_block {
            // fix the kernel component so that Bm w + A u ⊥ ker K
            let bw = seg.bm().mul_vec(&w);
            let r: Vec<f64> = au.iter().zip(&bw).map(|(a, b)| -(a + b)).collect();
            let zr = self.z.transpose() * DMatrix::from_column_slice(r.len(), 1, &r);
            let c = chol.solve(zr.as_slice());
            let zc = &self.z * DMatrix::from_column_slice(c.len(), 1, &c);
            for (wi, zi) in w.iter_mut().zip(zc.iter()) {
                *wi += zi;
            }
        }

        // Kᵀ w* = Bm w + A u with w* = G⁻¹K y
        let bw = seg.bm().mul_vec(&w);
        let r: Vec<f64> = bw.iter().zip(&au).map(|(a, b)| a + b).collect();
        let y = self.coupling.solve(&r);
        let mut wstar = k.mul_vec(&y);
        self.g.solve_in_place(&mut wstar);
        Ok(PrimitivePair { w, wstar })
    }
}
