//! Compatibility of `u*₀`: the saddle system for the primitives is solvable
//! iff `G u*₀ ∈ range K`. The compatible subspace `{u* : G u* ∈ range K}` is
//! the γ-orthogonal complement of `ker Kᵀ`, and components in `ker Kᵀ` are
//! conserved by the flow.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::complex::ComplexSegment;
use crate::error::{Error, Result};
use crate::linalg::{dot, kernel_basis, DenseCholesky, SkylineCholesky, SymMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    /// γ-norm of the component of `u*` outside the compatible subspace.
    pub residual_norm: f64,
    /// `Yᵀ G u*` for an orthonormal basis `Y` of `ker Kᵀ`.
    pub conserved_moments: Vec<f64>,
    /// γ-norm of `u*` itself.
    pub ustar_norm: f64,
}

impl CompatibilityReport {
    /// Whether the residual is within `tol` relative to `‖u*‖_γ`.
    pub fn is_compatible(&self, tol: f64) -> bool {
        self.residual_norm <= tol * self.ustar_norm
    }

    /// Energy of the conserved incompatible component, `½‖u* − P u*‖_γ²`.
    pub fn persistent_energy(&self) -> f64 {
        0.5 * self.residual_norm * self.residual_norm
    }
}

/// SPD solver for `N + Z Zᵀ`, sparse when `Z` is empty.
#[derive(Debug, Clone)]
pub(crate) enum Regularized {
    Sparse(SkylineCholesky),
    Dense(DenseCholesky),
}

impl Regularized {
    pub fn new(n: &SymMatrix, z: &DMatrix<f64>) -> Result<Self> {
        if z.ncols() == 0 {
            return Ok(Self::Sparse(n.cholesky()?));
        }
        let m = n.to_dense() + z * z.transpose();
        Ok(Self::Dense(DenseCholesky::new(&m)?))
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Self::Sparse(f) => f.solve(b),
            Self::Dense(f) => f.solve(b),
        }
    }
}

/// Factorizations reused by every compatibility query on one segment.
#[derive(Debug, Clone)]
pub struct CompatibilityAnalysis {
    seg: ComplexSegment,
    g: SkylineCholesky,
    normal: Regularized,
    /// Orthonormal basis of `ker D`.
    z: DMatrix<f64>,
    /// Orthonormal basis of `ker Kᵀ`, computed on first use.
    y: Option<DMatrix<f64>>,
    kernel_tol: f64,
}

impl CompatibilityAnalysis {
    pub fn new(seg: &ComplexSegment, kernel_tol: f64) -> Result<Self> {
        let z = crate::spectral::kernel(seg, kernel_tol);
        let normal = Regularized::new(&seg.coupling_form()?, &z)?;
        Ok(Self {
            seg: seg.clone(),
            g: seg.g().cholesky()?,
            normal,
            z,
            y: None,
            kernel_tol,
        })
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.z
    }

    /// Orthonormal basis of `ker Kᵀ`.
    pub fn incompatible_basis(&mut self) -> &DMatrix<f64> {
        let tol = self.kernel_tol;
        let k = &self.seg;
        self.y
            .get_or_insert_with(|| kernel_basis(&k.k().transpose().to_dense(), tol))
    }

    /// `G⁻¹ x`.
    pub fn g_solve(&self, x: &[f64]) -> Vec<f64> {
        self.g.solve(x)
    }

    /// γ-orthogonal projection onto the compatible subspace.
    pub fn project(&self, ustar: &[f64]) -> Result<Vec<f64>> {
        if ustar.len() != self.seg.n2() {
            return Err(Error::DimensionMismatch {
                what: "u* length",
                expected: self.seg.n2(),
                found: ustar.len(),
            });
        }
        let x = self.normal.solve(&self.seg.k().tr_mul_vec(ustar));
        Ok(self.g.solve(&self.seg.k().mul_vec(&x)))
    }

    pub fn check(&mut self, ustar: &[f64]) -> Result<CompatibilityReport> {
        let p = self.project(ustar)?;
        let r: Vec<f64> = ustar.iter().zip(&p).map(|(a, b)| a - b).collect();
        let residual_norm = libm::sqrt(self.seg.g().quad_form(&r).max(0.0));
        let ustar_norm = libm::sqrt(self.seg.g().quad_form(ustar).max(0.0));
        let conserved_moments = self.moments(ustar)?;
        Ok(CompatibilityReport {
            residual_norm,
            conserved_moments,
            ustar_norm,
        })
    }

    /// `Yᵀ G u*`.
    pub fn moments(&mut self, ustar: &[f64]) -> Result<Vec<f64>> {
        if ustar.len() != self.seg.n2() {
            return Err(Error::DimensionMismatch {
                what: "u* length",
                expected: self.seg.n2(),
                found: ustar.len(),
            });
        }
        let gu = self.seg.g().mul_vec(ustar);
        let n2 = gu.len();
        let y = self.incompatible_basis();
        if n2 == 0 {
            return Ok(alloc::vec![0.0; y.ncols()]);
        }
        Ok(y.as_slice().chunks_exact(n2).map(|col| dot(col, &gu)).collect())
    }
}

pub fn compatibility_check(seg: &ComplexSegment, ustar0: &[f64]) -> Result<CompatibilityReport> {
    CompatibilityAnalysis::new(seg, crate::linalg::Tolerances::default().kernel)?.check(ustar0)
}

/// γ-orthogonal projection of `ustar0` onto `{u* : G u* ∈ range K}`.
pub fn project_compatible(seg: &ComplexSegment, ustar0: &[f64]) -> Result<Vec<f64>> {
    CompatibilityAnalysis::new(seg, crate::linalg::Tolerances::default().kernel)?.project(ustar0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_membrane_1d, build_network, MembraneSpec, NetworkSpec};

    #[test]
    fn two_element_membrane_projection() {
        let s = build_membrane_1d(&MembraneSpec::unit(1, 2)).unwrap();
        let p = project_compatible(&s, &[1.0, 0.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] + 0.5).abs() < 1e-15);
        let r = compatibility_check(&s, &[1.0, 0.0]).unwrap();
        // residual (½, ½) with G = diag(½, ½)
        assert!((r.residual_norm - 0.5).abs() < 1e-15);
        assert_eq!(r.conserved_moments.len(), 1);
        assert!((r.conserved_moments[0].abs() - 0.5 * core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let r0 = compatibility_check(&s, &[0.0, 0.0]).unwrap();
        assert_eq!(r0.residual_norm, 0.0);
    }

    #[test]
    fn range_elements_are_compatible() {
        let s = build_membrane_1d(&MembraneSpec::unit(1, 6)).unwrap();
        let x = [0.3, -1.0, 2.0, 0.5, 0.1];
        let ustar = s.d().mul_vec(&x);
        let r = compatibility_check(&s, &ustar).unwrap();
        assert!(r.residual_norm <= 1e-12 * r.ustar_norm);
        assert!(r.conserved_moments.iter().all(|m| m.abs() < 1e-12));
        let p = project_compatible(&s, &ustar).unwrap();
        for (a, b) in p.iter().zip(&ustar) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn annihilated_component_projects_to_zero() {
        let s = build_membrane_1d(&MembraneSpec::unit(1, 2)).unwrap();
        let p = project_compatible(&s, &[1.0, 1.0]).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn networks_are_always_compatible() {
        for spec in [NetworkSpec::unit_loop(), NetworkSpec::random(5, 42)] {
            let s = build_network(&spec).unwrap();
            let ustar: Vec<f64> = (0..s.n2()).map(|i| 1.0 + i as f64).collect();
            let r = compatibility_check(&s, &ustar).unwrap();
            assert!(r.residual_norm <= 1e-12 * r.ustar_norm);
            assert!(r.conserved_moments.is_empty());
        }
    }
}
