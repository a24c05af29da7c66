//! Spectral constants of a segment and the explicit decay certificate
//! `E₀(t) ≤ C′·e^{−c′(t−s)}·E₀(s)`.

use nalgebra::DMatrix;

use crate::complex::ComplexSegment;
use crate::error::{Error, Result};
use crate::linalg::{gen_eig_extremes, gen_eig_max_sparse, kernel_basis, SymMatrix, Tolerances};

/// Decay constants derived from `(c_β, C_β, C_P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub delta_star: f64,
    pub delta_double_star: f64,
    /// `C′`, always 3.
    pub prefactor: f64,
    /// `c′ = (2/3)·δ**`.
    pub rate: f64,
}

impl Certificate {
    /// Certified upper bound on `E₀(t)/E₀(s)` for `t − s = elapsed`.
    pub fn bound_factor(&self, elapsed: f64) -> f64 {
        self.prefactor * libm::exp(-self.rate * elapsed)
    }
}

/// All spectral constants of a segment together with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsReport {
    /// `c_β`: smallest eigenvalue of `Bm x = λ A x`.
    pub beta_lower: f64,
    /// `C_β`: largest eigenvalue of `Bm x = λ A x`.
    pub beta_upper: f64,
    /// `C_P` from the `KᵀG⁻¹K` denominator, used by the certificate.
    pub poincare: f64,
    /// `C_P` from the `DᵀHD` denominator, for comparison only.
    pub poincare_dhd: f64,
    pub certificate: Certificate,
    /// `dim Z_h = dim ker D`.
    pub kernel_dim: usize,
}

impl ConstantsReport {
    pub fn delta_star(&self) -> f64 {
        self.certificate.delta_star
    }

    pub fn delta_double_star(&self) -> f64 {
        self.certificate.delta_double_star
    }

    pub fn prefactor(&self) -> f64 {
        self.certificate.prefactor
    }

    pub fn rate(&self) -> f64 {
        self.certificate.rate
    }
}

/// `(c_β, C_β)` with `c_β‖u‖_α² ≤ ‖u‖_β² ≤ C_β‖u‖_α²`.
pub fn norm_equivalence_constants(seg: &ComplexSegment) -> Result<(f64, f64)> {
    gen_eig_extremes(&seg.bm().to_dense(), &seg.a().to_dense(), None)
}

/// Orthonormal basis of `Z_h = ker D`.
///
/// Large segments first try to certify injectivity sparsely: `σ_min(D)²`
/// from subspace iteration on `DᵀD`, `σ_max(D)²` bounded above by the row
/// sums of `|DᵀD|`. The dense SVD runs only if that fails.
pub fn kernel(seg: &ComplexSegment, tol: f64) -> DMatrix<f64> {
    let n1 = seg.n1();
    if n1 > SPARSE_POINCARE_MIN && sparse_injective(seg, tol) {
        return DMatrix::zeros(n1, 0);
    }
    kernel_basis(&seg.d().to_dense(), tol)
}

fn sparse_injective(seg: &ComplexSegment, tol: f64) -> bool {
    let d = seg.d();
    let Ok(dtd) = SymMatrix::symmetrized(&d.transpose().mul(d)) else {
        return false;
    };
    let upper = (0..dtd.dim())
        .map(|i| dtd.as_csr().row(i).1.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    match gen_eig_max_sparse(&SymMatrix::identity(dtd.dim()), &dtd) {
        Ok(inv_min) => inv_min > 0.0 && 1.0 / inv_min > tol * tol * upper,
        Err(_) => false,
    }
}

/// Basis of the β-orthogonal complement of `ker D`.
pub fn beta_complement_basis(seg: &ComplexSegment) -> DMatrix<f64> {
    complement_of(
        seg,
        &kernel(seg, Tolerances::default().kernel),
        Tolerances::default().kernel,
    )
}

fn complement_of(seg: &ComplexSegment, z: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n1 = seg.n1();
    if z.ncols() == 0 {
        return DMatrix::identity(n1, n1);
    }
    // {v : Zᵀ Bm v = 0}
    let bz = seg.bm().as_csr().mul_dense(z);
    kernel_basis(&bz.transpose(), tol)
}

/// Above this dimension a trivial kernel switches `C_P` to sparse subspace
/// iteration.
const SPARSE_POINCARE_MIN: usize = 256;

fn poincare_on(num: &SymMatrix, den: &SymMatrix, v: &DMatrix<f64>, full: bool) -> Result<f64> {
    if v.ncols() == 0 {
        return Err(Error::ZeroDifferential);
    }
    let res = if full && num.dim() > SPARSE_POINCARE_MIN {
        match gen_eig_max_sparse(num, den) {
            Ok(hi) => Ok((0.0, hi)),
            Err(Error::NoConvergence { .. }) => gen_eig_extremes(&num.to_dense(), &den.to_dense(), None),
            Err(e) => Err(e),
        }
    } else if full {
        gen_eig_extremes(&num.to_dense(), &den.to_dense(), None)
    } else {
        gen_eig_extremes(&num.to_dense(), &den.to_dense(), Some(v))
    };
    match res {
        Ok((_, hi)) => Ok(libm::sqrt(hi)),
        Err(Error::NotSpd { .. }) => Err(Error::ZeroDifferential),
        Err(e) => Err(e),
    }
}

/// `C_P,h` with `‖v‖_α ≤ C_P‖G⁻¹K v‖_γ` on the β-complement of `ker D`.
pub fn discrete_poincare_constant(seg: &ComplexSegment) -> Result<f64> {
    let tol = Tolerances::default().kernel;
    let z = kernel(seg, tol);
    let v = complement_of(seg, &z, tol);
    poincare_on(seg.a(), &seg.coupling_form()?, &v, z.ncols() == 0)
}

/// `C_P,h` with `‖v‖_α ≤ C_P‖d v‖_{γ⁻¹}` on the β-complement of `ker D`.
pub fn discrete_poincare_constant_dhd(seg: &ComplexSegment) -> Result<f64> {
    let tol = Tolerances::default().kernel;
    let z = kernel(seg, tol);
    let v = complement_of(seg, &z, tol);
    poincare_on(seg.a(), &seg.differential_form()?, &v, z.ncols() == 0)
}

/// Closed-form certificate from the three spectral constants.
pub fn decay_certificate(c_beta: f64, big_c_beta: f64, c_p: f64) -> Result<Certificate> {
    if !(c_beta > 0.0) {
        return Err(Error::NonPositiveInput("c_beta"));
    }
    if !(big_c_beta > 0.0) {
        return Err(Error::NonPositiveInput("C_beta"));
    }
    if !(c_p > 0.0) {
        return Err(Error::NonPositiveInput("C_P"));
    }
    if !(c_beta <= big_c_beta) {
        return Err(Error::NonPositiveInput("C_beta - c_beta"));
    }
    let delta_star = 0.5 * c_beta / (2.0 + c_p * c_beta);
    let pc = c_p * big_c_beta;
    let second = c_beta / (2.0 + 2.0 * big_c_beta / c_beta + pc * pc);
    let delta_double_star = delta_star.min(second);
    Ok(Certificate {
        delta_star,
        delta_double_star,
        prefactor: 3.0,
        rate: 2.0 * delta_double_star / 3.0,
    })
}

/// Every constant of the segment, using the default kernel tolerance.
pub fn constants(seg: &ComplexSegment) -> Result<ConstantsReport> {
    constants_with(seg, &Tolerances::default())
}

pub fn constants_with(seg: &ComplexSegment, tol: &Tolerances) -> Result<ConstantsReport> {
    let (beta_lower, beta_upper) = norm_equivalence_constants(seg)?;
    let z = kernel(seg, tol.kernel);
    let v = complement_of(seg, &z, tol.kernel);
    let full = z.ncols() == 0;
    let poincare = poincare_on(seg.a(), &seg.coupling_form()?, &v, full)?;
    let poincare_dhd = poincare_on(seg.a(), &seg.differential_form()?, &v, full)?;
    let certificate = decay_certificate(beta_lower, beta_upper.max(beta_lower), poincare)?;
    Ok(ConstantsReport {
        beta_lower,
        beta_upper,
        poincare,
        poincare_dhd,
        certificate,
        kernel_dim: z.ncols(),
    })
}
