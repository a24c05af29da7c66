//! The discrete Hilbert-complex segment: Gram matrices of the weighted scalar
//! products on `V_h¹` and `W_h²`, the differential's coefficient matrix `D`,
//! and the coupling `K = M2·D` through which the adjoint enters weakly,
//! `(u*)ᵀ K v = ⟨u*, d v⟩`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetrize_dense, CsrMatrix, SymMatrix};

/// Immutable discrete complex segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSegment {
    a: SymMatrix,
    bm: SymMatrix,
    g: SymMatrix,
    m2: SymMatrix,
    h: SymMatrix,
    d: CsrMatrix,
    k: CsrMatrix,
}

impl ComplexSegment {
    /// Builds a segment from its Gram matrices and differential, computing
    /// `K = M2·D`.
    pub fn new(a: SymMatrix, bm: SymMatrix, g: SymMatrix, m2: SymMatrix, h: SymMatrix, d: CsrMatrix) -> Result<Self> {
        check_len("D rows", d.nrows(), m2.dim())?;
        let k = m2.as_csr().mul(&d);
        Self::with_coupling(a, bm, g, m2, h, d, k)
    }

    /// Builds a segment with an explicitly supplied coupling matrix. Use
    /// [`validate_segment`] to check it against `M2·D`.
    pub fn with_coupling(
        a: SymMatrix,
        bm: SymMatrix,
        g: SymMatrix,
        m2: SymMatrix,
        h: SymMatrix,
        d: CsrMatrix,
        k: CsrMatrix,
    ) -> Result<Self> {
        let n1 = a.dim();
        let n2 = g.dim();
        let expect = |what, m: usize, n: usize| {
            if m == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: m,
                })
            }
        };
        expect("Bm dimension", bm.dim(), n1)?;
        expect("M2 dimension", m2.dim(), n2)?;
        expect("H dimension", h.dim(), n2)?;
        expect("D rows", d.nrows(), n2)?;
        expect("D columns", d.ncols(), n1)?;
        expect("K rows", k.nrows(), n2)?;
        expect("K columns", k.ncols(), n1)?;
        Ok(Self { a, bm, g, m2, h, d, k })
    }

    /// Dimension of `V_h¹`.
    pub fn n1(&self) -> usize {
        self.a.dim()
    }

    /// Dimension of `W_h²`.
    pub fn n2(&self) -> usize {
        self.g.dim()
    }

    /// Gram matrix of `⟨α·,·⟩`.
    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    /// Gram matrix of `⟨β·,·⟩`.
    pub fn bm(&self) -> &SymMatrix {
        &self.bm
    }

    /// Gram matrix of `⟨γ·,·⟩`.
    pub fn g(&self) -> &SymMatrix {
        &self.g
    }

    /// Gram matrix of the unweighted `W²` product.
    pub fn m2(&self) -> &SymMatrix {
        &self.m2
    }

    /// Gram matrix of `⟨γ⁻¹·,·⟩`.
    pub fn h(&self) -> &SymMatrix {
        &self.h
    }

    pub fn d(&self) -> &CsrMatrix {
        &self.d
    }

    pub fn k(&self) -> &CsrMatrix {
        &self.k
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        check_len("state u", s.u.len(), self.n1())?;
        check_len("state u*", s.ustar.len(), self.n2())
    }

    pub fn check_primitive(&self, p: &PrimitivePair) -> Result<()> {
        check_len("primitive w", p.w.len(), self.n1())?;
        check_len("primitive w*", p.wstar.len(), self.n2())
    }

    /// `Kᵀ G⁻¹ K`, the squared γ-norm of `G⁻¹K v`. Sparse when `G` is diagonal.
    pub fn coupling_form(&self) -> Result<SymMatrix> {
        let kt = self.k.transpose();
        if let Some(g) = self.g.as_csr().as_diagonal() {
            if let Some(i) = g.iter().position(|&x| !(x > 0.0)) {
                return Err(Error::NotSpd { index: i, pivot: g[i] });
            }
            let inv: Vec<f64> = g.iter().map(|x| 1.0 / x).collect();
            return SymMatrix::symmetrized(&kt.mul(&self.k.scale_rows(&inv)));
        }
        let ginv_k = self.g.cholesky()?.solve_dense(&self.k.to_dense());
        let mut dense = kt.mul_dense(&ginv_k);
        symmetrize_dense(&mut dense);
        SymMatrix::from_dense(&dense)
    }

    /// `Dᵀ H D`, the squared `γ⁻¹`-norm of `d v`.
    pub fn differential_form(&self) -> Result<SymMatrix> {
        let hd = self.h.as_csr().mul(&self.d);
        SymMatrix::symmetrized(&self.d.transpose().mul(&hd))
    }

    /// Copy with the damping form scaled by `s`.
    pub fn with_scaled_damping(&self, s: f64) -> Self {
        Self {
            bm: self.bm.scaled(s),
            ..self.clone()
        }
    }

    /// Copy with the `α` form scaled by `s`.
    pub fn with_scaled_inertia(&self, s: f64) -> Self {
        Self {
            a: self.a.scaled(s),
            ..self.clone()
        }
    }
}

fn check_len(what: &'static str, found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}

/// Coefficients `(u, u*)` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub ustar: Vec<f64>,
}

impl State {
    pub fn new(u: Vec<f64>, ustar: Vec<f64>) -> Self {
        Self { u, ustar }
    }

    pub fn zeros(seg: &ComplexSegment) -> Self {
        Self {
            u: vec![0.0; seg.n1()],
            ustar: vec![0.0; seg.n2()],
        }
    }

    /// Concatenation `(u, u*)`.
    pub fn to_stacked(&self) -> Vec<f64> {
        let mut x = self.u.clone();
        x.extend_from_slice(&self.ustar);
        x
    }

    pub fn from_stacked(x: &[f64], n1: usize) -> Self {
        Self {
            u: x[..n1].to_vec(),
            ustar: x[n1..].to_vec(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u: self.u.iter().map(|v| v * s).collect(),
            ustar: self.ustar.iter().map(|v| v * s).collect(),
        }
    }
}

/// Time-integrated primitives `(w, w*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivePair {
    pub w: Vec<f64>,
    pub wstar: Vec<f64>,
}

impl PrimitivePair {
    pub fn zeros(seg: &ComplexSegment) -> Self {
        Self {
            w: vec![0.0; seg.n1()],
            wstar: vec![0.0; seg.n2()],
        }
    }
}

/// Outcome of one structural check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Smallest pivot for SPD checks, relative violation otherwise.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    /// Whether every check passed.
    pub fn usable(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const CAUCHY_SCHWARZ_SAMPLES: usize = 100;
const CAUCHY_SCHWARZ_SLACK: f64 = 1e-12;
const COUPLING_TOL: f64 = 1e-14;
const VALIDATION_SEED: u64 = 0x5eed_c0de;

/// Checks SPD-ness of every Gram matrix, `K = M2·D`, and the weighted-mass
/// Cauchy–Schwarz bound `(yᵀM2y)² ≤ (yᵀGy)(yᵀHy)`.
pub fn validate_segment(seg: &ComplexSegment) -> ValidationReport {
    let mut checks = Vec::with_capacity(7);
    for (name, m) in [
        ("A is SPD", &seg.a),
        ("Bm is SPD", &seg.bm),
        ("G is SPD", &seg.g),
        ("M2 is SPD", &seg.m2),
        ("H is SPD", &seg.h),
    ] {
        let (passed, magnitude) = match m.cholesky() {
            Ok(f) => (true, if m.dim() == 0 { 0.0 } else { f.min_pivot() }),
            Err(Error::NotSpd { pivot, .. }) => (false, pivot),
            Err(_) => (false, f64::NAN),
        };
        checks.push(Check {
            name,
            passed,
            magnitude,
        });
    }

    let m2d = seg.m2.as_csr().mul(&seg.d);
    let scale = m2d.max_abs().max(seg.k.max_abs());
    let diff = seg.k.add_scaled(1.0, &m2d, -1.0).max_abs();
    let rel = if scale > 0.0 { diff / scale } else { 0.0 };
    checks.push(Check {
        name: "coupling K = M2·D",
        passed: rel <= COUPLING_TOL,
        magnitude: rel,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let mut worst: f64 = 0.0;
    let n2 = seg.n2();
    let mut y = vec![0.0; n2];
    for _ in 0..if n2 == 0 { 0 } else { CAUCHY_SCHWARZ_SAMPLES } {
        y.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        let m = seg.m2.quad_form(&y);
        let denom = seg.g.quad_form(&y) * seg.h.quad_form(&y);
        let ratio = if denom > 0.0 { m * m / denom } else { f64::INFINITY };
        worst = worst.max(ratio - 1.0);
    }
    checks.push(Check {
        name: "Cauchy-Schwarz of weighted masses",
        passed: worst <= CAUCHY_SCHWARZ_SLACK,
        magnitude: worst.max(0.0),
    });
    ValidationReport { checks }
}

/// `E₀ = ½(uᵀA u + u*ᵀG u*)`.
pub fn energy(seg: &ComplexSegment, s: &State) -> Result<f64> {
    seg.check_state(s)?;
    Ok(0.5 * (seg.a.quad_form(&s.u) + seg.g.quad_form(&s.ustar)))
}

/// Dissipated power `uᵀBm u`.
pub fn damping_power(seg: &ComplexSegment, s: &State) -> Result<f64> {
    seg.check_state(s)?;
    Ok(seg.bm.quad_form(&s.u))
}

/// `E_δ = E₀ + δ·uᵀA w`.
pub fn modified_energy(seg: &ComplexSegment, s: &State, p: &PrimitivePair, delta: f64) -> Result<f64> {
    seg.check_primitive(p)?;
    let e0 = energy(seg, s)?;
    let aw = seg.a.mul_vec(&p.w);
    Ok(e0 + delta * dot(&s.u, &aw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, b: f64, g: f64, d: f64) -> ComplexSegment {
        let one = SymMatrix::identity(1);
        ComplexSegment::new(
            SymMatrix::from_diagonal(&[a]),
            SymMatrix::from_diagonal(&[b]),
            SymMatrix::from_diagonal(&[g]),
            one.clone(),
            SymMatrix::from_diagonal(&[1.0 / g]),
            CsrMatrix::from_diagonal(&[d]),
        )
        .unwrap()
    }

    #[test]
    fn unit_scalar_segment_is_valid() {
        let r = validate_segment(&scalar(1.0, 1.0, 1.0, 1.0));
        assert!(r.usable(), "{r:?}");
    }

    #[test]
    fn negative_inertia_fails_spd() {
        let r = validate_segment(&scalar(-1.0, 1.0, 1.0, 1.0));
        assert!(!r.usable());
        let failed: Vec<_> = r.failed().map(|c| c.name).collect();
        assert_eq!(failed, ["A is SPD"]);
        assert_eq!(r.checks[0].magnitude, -1.0);
    }

    #[test]
    fn perturbed_coupling_is_detected() {
        let s = scalar(1.0, 1.0, 1.0, 1.0);
        let bad = ComplexSegment::with_coupling(
            s.a.clone(),
            s.bm.clone(),
            s.g.clone(),
            s.m2.clone(),
            s.h.clone(),
            s.d.clone(),
            CsrMatrix::from_diagonal(&[1.0 + 1e-3]),
        )
        .unwrap();
        let r = validate_segment(&bad);
        let failed: Vec<_> = r.failed().map(|c| c.name).collect();
        assert_eq!(failed, ["coupling K = M2·D"]);
        assert!((r.checks[5].magnitude - 1e-3 / (1.0 + 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_weighted_masses_fail_cauchy_schwarz() {
        let one = SymMatrix::identity(1);
        let seg = ComplexSegment::new(
            one.clone(),
            one.clone(),
            one.clone(),
            one.clone(),
            SymMatrix::from_diagonal(&[0.5]),
            CsrMatrix::identity(1),
        )
        .unwrap();
        assert!(!validate_segment(&seg).usable());
    }

    #[test]
    fn dimension_checks() {
        let one = SymMatrix::identity(1);
        let err = ComplexSegment::new(
            one.clone(),
            SymMatrix::identity(2),
            one.clone(),
            one.clone(),
            one,
            CsrMatrix::identity(1),
        );
        assert!(matches!(
            err,
            Err(Error::DimensionMismatch {
                what: "Bm dimension",
                ..
            })
        ));
        let s = scalar(1.0, 1.0, 1.0, 1.0);
        assert!(energy(&s, &State::new(vec![1.0, 2.0], vec![0.0])).is_err());
    }

    #[test]
    fn energy_examples() {
        let s = scalar(2.0, 1.0, 3.0, 1.0);
        assert_eq!(energy(&s, &State::new(vec![1.0], vec![2.0])).unwrap(), 7.0);
        assert_eq!(energy(&s, &State::zeros(&s)).unwrap(), 0.0);
        let seg = ComplexSegment::new(
            SymMatrix::identity(2),
            SymMatrix::identity(2),
            SymMatrix::identity(1),
            SymMatrix::identity(1),
            SymMatrix::identity(1),
            CsrMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, -1.0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(energy(&seg, &State::new(vec![3.0, 4.0], vec![0.0])).unwrap(), 12.5);
    }

    #[test]
    fn damping_power_examples() {
        let seg = ComplexSegment::new(
            SymMatrix::identity(2),
            SymMatrix::identity(2),
            SymMatrix::identity(1),
            SymMatrix::identity(1),
            SymMatrix::identity(1),
            CsrMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, -1.0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            damping_power(&seg, &State::new(vec![1.0, 1.0], vec![0.0])).unwrap(),
            2.0
        );
        assert_eq!(damping_power(&seg, &State::zeros(&seg)).unwrap(), 0.0);
        let weighted = ComplexSegment {
            bm: SymMatrix::from_diagonal(&[2.0, 4.0]),
            ..seg
        };
        assert_eq!(
            damping_power(&weighted, &State::new(vec![1.0, 2.0], vec![0.0])).unwrap(),
            18.0
        );
    }

    #[test]
    fn modified_energy_examples() {
        let s = scalar(1.0, 1.0, 1.0, 1.0);
        let st = State::new(vec![1.0], vec![0.0]);
        let p = PrimitivePair {
            w: vec![1.0],
            wstar: vec![0.0],
        };
        assert!((modified_energy(&s, &st, &p, 0.1).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(modified_energy(&s, &st, &p, 0.0).unwrap(), energy(&s, &st).unwrap());
        assert_eq!(
            modified_energy(&s, &State::zeros(&s), &PrimitivePair::zeros(&s), 0.3).unwrap(),
            0.0
        );
    }
}
