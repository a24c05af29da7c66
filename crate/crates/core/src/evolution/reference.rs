//! Exact semi-discrete flow `∂_t x = 𝔸 x` with
//! `𝔸 = [[−A⁻¹Bm, A⁻¹Kᵀ], [−G⁻¹K, 0]]`, propagated by the dense exponential.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::complex::{ComplexSegment, PrimitivePair, State};
use crate::error::{Error, Result};
use crate::linalg::{expm, DENSE_LIMIT};

fn check_size(seg: &ComplexSegment) -> Result<()> {
    let n = seg.n1() + seg.n2();
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimitExceeded {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Dense block generator of the semi-discrete system.
pub fn generator(seg: &ComplexSegment) -> Result<DMatrix<f64>> {
    check_size(seg)?;
    let (n1, n2) = (seg.n1(), seg.n2());
    let a = seg.a().cholesky()?;
    let g = seg.g().cholesky()?;
    let ainv_b = a.solve_dense(&seg.bm().to_dense());
    let ainv_kt = a.solve_dense(&seg.k().transpose().to_dense());
    let ginv_k = g.solve_dense(&seg.k().to_dense());
    let mut m = DMatrix::zeros(n1 + n2, n1 + n2);
    m.view_mut((0, 0), (n1, n1)).copy_from(&(-ainv_b));
    m.view_mut((0, n1), (n1, n2)).copy_from(&ainv_kt);
    m.view_mut((n1, 0), (n2, n1)).copy_from(&(-ginv_k));
    Ok(m)
}

/// `e^{t𝔸} s₀`.
pub fn reference_solution(seg: &ComplexSegment, s0: &State, t: f64) -> Result<State> {
    seg.check_state(s0)?;
    let x = crate::linalg::expm_apply(&generator(seg)?, &s0.to_stacked(), t)?;
    Ok(State::from_stacked(&x, seg.n1()))
}

/// Repeated application of `e^{h𝔸}` on a uniform grid. The primitives obey
/// the same equations, so they are advanced by the same propagator.
#[derive(Debug, Clone)]
pub struct ReferencePropagator {
    n1: usize,
    step: DMatrix<f64>,
    h: f64,
}

impl ReferencePropagator {
    pub fn new(seg: &ComplexSegment, h: f64) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::NonPositiveInput("sampling step must be non-negative"));
        }
        let step = expm(&(generator(seg)? * h))?;
        Ok(Self { n1: seg.n1(), step, h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.step * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    pub fn advance(&self, s: &State) -> State {
        State::from_stacked(&self.apply(&s.to_stacked()), self.n1)
    }

    pub fn advance_primitive(&self, p: &PrimitivePair) -> PrimitivePair {
        let mut x = p.w.clone();
        x.extend_from_slice(&p.wstar);
        let y = self.apply(&x);
        PrimitivePair {
            w: y[..self.n1].to_vec(),
            wstar: y[self.n1..].to_vec(),
        }
    }

    /// `samples + 1` states starting at `s0`.
    pub fn sample(&self, s0: &State, samples: usize) -> Vec<State> {
        let mut out = Vec::with_capacity(samples + 1);
        out.push(s0.clone());
        for _ in 0..samples {
            let next = self.advance(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_network, NetworkSpec};
    use alloc::vec;

    #[test]
    fn unit_loop_generator_and_decay() {
        let s = build_network(&NetworkSpec::unit_loop()).unwrap();
        let g = generator(&s).unwrap();
        assert_eq!(g.as_slice(), &[-1.0, -1.0, 1.0, 0.0]);
        let s0 = State::new(vec![1.0], vec![0.0]);
        assert_eq!(reference_solution(&s, &s0, 0.0).unwrap(), s0);
        // closed form for λ² + λ + 1 = 0, u(0) = 1, u*(0) = 0:
        // u = e^{−t/2}(cos ωt − sin ωt / (2ω)), ω = √3/2
        let w = libm::sqrt(3.0) / 2.0;
        for &t in &[0.5, 2.0, 7.0] {
            let x = reference_solution(&s, &s0, t).unwrap();
            let u = libm::exp(-t / 2.0) * (libm::cos(w * t) - libm::sin(w * t) / (2.0 * w));
            let us = -libm::exp(-t / 2.0) * libm::sin(w * t) / w;
            assert!((x.u[0] - u).abs() < 1e-12 && (x.ustar[0] - us).abs() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_stays_put() {
        let s = build_network(&NetworkSpec::unit_loop()).unwrap();
        let x = reference_solution(&s, &State::zeros(&s), 3.0).unwrap();
        assert_eq!(x, State::zeros(&s));
    }

    #[test]
    fn propagator_matches_direct_exponential() {
        let s = build_network(&NetworkSpec::random(4, 3)).unwrap();
        let s0 = State::new(vec![1.0; s.n1()], vec![0.5; s.n2()]);
        let p = ReferencePropagator::new(&s, 0.25).unwrap();
        let xs = p.sample(&s0, 8);
        let direct = reference_solution(&s, &s0, 2.0).unwrap();
        for (a, b) in xs[8].to_stacked().iter().zip(direct.to_stacked()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
