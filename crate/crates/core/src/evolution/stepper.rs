//! Backward Euler with the `u*` update eliminated:
//! `(A/τ + Bm + τ KᵀG⁻¹K) u_n = (A/τ) u_{n−1} + Kᵀ u*_{n−1}`,
//! `u*_n = u*_{n−1} − τ G⁻¹K u_n`.

use alloc::vec::Vec;

use crate::complex::{ComplexSegment, State};
use crate::error::{Error, Result};
use crate::linalg::SkylineCholesky;

/// Prefactored backward-Euler step for one segment and step size.
#[derive(Debug, Clone)]
pub struct BackwardEuler {
    seg: ComplexSegment,
    tau: f64,
    schur: SkylineCholesky,
    g: SkylineCholesky,
}

impl BackwardEuler {
    pub fn new(seg: &ComplexSegment, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::NonPositiveTau(tau));
        }
        let op = seg
            .a()
            .add_scaled(1.0 / tau, seg.bm(), 1.0)
            .add_scaled(1.0, &seg.coupling_form()?, tau);
        Ok(Self {
            seg: seg.clone(),
            tau,
            schur: op.cholesky()?,
            g: seg.g().cholesky()?,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn segment(&self) -> &ComplexSegment {
        &self.seg
    }

    pub fn step(&self, s: &State) -> Result<State> {
        self.seg.check_state(s)?;
        let tau = self.tau;
        let mut rhs = self.seg.a().mul_vec(&s.u);
        let kt = self.seg.k().tr_mul_vec(&s.ustar);
        for (r, k) in rhs.iter_mut().zip(&kt) {
            *r = *r / tau + k;
        }
        self.schur.solve_in_place(&mut rhs);
        let u = rhs;
        let mut ku = self.seg.k().mul_vec(&u);
        self.g.solve_in_place(&mut ku);
        let ustar: Vec<f64> = s.ustar.iter().zip(&ku).map(|(a, b)| a - tau * b).collect();
        Ok(State { u, ustar })
    }
}

pub fn backward_euler_step(seg: &ComplexSegment, s: &State, tau: f64) -> Result<State> {
    BackwardEuler::new(seg, tau)?.step(s)
}
