//! Seeded initial data, normalized to unit `E₀`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::complex::{energy, ComplexSegment, State};
use crate::error::{Error, Result};
use crate::linalg::gen_eig;

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn normalized(seg: &ComplexSegment, s: State) -> Result<State> {
    let e = energy(seg, &s)?;
    if !(e > 0.0) {
        return Ok(s);
    }
    Ok(s.scaled(1.0 / libm::sqrt(e)))
}

/// `u₀ ~ N(0, I)`, `u*₀ = G⁻¹K g` with `g ~ N(0, I)`, so `G u*₀ ∈ range K`.
pub fn random_compatible(seg: &ComplexSegment, seed: u64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = gaussian(&mut rng, seg.n1());
    let g = gaussian(&mut rng, seg.n1());
    let ustar = seg.g().cholesky()?.solve(&seg.k().mul_vec(&g));
    normalized(seg, State { u, ustar })
}

/// Independent Gaussian `u₀`, `u*₀`; generally incompatible.
pub fn random_raw(seg: &ComplexSegment, seed: u64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = gaussian(&mut rng, seg.n1());
    let ustar = gaussian(&mut rng, seg.n2());
    normalized(seg, State { u, ustar })
}

/// `u₀` the `index`-th eigenvector of `KᵀG⁻¹K v = ω² A v` (ascending ω),
/// `u*₀ = 0`.
pub fn mode(seg: &ComplexSegment, index: usize) -> Result<State> {
    if index >= seg.n1() {
        return Err(Error::ModeOutOfRange { index, dim: seg.n1() });
    }
    let (_, vecs) = gen_eig(&seg.coupling_form()?.to_dense(), &seg.a().to_dense())?;
    let mut u: Vec<f64> = vecs.column(index).iter().copied().collect();
    // fix the sign so that the largest entry is positive
    let (imax, _) = u.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, &v)| {
        if libm::fabs(v) > bv {
            (i, libm::fabs(v))
        } else {
            (bi, bv)
        }
    });
    if u[imax] < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    normalized(
        seg,
        State {
            u,
            ustar: alloc::vec![0.0; seg.n2()],
        },
    )
}
