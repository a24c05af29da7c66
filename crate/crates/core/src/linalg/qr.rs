//! Householder QR for tall matrices, keeping the reflectors so the full
//! orthogonal factor can be applied without forming it.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

pub(crate) struct HouseholderQr {
    /// Reflector vectors below the diagonal, `R` on and above it.
    packed: DMatrix<f64>,
    taus: Vec<f64>,
}

impl HouseholderQr {
    /// Factors an `m × n` matrix with `m ≥ n`.
    pub fn new(mut a: DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        debug_assert!(m >= n);
        let mut taus = vec![0.0; n];
        let mut v = vec![0.0; m];
        for k in 0..n {
            let (tau, beta) = {
                let col = &a.as_slice()[k * m + k..(k + 1) * m];
                let alpha = col[0];
                let tail: f64 = col[1..].iter().map(|x| x * x).sum();
                if tail == 0.0 {
                    (0.0, alpha)
                } else {
                    let norm = libm::sqrt(alpha * alpha + tail);
                    let beta = if alpha >= 0.0 { -norm } else { norm };
                    let scale = 1.0 / (alpha - beta);
                    v[k] = 1.0;
                    for (dst, src) in v[k + 1..m].iter_mut().zip(&col[1..]) {
                        *dst = src * scale;
                    }
                    ((beta - alpha) / beta, beta)
                }
            };
            taus[k] = tau;
            if tau != 0.0 {
                let vk = &v[k..m];
                for j in (k + 1)..n {
                    let cj = &mut a.as_mut_slice()[j * m + k..(j + 1) * m];
                    let s: f64 = tau * vk.iter().zip(cj.iter()).map(|(x, y)| x * y).sum::<f64>();
                    for (y, x) in cj.iter_mut().zip(vk) {
                        *y -= s * x;
                    }
                }
                let ck = &mut a.as_mut_slice()[k * m + k..(k + 1) * m];
                ck[0] = beta;
                ck[1..].copy_from_slice(&vk[1..]);
            }
        }
        Self { packed: a, taus }
    }

    /// Upper triangular `n × n` factor.
    pub fn r(&self) -> DMatrix<f64> {
        let n = self.packed.ncols();
        DMatrix::from_fn(n, n, |i, j| if i <= j { self.packed[(i, j)] } else { 0.0 })
    }

    /// Overwrites `x` (`m` rows) with `Q x`, `Q` the full `m × m` orthogonal factor.
    pub fn apply_q(&self, x: &mut DMatrix<f64>) {
        let m = self.packed.nrows();
        assert_eq!(x.nrows(), m, "apply_q: row count");
        for k in (0..self.taus.len()).rev() {
            let tau = self.taus[k];
            if tau == 0.0 {
                continue;
            }
            let vcol = &self.packed.as_slice()[k * m + k..(k + 1) * m];
            for mut col in x.column_iter_mut() {
                let c = &mut col.as_mut_slice()[k..];
                let mut s = c[0];
                for (y, v) in c[1..].iter().zip(&vcol[1..]) {
                    s += y * v;
                }
                s *= tau;
                c[0] -= s;
                for (y, v) in c[1..].iter_mut().zip(&vcol[1..]) {
                    *y -= s * v;
                }
            }
        }
    }
}
