//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, following Higham (2005).

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest generator dimension accepted by the dense exponential.
pub const DENSE_LIMIT: usize = 2000;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square dense matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "expm columns",
            expected: n,
            found: a.ncols(),
        });
    }
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimitExceeded {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;

    for &(m, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let mut powers: Vec<DMatrix<f64>> = Vec::with_capacity(m / 2 + 1);
            powers.push(id.clone());
            powers.push(a2.clone());
            while powers.len() <= m / 2 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let mut u_inner = DMatrix::zeros(n, n);
            let mut v = DMatrix::zeros(n, n);
            for (k, p) in powers.iter().enumerate() {
                u_inner += p * b[2 * k + 1];
                v += p * b[2 * k];
            }
            let u = a * u_inner;
            return pade_solve(&u, &v);
        }
    }

    let s = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)).max(0.0) as i32
    } else {
        0
    };
    let scale = libm::exp2(-(s as f64));
    let a1 = a * scale;
    let a2 = &a2 * (scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let u_hi = &a6 * (b[13]) + &a4 * b[11] + &a2 * b[9];
    let u_inner = &a6 * u_hi + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = &a1 * u_inner;
    let v_hi = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let mut r = pade_solve(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or(Error::NonPositiveInput("singular Padé denominator"))
}

/// `exp(t·gen) x0`.
pub fn expm_apply(gen: &DMatrix<f64>, x0: &[f64], t: f64) -> Result<Vec<f64>> {
    if x0.len() != gen.nrows() {
        return Err(Error::DimensionMismatch {
            what: "expm_apply vector",
            expected: gen.nrows(),
            found: x0.len(),
        });
    }
    if !(t >= 0.0) {
        return Err(Error::NonPositiveInput("expm_apply time must be non-negative"));
    }
    let e = expm(&(gen * t))?;
    let x = nalgebra::DVector::from_column_slice(x0);
    Ok((e * x).as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_is_identity() {
        let x = expm_apply(&DMatrix::zeros(3, 3), &[1.0, -2.0, 3.0], 7.0).unwrap();
        assert_eq!(x, [1.0, -2.0, 3.0]);
    }

    #[test]
    fn scalar_decay() {
        let x = expm_apply(&DMatrix::from_element(1, 1, -1.0), &[1.0], 1.0).unwrap();
        assert!((x[0] - libm::exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn rotation_quarter_turn() {
        let g = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let x = expm_apply(&g, &[1.0, 0.0], core::f64::consts::FRAC_PI_2).unwrap();
        assert!(x[0].abs() < 1e-9 && (x[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn every_pade_degree_matches_scalar_exponential() {
        for &z in &[1e-3, 0.1, 0.5, 1.5, 4.0, 30.0, -30.0] {
            let e = expm(&DMatrix::from_element(1, 1, z)).unwrap()[(0, 0)];
            let want = libm::exp(z);
            assert!(((e - want) / want).abs() < 1e-13, "z = {z}: {e} vs {want}");
        }
    }

    #[test]
    fn oversized_generator_is_rejected() {
        let g = DMatrix::zeros(DENSE_LIMIT + 1, DENSE_LIMIT + 1);
        assert!(matches!(expm(&g), Err(Error::SizeLimitExceeded { .. })));
    }
}
