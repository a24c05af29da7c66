use dampwave_core::linalg::{expm, gen_eig_extremes, kernel_basis, spd_solve, CsrMatrix, SymMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn dense(n: usize, m: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * m).prop_map(move |v| DMatrix::from_vec(n, m, v))
}

fn spd(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    dense(n, n).prop_map(move |b| {
        let mut m = b.transpose() * &b + DMatrix::identity(n, n) * 0.1;
        m = (&m + m.transpose()) * 0.5;
        m
    })
}

fn sized_spd() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..=50).prop_flat_map(spd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn spd_solve_has_small_residual(m in sized_spd(), seed in any::<u64>()) {
        let n = m.nrows();
        let b: Vec<f64> = (0..n).map(|i| ((seed >> (i % 60)) & 7) as f64 - 3.5).collect();
        let sym = SymMatrix::from_dense(&m).unwrap();
        let x = spd_solve(&sym, &b).unwrap();
        let r = &m * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
        let scale = m.norm() * DVector::from_column_slice(&x).norm() + DVector::from_column_slice(&b).norm();
        prop_assert!(r.norm() <= 1e-12 * scale.max(1.0), "residual {}", r.norm());
    }

    #[test]
    fn skyline_matches_dense_on_banded_matrices(n in 2usize..60, band in 1usize..5, vals in prop::collection::vec(-1.0..1.0f64, 400)) {
        let mut t = Vec::new();
        let mut k = 0;
        for i in 0..n {
            let mut off = 0.0;
            for j in i.saturating_sub(band)..i {
                let v = vals[k % vals.len()];
                k += 1;
                t.push((i, j, v));
                t.push((j, i, v));
                off += v.abs();
            }
            t.push((i, i, 2.0 * band as f64 + off + 1.0));
        }
        let csr = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let sym = SymMatrix::new(csr).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = sym.cholesky().unwrap().solve(&b);
        let want = sym.to_dense().cholesky().unwrap().solve(&DVector::from_column_slice(&b));
        for (a, w) in x.iter().zip(want.iter()) {
            prop_assert!((a - w).abs() <= 1e-12 * w.abs().max(1.0));
        }
    }

    #[test]
    fn rayleigh_quotients_lie_between_extremes((num, den, x) in (1usize..20).prop_flat_map(|n| (spd(n), spd(n), dense(n, 1)))) {
        let (lo, hi) = gen_eig_extremes(&num, &den, None).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
        let x = x.column(0).into_owned();
        if x.norm() > 1e-6 {
            let q = x.dot(&(&num * &x)) / x.dot(&(&den * &x));
            let tol = 1e-10 * hi.abs().max(1.0);
            prop_assert!(q >= lo - tol && q <= hi + tol, "{lo} <= {q} <= {hi}");
        }
    }

    #[test]
    fn kernel_basis_is_orthonormal_and_annihilated((m, r, n, left, right) in (1usize..15, 0usize..8, 1usize..15)
        .prop_flat_map(|(m, r, n)| (Just(m), Just(r), Just(n), dense(m, r.max(1)), dense(r.max(1), n))))
    {
        let d = if r == 0 { DMatrix::zeros(m, n) } else { &left * &right };
        let tol = 1e-10;
        let z = kernel_basis(&d, tol);
        let rank = d.clone().svd(false, false).singular_values.iter().filter(|&&s| s > 1e-8 * d.norm().max(1e-300)).count();
        prop_assert_eq!(z.ncols(), n - rank);
        if z.ncols() > 0 {
            let gram = z.transpose() * &z;
            prop_assert!((gram - DMatrix::identity(z.ncols(), z.ncols())).amax() <= 1e-12);
            let dn = d.clone().svd(false, false).singular_values.max();
            let dz = (&d * &z).svd(false, false).singular_values.max();
            prop_assert!(dz <= 10.0 * tol * dn, "{dz} vs {dn}");
        }
    }

    #[test]
    fn exponential_is_a_semigroup(g in (1usize..12).prop_flat_map(|n| dense(n, n)), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let nrm = g.clone().svd(false, false).singular_values.max();
        let g = if nrm > 0.0 { g * (5.0 / nrm) } else { g };
        let lhs = expm(&(&g * (s + t))).unwrap();
        let rhs = expm(&(&g * s)).unwrap() * expm(&(&g * t)).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn exponential_of_skew_matrix_is_orthogonal(b in (1usize..12).prop_flat_map(|n| dense(n, n))) {
        let w = (&b - b.transpose()) * 2.0;
        let q = expm(&w).unwrap();
        let n = q.nrows();
        prop_assert!((q.transpose() * &q - DMatrix::identity(n, n)).amax() <= 1e-12);
    }
}
