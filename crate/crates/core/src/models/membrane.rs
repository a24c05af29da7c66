//! Damped membranes in first-order form: velocity `u` in continuous P1 with
//! zero boundary values, flux `u*` in piecewise constants, `d = ∇`,
//! `α = ρ₀`, `β = c`, `γ = κ⁻¹`.
//!
//! The unit interval is split into `n` equal elements; the unit square into
//! `n × n` cells, each cut along the diagonal from its lower-left to its
//! upper-right corner. Cell `(i, j)` yields triangles `2(jn + i)` with
//! vertices `(i,j), (i+1,j), (i+1,j+1)` and `2(jn + i) + 1` with vertices
//! `(i,j), (i+1,j+1), (i,j+1)`. Interior vertex `(i, j)` has index
//! `(j−1)(n−1) + i−1`; gradient row `2t + c` holds component `c` on
//! triangle `t`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::ComplexSegment;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SymMatrix};

/// Elementwise-constant coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Uniform(f64),
    PerElement(Vec<f64>),
}

impl Default for Coefficient {
    fn default() -> Self {
        Self::Uniform(1.0)
    }
}

impl Coefficient {
    fn expand(&self, name: &str, elements: usize) -> Result<Vec<f64>> {
        let v = match self {
            Self::Uniform(c) => vec![*c; elements],
            Self::PerElement(v) => {
                if v.len() != elements {
                    return Err(Error::InvalidSpec(format!(
                        "{name} needs {elements} element values, got {}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidSpec(format!("{name} must be positive and finite")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembraneSpec {
    /// 1 or 2.
    pub dimension: usize,
    /// Elements (1D) or cells (2D) per axis.
    pub n: usize,
    pub rho0: Coefficient,
    pub kappa: Coefficient,
    pub c_damp: Coefficient,
}

impl MembraneSpec {
    pub fn unit(dimension: usize, n: usize) -> Self {
        Self {
            dimension,
            n,
            rho0: Coefficient::default(),
            kappa: Coefficient::default(),
            c_damp: Coefficient::default(),
        }
    }

    /// Number of elements carrying a coefficient value.
    pub fn elements(&self) -> usize {
        match self.dimension {
            1 => self.n,
            _ => 2 * self.n * self.n,
        }
    }

    fn check(&self, dimension: usize) -> Result<()> {
        if self.dimension != dimension {
            return Err(Error::InvalidSpec(format!(
                "expected a {dimension}D membrane, got dimension {}",
                self.dimension
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("membrane needs n ≥ 2, got {}", self.n)));
        }
        Ok(())
    }
}

/// Dispatches on `spec.dimension`.
pub fn build_membrane(spec: &MembraneSpec) -> Result<ComplexSegment> {
    match spec.dimension {
        1 => build_membrane_1d(spec),
        2 => build_membrane_2d(spec),
        d => Err(Error::InvalidSpec(format!(
            "membrane dimension must be 1 or 2, got {d}"
        ))),
    }
}

fn weighted_masses(kappa: &[f64], area: impl Fn(usize) -> f64, rows_per_element: usize) -> [SymMatrix; 3] {
    let mut m2 = Vec::with_capacity(kappa.len() * rows_per_element);
    let mut g = Vec::with_capacity(m2.capacity());
    let mut h = Vec::with_capacity(m2.capacity());
    for (e, &k) in kappa.iter().enumerate() {
        let a = area(e);
        for _ in 0..rows_per_element {
            m2.push(a);
            g.push(a / k);
            h.push(a * k);
        }
    }
    [
        SymMatrix::from_diagonal(&m2),
        SymMatrix::from_diagonal(&g),
        SymMatrix::from_diagonal(&h),
    ]
}

pub fn build_membrane_1d(spec: &MembraneSpec) -> Result<ComplexSegment> {
    spec.check(1)?;
    let n = spec.n;
    let rho = spec.rho0.expand("rho0", n)?;
    let kappa = spec.kappa.expand("kappa", n)?;
    let cd = spec.c_damp.expand("c_damp", n)?;
    let h = 1.0 / n as f64;
    let n1 = n - 1;

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut d = Vec::new();
    for e in 0..n {
        // element e spans vertices e and e+1; interior vertex k has index k−1
        let local = [e.checked_sub(1), if e < n1 { Some(e) } else { None }];
        for (p, ip) in local.iter().enumerate() {
            let Some(ip) = *ip else { continue };
            for (q, iq) in local.iter().enumerate() {
                let Some(iq) = *iq else { continue };
                let w = if p == q { 2.0 } else { 1.0 } * h / 6.0;
                a.push((ip, iq, rho[e] * w));
                b.push((ip, iq, cd[e] * w));
            }
            d.push((e, ip, if p == 0 { -1.0 / h } else { 1.0 / h }));
        }
    }
    let [m2, g, hm] = weighted_masses(&kappa, |_| h, 1);
    ComplexSegment::new(
        SymMatrix::symmetrized(&CsrMatrix::from_triplets(n1, n1, &a)?)?,
        SymMatrix::symmetrized(&CsrMatrix::from_triplets(n1, n1, &b)?)?,
        g,
        m2,
        hm,
        CsrMatrix::from_triplets(n, n1, &d)?,
    )
}

/// Vertices of triangle `t` as grid coordinates.
fn triangle_vertices(n: usize, t: usize) -> [(usize, usize); 3] {
    let cell = t / 2;
    let (i, j) = (cell % n, cell / n);
    if t.is_multiple_of(2) {
        [(i, j), (i + 1, j), (i + 1, j + 1)]
    } else {
        [(i, j), (i + 1, j + 1), (i, j + 1)]
    }
}

pub fn build_membrane_2d(spec: &MembraneSpec) -> Result<ComplexSegment> {
    spec.check(2)?;
    let n = spec.n;
    let nt = 2 * n * n;
    let rho = spec.rho0.expand("rho0", nt)?;
    let kappa = spec.kappa.expand("kappa", nt)?;
    let cd = spec.c_damp.expand("c_damp", nt)?;
    let h = 1.0 / n as f64;
    let area = 0.5 * h * h;
    let n1 = (n - 1) * (n - 1);
    let interior = |(i, j): (usize, usize)| {
        if i == 0 || j == 0 || i == n || j == n {
            None
        } else {
            Some((j - 1) * (n - 1) + (i - 1))
        }
    };

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut d = Vec::new();
    for t in 0..nt {
        let v = triangle_vertices(n, t);
        let x = v.map(|(i, j)| (i as f64 * h, j as f64 * h));
        let twice_area = (x[1].0 - x[0].0) * (x[2].1 - x[0].1) - (x[2].0 - x[0].0) * (x[1].1 - x[0].1);
        let idx = v.map(interior);
        for p in 0..3 {
            let Some(ip) = idx[p] else { continue };
            let (p1, p2) = ((p + 1) % 3, (p + 2) % 3);
            let gx = (x[p1].1 - x[p2].1) / twice_area;
            let gy = (x[p2].0 - x[p1].0) / twice_area;
            d.push((2 * t, ip, gx));
            d.push((2 * t + 1, ip, gy));
            for q in 0..3 {
                let Some(iq) = idx[q] else { continue };
                let w = if p == q { 2.0 } else { 1.0 } * area / 12.0;
                a.push((ip, iq, rho[t] * w));
                b.push((ip, iq, cd[t] * w));
            }
        }
    }
    let [m2, g, hm] = weighted_masses(&kappa, |_| area, 2);
    ComplexSegment::new(
        SymMatrix::symmetrized(&CsrMatrix::from_triplets(n1, n1, &a)?)?,
        SymMatrix::symmetrized(&CsrMatrix::from_triplets(n1, n1, &b)?)?,
        g,
        m2,
        hm,
        CsrMatrix::from_triplets(2 * nt, n1, &d)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_segment;

    /// Element-matrix oracle for `∫ φ_i φ_j` on one interval.
    fn p1_mass_1d(h: f64) -> [[f64; 2]; 2] {
        // exact integrals of (1−s)², s(1−s), s² over [0,1], scaled by h
        [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]
    }

    #[test]
    fn two_element_interval() {
        let s = build_membrane_1d(&MembraneSpec::unit(1, 2)).unwrap();
        assert_eq!((s.n1(), s.n2()), (1, 2));
        assert_eq!(s.d().to_dense().as_slice(), &[2.0, -2.0]);
        let m = p1_mass_1d(0.5);
        let want = m[1][1] + m[0][0];
        assert!((s.a().get(0, 0) - want).abs() < 1e-15);
        assert!((s.a().get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.bm(), s.a());
        assert_eq!(s.g().to_dense().as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(s.k().to_dense().as_slice(), &[1.0, -1.0]);
        assert!(validate_segment(&s).usable());
    }

    #[test]
    fn interval_slopes_are_exact() {
        let n = 7;
        let s = build_membrane_1d(&MembraneSpec::unit(1, n)).unwrap();
        let f = |x: f64| x * (1.0 - x);
        let h = 1.0 / n as f64;
        let v: Vec<f64> = (1..n).map(|k| f(k as f64 * h)).collect();
        let slopes = s.d().mul_vec(&v);
        for (e, sl) in slopes.iter().enumerate() {
            let exact = (f((e + 1) as f64 * h) - f(e as f64 * h)) / h;
            assert!((sl - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn interval_mass_matches_quadrature() {
        let n = 5;
        let rho: Vec<f64> = (0..n).map(|e| 1.0 + e as f64).collect();
        let spec = MembraneSpec {
            rho0: Coefficient::PerElement(rho.clone()),
            ..MembraneSpec::unit(1, n)
        };
        let s = build_membrane_1d(&spec).unwrap();
        let h = 1.0 / n as f64;
        let hat = |k: usize, x: f64| (1.0 - libm::fabs(x - k as f64 * h) / h).max(0.0);
        // composite Simpson with many panels is exact for piecewise quadratics per element
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let mut q = 0.0;
                for e in 0..n {
                    let (x0, x1) = (e as f64 * h, (e + 1) as f64 * h);
                    let xm = 0.5 * (x0 + x1);
                    let f = |x| hat(i + 1, x) * hat(j + 1, x);
                    q += rho[e] * (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1));
                }
                assert!((s.a().get(i, j) - q).abs() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn square_single_interior_vertex() {
        let s = build_membrane_2d(&MembraneSpec::unit(2, 2)).unwrap();
        assert_eq!((s.n1(), s.n2()), (1, 16));
        assert!(validate_segment(&s).usable());
    }

    #[test]
    fn square_gradients_are_exact() {
        let n = 4;
        let s = build_membrane_2d(&MembraneSpec::unit(2, n)).unwrap();
        let h = 1.0 / n as f64;
        // a P1 function vanishing on the boundary: the hat at vertex (1,2)
        // plus twice the hat at (2,2)
        let mut v = vec![0.0; (n - 1) * (n - 1)];
        v[n - 1] = 1.0;
        v[n] = 2.0;
        let grads = s.d().mul_vec(&v);
        let nodal = |i: usize, j: usize| match (i, j) {
            (1, 2) => 1.0,
            (2, 2) => 2.0,
            _ => 0.0,
        };
        for t in 0..2 * n * n {
            let vs = triangle_vertices(n, t);
            // solve for the affine interpolant's gradient from two edges
            let (x0, y0) = (vs[0].0 as f64 * h, vs[0].1 as f64 * h);
            let (x1, y1) = (vs[1].0 as f64 * h, vs[1].1 as f64 * h);
            let (x2, y2) = (vs[2].0 as f64 * h, vs[2].1 as f64 * h);
            let f0 = nodal(vs[0].0, vs[0].1);
            let f1 = nodal(vs[1].0, vs[1].1);
            let f2 = nodal(vs[2].0, vs[2].1);
            let det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
            let gx = ((f1 - f0) * (y2 - y0) - (f2 - f0) * (y1 - y0)) / det;
            let gy = ((x1 - x0) * (f2 - f0) - (x2 - x0) * (f1 - f0)) / det;
            assert!((grads[2 * t] - gx).abs() < 1e-12, "triangle {t}");
            assert!((grads[2 * t + 1] - gy).abs() < 1e-12, "triangle {t}");
        }
    }

    #[test]
    fn square_mass_total() {
        // six of the eight triangles touch the centre vertex; ∫ λ² = area/6 on each
        let s = build_membrane_2d(&MembraneSpec::unit(2, 2)).unwrap();
        let area = 0.5 * 0.25;
        assert!((s.a().get(0, 0) - 6.0 * area / 6.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_membrane_1d(&MembraneSpec::unit(1, 1)).is_err());
        assert!(build_membrane_2d(&MembraneSpec::unit(1, 4)).is_err());
        assert!(build_membrane(&MembraneSpec::unit(3, 4)).is_err());
        let spec = MembraneSpec {
            kappa: Coefficient::PerElement(vec![1.0; 3]),
            ..MembraneSpec::unit(1, 4)
        };
        assert!(build_membrane(&spec).is_err());
        let spec = MembraneSpec {
            c_damp: Coefficient::Uniform(-1.0),
            ..MembraneSpec::unit(2, 4)
        };
        assert!(build_membrane(&spec).is_err());
    }
}
