//! Kirchhoff networks: branch currents live in `V¹`, node potentials in `W²`,
//! and `D` is the node-branch incidence (discrete divergence) with the ground
//! row removed. A branch contributes `+1` at its head (`to`) and `−1` at its
//! tail (`from`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::ComplexSegment;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SymMatrix};

/// Node index of the ground; physical nodes are `1..=n_nodes`.
pub const GROUND: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    /// Number of nodes excluding ground.
    pub n_nodes: usize,
    pub branches: Vec<Branch>,
    /// Self and mutual branch inductances.
    pub inductance: DMatrix<f64>,
    pub resistance: Vec<f64>,
    pub capacitance: Vec<f64>,
}

impl NetworkSpec {
    /// One branch from ground into node 1 with unit `L`, `R`, `C`.
    pub fn unit_loop() -> Self {
        Self {
            n_nodes: 1,
            branches: vec![Branch { from: GROUND, to: 1 }],
            inductance: DMatrix::identity(1, 1),
            resistance: vec![1.0],
            capacitance: vec![1.0],
        }
    }

    /// Seeded random connected network on `n_nodes` nodes.
    ///
    /// A random spanning tree is completed by `n_nodes / 2 + 1` chords.
    /// Inductances are diagonally dominant with weak mutual coupling;
    /// resistances and capacitances are drawn from narrow ranges so that the
    /// certified rate stays moderate.
    pub fn random(n_nodes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut branches = Vec::new();
        let orient = |rng: &mut ChaCha8Rng, a: usize, b: usize| {
            if rng.random_bool(0.5) {
                Branch { from: a, to: b }
            } else {
                Branch { from: b, to: a }
            }
        };
        for k in 1..=n_nodes {
            let parent = rng.random_range(0..k);
            branches.push(orient(&mut rng, parent, k));
        }
        let chords = n_nodes / 2 + 1;
        let max_pairs = n_nodes * (n_nodes + 1) / 2;
        let mut added = 0;
        let mut attempts = 0;
        while added < chords && branches.len() < max_pairs && attempts < 1000 {
            attempts += 1;
            let a = rng.random_range(0..=n_nodes);
            let b = rng.random_range(0..=n_nodes);
            if a == b
                || branches
                    .iter()
                    .any(|br| (br.from == a && br.to == b) || (br.from == b && br.to == a))
            {
                continue;
            }
            branches.push(orient(&mut rng, a, b));
            added += 1;
        }
        let nb = branches.len();
        let mut l = DMatrix::zeros(nb, nb);
        for i in 0..nb {
            for j in 0..i {
                if rng.random_bool(0.3) {
                    let m = rng.random_range(-0.1..0.1);
                    l[(i, j)] = m;
                    l[(j, i)] = m;
                }
            }
        }
        for i in 0..nb {
            let off: f64 = (0..nb).filter(|&j| j != i).map(|j| libm::fabs(l[(i, j)])).sum();
            l[(i, i)] = rng.random_range(1.0..1.3) + off;
        }
        let resistance = (0..nb).map(|_| rng.random_range(0.8..1.2)).collect();
        let capacitance = (0..n_nodes).map(|_| rng.random_range(0.2..0.4)).collect();
        Self {
            n_nodes,
            branches,
            inductance: l,
            resistance,
            capacitance,
        }
    }

    /// Incidence matrix including the ground row (row 0).
    pub fn full_incidence(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n_nodes + 1, self.branches.len());
        for (b, br) in self.branches.iter().enumerate() {
            d[(br.to, b)] += 1.0;
            d[(br.from, b)] -= 1.0;
        }
        d
    }

    fn validate(&self) -> Result<()> {
        let nb = self.branches.len();
        if self.n_nodes == 0 {
            return Err(Error::InvalidGraph("network has no nodes".into()));
        }
        if nb == 0 {
            return Err(Error::InvalidGraph("network has no branches".into()));
        }
        for (b, br) in self.branches.iter().enumerate() {
            if br.from > self.n_nodes || br.to > self.n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "branch {b} references a node beyond {}",
                    self.n_nodes
                )));
            }
            if br.from == br.to {
                return Err(Error::InvalidGraph(format!("branch {b} is a self-loop")));
            }
        }
        let mut parent: Vec<usize> = (0..=self.n_nodes).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for br in &self.branches {
            let (a, b) = (root(&mut parent, br.from), root(&mut parent, br.to));
            parent[a] = b;
        }
        let g = root(&mut parent, GROUND);
        if let Some(n) = (1..=self.n_nodes).find(|&n| root(&mut parent, n) != g) {
            return Err(Error::InvalidGraph(format!("node {n} is not connected to ground")));
        }
        if self.inductance.shape() != (nb, nb) {
            return Err(Error::InvalidSpec(format!(
                "inductance must be {nb}×{nb}, got {}×{}",
                self.inductance.nrows(),
                self.inductance.ncols()
            )));
        }
        if self.resistance.len() != nb {
            return Err(Error::InvalidSpec(format!(
                "expected {nb} resistances, got {}",
                self.resistance.len()
            )));
        }
        if self.capacitance.len() != self.n_nodes {
            return Err(Error::InvalidSpec(format!(
                "expected {} capacitances, got {}",
                self.n_nodes,
                self.capacitance.len()
            )));
        }
        if self.resistance.iter().chain(&self.capacitance).any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidSpec(
                "resistances and capacitances must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn build_network(spec: &NetworkSpec) -> Result<ComplexSegment> {
    spec.validate()?;
    let mut trip = Vec::new();
    for (b, br) in spec.branches.iter().enumerate() {
        if br.to != GROUND {
            trip.push((br.to - 1, b, 1.0));
        }
        if br.from != GROUND {
            trip.push((br.from - 1, b, -1.0));
        }
    }
    let d = CsrMatrix::from_triplets(spec.n_nodes, spec.branches.len(), &trip)?;
    let a = SymMatrix::from_dense(&spec.inductance)
        .map_err(|_| Error::InvalidSpec("inductance matrix is not symmetric".into()))?;
    if a.cholesky().is_err() {
        return Err(Error::InvalidSpec("inductance matrix is not positive definite".into()));
    }
    let inv_c: Vec<f64> = spec.capacitance.iter().map(|c| 1.0 / c).collect();
    ComplexSegment::new(
        a,
        SymMatrix::from_diagonal(&spec.resistance),
        SymMatrix::from_diagonal(&spec.capacitance),
        SymMatrix::identity(spec.n_nodes),
        SymMatrix::from_diagonal(&inv_c),
        d,
    )
}
