//! Follower/leader interaction graph, its Laplacian and the `L1`/`L2`
//! partition.
//!
//! Node numbering follows the scenario files: followers are `1..=n`, leaders
//! `n+1..=n+m` (1-based). Inside the API, followers are addressed 0-based as
//! `0..n` and leaders by their local 0-based index `0..m`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Cholesky, Matrix};
use crate::scalar::Real;

/// Undirected follower graph plus one-way leader→follower links, with 0/1
/// weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    m: usize,
    /// Row-major `(n+m)²` adjacency; `adj[i][j] = 1` iff node `i` receives from `j`.
    adjacency: Vec<u8>,
    follower_neighbors: Vec<Vec<usize>>,
    leader_neighbors: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assumption1Report {
    pub connected_followers: bool,
    pub every_follower_reaches_leader: bool,
}

impl Assumption1Report {
    pub fn holds(&self) -> bool {
        self.connected_followers && self.every_follower_reaches_leader
    }
}

impl InteractionGraph {
    /// Builds the graph from 1-based `(source, receiver)` pairs.
    ///
    /// A pair of followers is stored symmetrically. A pair `(leader, follower)`
    /// is stored one-way into the follower's row. Any pair whose receiver is a
    /// leader is rejected.
    pub fn new(n: usize, m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyGraph { n, m });
        }
        let size = n + m;
        let mut adjacency = vec![0u8; size * size];
        for &(src, dst) in edges {
            for idx in [src, dst] {
                if idx == 0 || idx > size {
                    return Err(Error::IndexOutOfRange { index: idx, min: 1, max: size });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop { node: src });
            }
            if dst > n {
                return Err(Error::LeaderReceivesEdge { source_node: src, receiver: dst });
            }
            let (s, d) = (src - 1, dst - 1);
            adjacency[d * size + s] = 1;
            if src <= n {
                adjacency[s * size + d] = 1;
            }
        }
        let follower_neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| adjacency[i * size + j] == 1).collect())
            .collect();
        let leader_neighbors = (0..n)
            .map(|i| (0..m).filter(|&k| adjacency[i * size + n + k] == 1).collect())
            .collect();
        Ok(Self { n, m, adjacency, follower_neighbors, leader_neighbors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `a_ij` over the full node set, 0-based.
    pub fn weight(&self, i: usize, j: usize) -> u8 {
        let size = self.n + self.m;
        self.adjacency[i * size + j]
    }

    /// Follower neighbors of follower `i` (0-based follower indices).
    pub fn follower_neighbors(&self, i: usize) -> &[usize] {
        &self.follower_neighbors[i]
    }

    /// Leaders follower `i` listens to (0-based local leader indices).
    pub fn leader_neighbors(&self, i: usize) -> &[usize] {
        &self.leader_neighbors[i]
    }

    pub fn adjacency<T: Real>(&self) -> Matrix<T> {
        let size = self.n + self.m;
        Matrix::from_fn(size, size, |i, j| if self.weight(i, j) == 1 { T::one() } else { T::zero() })
    }

    /// `l_ij = -a_ij` off the diagonal, `l_ii = Σ_j a_ij`. Leader rows are zero.
    pub fn laplacian<T: Real>(&self) -> Matrix<T> {
        let size = self.n + self.m;
        let mut l = Matrix::zeros(size, size);
        for i in 0..size {
            let mut degree = T::zero();
            for j in 0..size {
                if self.weight(i, j) == 1 {
                    l[(i, j)] = -T::one();
                    degree += T::one();
                }
            }
            l[(i, i)] = degree;
        }
        l
    }

    pub fn partition<T: Real>(&self) -> Result<LaplacianPartition<T>> {
        LaplacianPartition::from_laplacian(&self.laplacian(), self.n, self.m)
    }

    pub fn check_assumption1(&self) -> Assumption1Report {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &self.follower_neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let connected_followers = seen.iter().all(|&s| s);

        // Multi-source search from every follower that hears a leader directly.
        let mut reach = vec![false; n];
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&i| !self.leader_neighbors[i].is_empty()).collect();
        for &i in &queue {
            reach[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &j in &self.follower_neighbors[i] {
                if !reach[j] {
                    reach[j] = true;
                    queue.push_back(j);
                }
            }
        }
        Assumption1Report {
            connected_followers,
            every_follower_reaches_leader: reach.iter().all(|&r| r),
        }
    }
}

/// Blocks of the Laplacian `[[L1, L2], [0, 0]]` together with the spectral
/// extremes of `L1` and the containment weights `P = -L1⁻¹ L2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianPartition<T> {
    pub l1: Matrix<T>,
    pub l2: Matrix<T>,
    pub min_eig_l1: T,
    pub max_eig_l1: T,
    pub projection: Matrix<T>,
}

impl<T: Real> LaplacianPartition<T> {
    pub fn from_laplacian(laplacian: &Matrix<T>, n: usize, m: usize) -> Result<Self> {
        let l1 = laplacian.block(0, 0, n, n);
        let l2 = laplacian.block(0, n, n, m);
        let eig = symmetric_eigenvalues(&l1);
        let (min_eig_l1, max_eig_l1) = (eig[0], eig[n - 1]);
        let tol = T::lit(1e-10).max(T::lit(64.0) * T::epsilon()) * T::one().max(max_eig_l1);
        if min_eig_l1 <= tol {
            return Err(Error::SingularL1 { min_eig: min_eig_l1.as_f64() });
        }
        let chol = Cholesky::factor(&l1).ok_or(Error::SingularL1 { min_eig: min_eig_l1.as_f64() })?;
        let projection = chol.solve_matrix(&l2.scaled(-T::one()));
        Ok(Self { l1, l2, min_eig_l1, max_eig_l1, projection })
    }

    pub fn n(&self) -> usize {
        self.l1.rows()
    }

    pub fn m(&self) -> usize {
        self.l2.cols()
    }
}
