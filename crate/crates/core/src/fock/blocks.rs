//! Block-diagonal machinery for the Fock oracle.
//!
//! The states this oracle builds conserve photon-number differences or sums,
//! so their matrices split into exactly decoupled blocks. Operations detect
//! the decoupling from the exact sparsity pattern (union-find over nonzero
//! entries) and run dense kernels per block; an unstructured matrix falls
//! back to a single dense block.

use nalgebra::DMatrix;

/// A symmetric matrix stored as decoupled diagonal blocks over a partition
/// of the basis indices.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    pub dim: usize,
    /// Global basis indices of each group, ascending within a group.
    pub groups: Vec<Vec<usize>>,
    /// Dense sub-matrix per group.
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockMatrix {
    /// Wraps a dense matrix, discovering decoupled components from its
    /// exact sparsity pattern.
    pub fn from_dense(m: &DMatrix<f64>) -> BlockMatrix {
        let n = m.nrows();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if m[(i, j)] != 0.0 || m[(j, i)] != 0.0 {
                    uf.union(i, j);
                }
            }
        }
        let groups = uf.groups();
        let blocks = groups
            .iter()
            .map(|g| DMatrix::from_fn(g.len(), g.len(), |r, c| m[(g[r], g[c])]))
            .collect();
        BlockMatrix {
            dim: n,
            groups,
            blocks,
        }
    }

    /// Builds directly from a known partition and its blocks.
    pub fn from_parts(dim: usize, groups: Vec<Vec<usize>>, blocks: Vec<DMatrix<f64>>) -> Self {
        BlockMatrix { dim, groups, blocks }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (g, b) in self.groups.iter().zip(&self.blocks) {
            for (r, &gi) in g.iter().enumerate() {
                for (c, &gj) in g.iter().enumerate() {
                    out[(gi, gj)] = b[(r, c)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Matrix exponential, block by block.
    pub fn exp(&self) -> BlockMatrix {
        BlockMatrix {
            dim: self.dim,
            groups: self.groups.clone(),
            blocks: self.blocks.iter().map(|b| b.exp()).collect(),
        }
    }

    /// Conjugation U M U^T within the shared partition.
    pub fn conjugate_by(&self, u: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.groups.len(), u.groups.len());
        let blocks = self
            .blocks
            .iter()
            .zip(&u.blocks)
            .map(|(m, ub)| ub * m * ub.transpose())
            .collect();
        BlockMatrix {
            dim: self.dim,
            groups: self.groups.clone(),
            blocks,
        }
    }

    /// Symmetric eigendecomposition of every block.
    pub fn eigendecompose(&self) -> BlockEigen {
        let parts = self
            .blocks
            .iter()
            .map(|b| {
                let se = b.clone().symmetric_eigen();
                (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
            })
            .collect();
        BlockEigen {
            groups: self.groups.clone(),
            parts,
        }
    }
}

/// Eigendecomposition aligned with a partition: per group, eigenvalues and
/// the orthogonal eigenvector matrix.
pub struct BlockEigen {
    pub groups: Vec<Vec<usize>>,
    /// (eigenvalues, eigenvectors) per group.
    pub parts: Vec<(Vec<f64>, DMatrix<f64>)>,
}

/// Aligns two block matrices on the join of their partitions: the coarsest
/// partition refined by both, with each matrix's blocks embedded as direct
/// sums. The pair kernels (overlaps, relative entropy, trace distance) all
/// operate on such aligned pairs.
pub fn align(a: &BlockMatrix, b: &BlockMatrix) -> (BlockMatrix, BlockMatrix) {
    assert_eq!(a.dim, b.dim);
    let mut uf = UnionFind::new(a.dim);
    for g in a.groups.iter().chain(&b.groups) {
        for w in g.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let groups = uf.groups();
    (regroup(a, &groups), regroup(b, &groups))
}

fn regroup(m: &BlockMatrix, groups: &[Vec<usize>]) -> BlockMatrix {
    // Position lookup: global index -> (old group, offset).
    let mut pos = vec![(usize::MAX, usize::MAX); m.dim];
    for (gi, g) in m.groups.iter().enumerate() {
        for (off, &idx) in g.iter().enumerate() {
            pos[idx] = (gi, off);
        }
    }
    let blocks = groups
        .iter()
        .map(|g| {
            DMatrix::from_fn(g.len(), g.len(), |r, c| {
                let (gr, or) = pos[g[r]];
                let (gc, oc) = pos[g[c]];
                if gr == gc {
                    m.blocks[gr][(or, oc)]
                } else {
                    0.0
                }
            })
        })
        .collect();
    BlockMatrix {
        dim: m.dim,
        groups: groups.to_vec(),
        blocks,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Groups sorted by their smallest member; indices ascending inside.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}
