//! Constant-time tree queries: depth, lowest common ancestor, level
//! ancestor, and the LCA edges of a non-tree edge.
//!
//! LCA uses an Euler tour with a sparse table (O(n log n) build, O(1)
//! query); level ancestors use jump pointers (O(n log n) build, O(log n)
//! query). That is within the contract: queries must agree with a naive
//! parent-pointer walk and the build stays near-linear.

use crate::hypergraph::RelId;
use crate::mcs::RootedTree;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("requested depth {requested} exceeds depth({node:?}) = {depth}")]
    DepthOutOfRange {
        node: RelId,
        requested: u32,
        depth: u32,
    },
    #[error("({0:?}, {1:?}) is a tree edge; LCA edges are defined for non-tree edges")]
    TreeEdge(RelId, RelId),
    #[error("({0:?}, {0:?}) is a self-loop")]
    SelfLoop(RelId),
}

/// Immutable query structure over one rooted tree.
pub struct TreeIndex {
    parents: Vec<Option<RelId>>,
    depths: Vec<u32>,
    /// first_pos[v] = first occurrence of v in the Euler tour.
    first_pos: Vec<usize>,
    /// sparse[k][i] = shallowest node among tour positions [i, i + 2^k).
    sparse: Vec<Vec<u32>>,
    /// up[k][v] = 2^k-th ancestor of v (v itself when it would pass the root).
    up: Vec<Vec<u32>>,
}

impl TreeIndex {
    pub fn build(tree: &RootedTree) -> TreeIndex {
        let n = tree.node_count();
        let parents: Vec<Option<RelId>> = (0..n as u32).map(|r| tree.parent(RelId(r))).collect();
        let depths: Vec<u32> = (0..n as u32).map(|r| tree.depth(RelId(r))).collect();

        let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (c, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                children[p.idx()].push(c as u32);
            }
        }

        let tour = euler_tour(tree.root().0, &children);
        let mut first_pos = vec![usize::MAX; n];
        for (i, &v) in tour.iter().enumerate() {
            if first_pos[v as usize] == usize::MAX {
                first_pos[v as usize] = i;
            }
        }

        let sparse = build_sparse(&tour, &depths);
        let up = build_up(&parents, n);
        TreeIndex {
            parents,
            depths,
            first_pos,
            sparse,
            up,
        }
    }

    pub fn depth(&self, u: RelId) -> u32 {
        self.depths[u.idx()]
    }

    pub fn parent(&self, u: RelId) -> Option<RelId> {
        self.parents[u.idx()]
    }

    pub fn lca(&self, u: RelId, v: RelId) -> RelId {
        if u == v {
            return u;
        }
        let (mut i, mut j) = (self.first_pos[u.idx()], self.first_pos[v.idx()]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let k = ((j - i + 1) as u64).ilog2() as usize;
        let a = self.sparse[k][i];
        let b = self.sparse[k][j + 1 - (1 << k)];
        if self.depths[a as usize] <= self.depths[b as usize] {
            RelId(a)
        } else {
            RelId(b)
        }
    }

    /// The ancestor of `u` at depth `d` (so `level_ancestor(u, depth(u)) ==
    /// u` and `level_ancestor(u, 0)` is the root).
    pub fn level_ancestor(&self, u: RelId, d: u32) -> Result<RelId, IndexError> {
        let du = self.depths[u.idx()];
        if d > du {
            return Err(IndexError::DepthOutOfRange {
                node: u,
                requested: d,
                depth: du,
            });
        }
        let mut steps = du - d;
        let mut v = u.0;
        let mut k = 0;
        while steps > 0 {
            if steps & 1 == 1 {
                v = self.up[k][v as usize];
            }
            steps >>= 1;
            k += 1;
        }
        Ok(RelId(v))
    }

    /// True iff `a` is an ancestor of `b` (including `a == b`).
    pub fn is_ancestor(&self, a: RelId, b: RelId) -> bool {
        self.lca(a, b) == a
    }

    /// The 1 or 2 tree edges incident to `lca(u, v)` on the tree path
    /// between `u` and `v`. Each edge is identified by its child endpoint.
    pub fn lca_edges(&self, u: RelId, v: RelId) -> Result<LcaEdges, IndexError> {
        if u == v {
            return Err(IndexError::SelfLoop(u));
        }
        if self.parents[u.idx()] == Some(v) || self.parents[v.idx()] == Some(u) {
            return Err(IndexError::TreeEdge(u, v));
        }
        let l = self.lca(u, v);
        let d = self.depths[l.idx()] + 1;
        let toward_u = if u == l {
            None
        } else {
            Some(self.level_ancestor(u, d).expect("u is below its lca"))
        };
        let toward_v = if v == l {
            None
        } else {
            Some(self.level_ancestor(v, d).expect("v is below its lca"))
        };
        debug_assert!(toward_u.is_some() || toward_v.is_some());
        Ok(LcaEdges {
            lca: l,
            toward_u,
            toward_v,
        })
    }
}

fn euler_tour(root: u32, children: &[Vec<u32>]) -> Vec<u32> {
    // Standard Euler tour: emit a node each time the DFS enters or returns
    // to it.
    let mut tour = Vec::with_capacity(2 * children.len());
    let mut stack = vec![(root, 0usize)];
    tour.push(root);
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let kids = &children[v as usize];
        if *next < kids.len() {
            let c = kids[*next];
            *next += 1;
            tour.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                tour.push(p);
            }
        }
    }
    tour
}

fn build_sparse(tour: &[u32], depths: &[u32]) -> Vec<Vec<u32>> {
    let m = tour.len();
    let levels = (m as u64).ilog2() as usize + 1;
    let mut sparse = Vec::with_capacity(levels);
    sparse.push(tour.to_vec());
    for k in 1..levels {
        let half = 1usize << (k - 1);
        let prev = &sparse[k - 1];
        let width = m + 1 - (1 << k);
        let mut row = Vec::with_capacity(width);
        for i in 0..width {
            let a = prev[i];
            let b = prev[i + half];
            row.push(if depths[a as usize] <= depths[b as usize] {
                a
            } else {
                b
            });
        }
        sparse.push(row);
    }
    sparse
}

fn build_up(parents: &[Option<RelId>], n: usize) -> Vec<Vec<u32>> {
    let levels = if n <= 1 {
        1
    } else {
        (n as u64).ilog2() as usize + 1
    };
    let mut up = Vec::with_capacity(levels);
    let base: Vec<u32> = (0..n)
        .map(|v| parents[v].map(|p| p.0).unwrap_or(v as u32))
        .collect();
    up.push(base);
    for k in 1..levels {
        let prev = &up[k - 1];
        let row: Vec<u32> = (0..n).map(|v| prev[prev[v] as usize]).collect();
        up.push(row);
    }
    up
}

/// The LCA edges of a non-tree edge `(u, v)`: at most two tree edges
/// incident to the LCA and lying on the u-v tree path, named by their child
/// endpoints. One of the sides is `None` exactly when that endpoint is the
/// LCA itself (ancestor-descendant case).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcaEdges {
    pub lca: RelId,
    pub toward_u: Option<RelId>,
    pub toward_v: Option<RelId>,
}

impl LcaEdges {
    /// The distinct child endpoints, 1 for the ancestor case, else 2.
    pub fn children(&self) -> Vec<RelId> {
        match (self.toward_u, self.toward_v) {
            (Some(a), Some(b)) => vec![a, b],
            (Some(a), None) | (None, Some(a)) => vec![a],
            (None, None) => unreachable!("self-loops are rejected"),
        }
    }
}
