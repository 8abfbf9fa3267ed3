//! Maximum Cardinality Search tree construction.
//!
//! MCS labels hyperedges one at a time, always picking an unlabeled
//! hyperedge with the most marked vertices next. Labeling `r_i` marks its
//! previously unmarked vertices, and every unlabeled hyperedge containing
//! such a vertex gets `r_i` as its tentative parent (later labelings
//! overwrite earlier assignments). For an alpha-acyclic input the final
//! parent links form a join tree; for other inputs the result is a spanning
//! structure that fails [`validate_join_tree`].

use crate::hypergraph::{Hypergraph, RelId, VarId};
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

/// A rooted spanning tree over the hyperedges of one hypergraph component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: RelId,
    parents: Vec<Option<RelId>>,
    /// Weight of the edge to the parent; 0 at the root.
    weights: Vec<u32>,
    /// Shared variables with the parent; empty at the root.
    labels: Vec<BTreeSet<VarId>>,
    depths: Vec<u32>,
    /// Construction order (MCS labeling r_1..r_n, GYO order, or plan order).
    order: Vec<RelId>,
}

impl RootedTree {
    /// Assembles a tree from parent links, recomputing weights, labels and
    /// depths from the hypergraph.
    pub fn from_parents(
        h: &Hypergraph,
        root: RelId,
        parents: Vec<Option<RelId>>,
        order: Vec<RelId>,
    ) -> RootedTree {
        let n = h.rel_count();
        assert_eq!(parents.len(), n);
        let mut labels = vec![BTreeSet::new(); n];
        let mut weights = vec![0u32; n];
        for r in h.rels() {
            if let Some(p) = parents[r.idx()] {
                let label = h.shared(r, p);
                weights[r.idx()] = label.len() as u32;
                labels[r.idx()] = label;
            }
        }
        let depths = compute_depths(root, &parents);
        RootedTree {
            root,
            parents,
            weights,
            labels,
            depths,
            order,
        }
    }

    pub fn root(&self) -> RelId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, r: RelId) -> Option<RelId> {
        self.parents[r.idx()]
    }

    pub fn weight(&self, r: RelId) -> u32 {
        self.weights[r.idx()]
    }

    pub fn label(&self, r: RelId) -> &BTreeSet<VarId> {
        &self.labels[r.idx()]
    }

    pub fn depth(&self, r: RelId) -> u32 {
        self.depths[r.idx()]
    }

    pub fn order(&self) -> &[RelId] {
        &self.order
    }

    /// Tree edges as `(child, parent)` pairs, ascending by child id.
    pub fn edges(&self) -> impl Iterator<Item = (RelId, RelId)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (RelId(c as u32), p)))
    }

    /// Unordered edge set `{min, max}` pairs, for structural comparison.
    pub fn edge_set(&self) -> BTreeSet<(RelId, RelId)> {
        self.edges()
            .map(|(c, p)| if c < p { (c, p) } else { (p, c) })
            .collect()
    }

    /// Total edge weight of the tree.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    pub fn is_tree_edge(&self, a: RelId, b: RelId) -> bool {
        self.parents[a.idx()] == Some(b) || self.parents[b.idx()] == Some(a)
    }

    /// Replaces the stored weights and labels, keeping the structure. Used
    /// after vertex duplication changes edge weights.
    pub(crate) fn with_updated_annotations(
        &self,
        weights: Vec<u32>,
        labels: Vec<BTreeSet<VarId>>,
    ) -> RootedTree {
        RootedTree {
            root: self.root,
            parents: self.parents.clone(),
            weights,
            labels,
            depths: self.depths.clone(),
            order: self.order.clone(),
        }
    }
}

fn compute_depths(root: RelId, parents: &[Option<RelId>]) -> Vec<u32> {
    let n = parents.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            children[p.idx()].push(c);
        }
    }
    let mut depths = vec![0u32; n];
    let mut queue = VecDeque::from([root.idx()]);
    let mut seen = vec![false; n];
    seen[root.idx()] = true;
    while let Some(u) = queue.pop_front() {
        for &c in &children[u] {
            if !seen[c] {
                seen[c] = true;
                depths[c] = depths[u] + 1;
                queue.push_back(c);
            }
        }
    }
    assert!(
        seen.iter().all(|&s| s),
        "parent links do not span the node set"
    );
    depths
}

/// Tie-breaking rule for the MCS argmax.
#[derive(Clone, Debug)]
pub enum TieRule {
    /// Among tied candidates pick the smallest relation id (default).
    SmallestId,
    /// Among tied candidates pick the one appearing earliest in the given
    /// permutation of all relation ids. Drives exhaustive tie sweeps.
    Permutation(Vec<RelId>),
}

impl TieRule {
    fn priorities(&self, n: usize) -> Vec<u32> {
        match self {
            TieRule::SmallestId => (0..n as u32).collect(),
            TieRule::Permutation(perm) => {
                assert_eq!(perm.len(), n, "tie permutation must cover all relations");
                let mut prio = vec![u32::MAX; n];
                for (rank, &r) in perm.iter().enumerate() {
                    prio[r.idx()] = rank as u32;
                }
                assert!(prio.iter().all(|&p| p != u32::MAX));
                prio
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum McsError {
    #[error("root {0:?} is not a relation of the hypergraph")]
    UnknownRoot(RelId),
    #[error("hypergraph is disconnected; run per component")]
    Disconnected,
}

/// Runs MCS from `root` and returns the resulting rooted tree.
///
/// Bucket queues keep the argmax selection at O(|H|) overall (up to the
/// logarithmic factor of the per-bucket ordered set used for deterministic
/// tie-breaking).
pub fn mcs_tree(h: &Hypergraph, root: RelId, tie: &TieRule) -> Result<RootedTree, McsError> {
    run_mcs(h, root, tie, &mut |_, _, _| {}).map(|(tree, _)| tree)
}

/// MCS variant that also emits the line-graph edge set discovered while
/// marking vertices. For a gamma-acyclic input this is exactly the union
/// join graph (= the full line-graph edge set) and the discovery costs
/// O(|H| + |E(U)|); the tree itself equals [`mcs_tree`]'s.
///
/// Returned edges are canonical `(min, max)` pairs in ascending order, so
/// their positional ids match the ids [`LineGraph::from_hypergraph`] would
/// assign.
///
/// [`LineGraph::from_hypergraph`]: crate::hypergraph::LineGraph::from_hypergraph
pub fn mcs_tree_gamma(
    h: &Hypergraph,
    root: RelId,
) -> Result<(RootedTree, Vec<(RelId, RelId)>), McsError> {
    let mut edges: BTreeSet<(RelId, RelId)> = BTreeSet::new();
    let (tree, _) = run_mcs(h, root, &TieRule::SmallestId, &mut |h, x, _current| {
        // Every hyperedge pair sharing x is unlabeled-or-current when x is
        // first marked, so collecting pairs here discovers each line-graph
        // edge at least once.
        let rels = h.rels_of(x);
        for (i, &a) in rels.iter().enumerate() {
            for &b in &rels[i + 1..] {
                edges.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
    })?;
    Ok((tree, edges.into_iter().collect()))
}

fn run_mcs(
    h: &Hypergraph,
    root: RelId,
    tie: &TieRule,
    on_mark: &mut dyn FnMut(&Hypergraph, VarId, RelId),
) -> Result<(RootedTree, Vec<RelId>), McsError> {
    let n = h.rel_count();
    if root.idx() >= n {
        return Err(McsError::UnknownRoot(root));
    }
    let prio = tie.priorities(n);
    let mut rel_of_prio = vec![0u32; n];
    for (r, &p) in prio.iter().enumerate() {
        rel_of_prio[p as usize] = r as u32;
    }

    // buckets[c] holds the priorities of unlabeled hyperedges with c marked
    // vertices.
    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); h.var_count() + 1];
    let mut count = vec![0usize; n];
    let mut labeled = vec![false; n];
    let mut marked = vec![false; h.var_count()];
    for (r, &p) in prio.iter().enumerate() {
        if r != root.idx() {
            buckets[0].insert(p);
        }
    }
    let mut max_count = 0usize;

    let mut parents: Vec<Option<RelId>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut current = root;
    loop {
        let ri = current;
        labeled[ri.idx()] = true;
        order.push(ri);
        for &x in h.chi(ri) {
            if marked[x.idx()] {
                continue;
            }
            on_mark(h, x, ri);
            for &r2 in h.rels_of(x) {
                if labeled[r2.idx()] {
                    continue;
                }
                // Tentative parent: the labeler of a newly marked vertex;
                // later labelings overwrite.
                parents[r2.idx()] = Some(ri);
                let c = count[r2.idx()];
                buckets[c].remove(&prio[r2.idx()]);
                count[r2.idx()] = c + 1;
                buckets[c + 1].insert(prio[r2.idx()]);
                max_count = max_count.max(c + 1);
            }
            marked[x.idx()] = true;
        }
        if order.len() == n {
            break;
        }
        while buckets[max_count].is_empty() {
            if max_count == 0 {
                unreachable!("bucket bookkeeping lost a pending hyperedge");
            }
            max_count -= 1;
        }
        if max_count == 0 {
            return Err(McsError::Disconnected);
        }
        let &best = buckets[max_count].iter().next().unwrap();
        buckets[max_count].remove(&best);
        current = RelId(rel_of_prio[best as usize]);
    }
    Ok((
        RootedTree::from_parents(h, root, parents, order.clone()),
        order,
    ))
}

/// Checks the running intersection property: the tree must span the
/// hypergraph, every tree edge must join intersecting hyperedges, and for
/// every variable the hyperedges containing it must induce a connected
/// subtree.
pub fn validate_join_tree(h: &Hypergraph, tree: &RootedTree) -> bool {
    if tree.node_count() != h.rel_count() {
        return false;
    }
    for (c, p) in tree.edges() {
        if h.shared(c, p).is_empty() {
            return false;
        }
    }
    rip_holds(h, |r| tree.parent(r))
}

/// Edge-list variant of [`validate_join_tree`] for trees given as unordered
/// relation pairs.
pub fn validate_join_tree_edges(h: &Hypergraph, edges: &[(RelId, RelId)]) -> bool {
    let n = h.rel_count();
    if edges.len() + 1 != n {
        return false;
    }
    let mut adj: Vec<Vec<RelId>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a == b || a.idx() >= n || b.idx() >= n || h.shared(a, b).is_empty() {
            return false;
        }
        adj[a.idx()].push(b);
        adj[b.idx()].push(a);
    }
    // Root at 0 and derive parent links; fails if not connected (and with
    // n-1 edges, connected implies acyclic).
    let mut parents: Vec<Option<RelId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([RelId(0)]);
    let mut visited = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u.idx()] {
            if !seen[v.idx()] {
                seen[v.idx()] = true;
                parents[v.idx()] = Some(u);
                visited += 1;
                queue.push_back(v);
            }
        }
    }
    if visited != n {
        return false;
    }
    rip_holds(h, |r| parents[r.idx()])
}

/// For each variable x, the nodes containing x induce a connected subtree
/// iff exactly one of them has its parent outside the set (or is the root).
fn rip_holds(h: &Hypergraph, parent: impl Fn(RelId) -> Option<RelId>) -> bool {
    for x in 0..h.var_count() as u32 {
        let members = h.rels_of(VarId(x));
        let mut tops = 0;
        for &r in members {
            match parent(r) {
                Some(p) if h.chi(p).contains(&VarId(x)) => {}
                _ => tops += 1,
            }
        }
        if tops != 1 {
            return false;
        }
    }
    true
}
