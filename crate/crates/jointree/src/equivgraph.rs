//! The equivalent graph: a multigraph whose spanning trees are in bijection
//! with the maximum spanning trees of the line graph, hence with the join
//! trees of the hypergraph.
//!
//! Construction keeps every MCS tree edge in place and processes each
//! non-tree edge independently against its LCA edges: strictly lighter
//! edges are deleted (non-MST edges), equal-weight edges slide up to become
//! parallel to an LCA edge or to close a triangle at the LCA. Running the
//! construction with the original weights gives the same result as first
//! making the tree weights monotonic by vertex duplication.

use crate::hypergraph::{Hypergraph, LineEdge, LineEdgeId, LineGraph, RelId, VarId};
use crate::mcs::RootedTree;
use crate::treeindex::TreeIndex;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("edges are not incident: {0:?} and {1:?}")]
    NotIncident(LineEdgeId, LineEdgeId),
    #[error("sliding requires w(edge) <= w(tree edge); got {edge_weight} > {tree_weight}")]
    SlideWeight { edge_weight: u32, tree_weight: u32 },
    #[error("tree is not consistent with the hypergraph: {0}")]
    Inconsistent(String),
    #[error(
        "non-tree edge {edge:?} is heavier than an incident LCA edge ({weight} > {lca_weight}); \
         the input tree is not a maximum spanning tree"
    )]
    NotMaximum {
        edge: LineEdgeId,
        weight: u32,
        lca_weight: u32,
    },
}

/// One edge of the equivalent graph: the original line-graph edge id plus
/// its current (possibly slid) endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EgEdge {
    pub id: LineEdgeId,
    pub a: RelId,
    pub b: RelId,
    pub weight: u32,
}

/// Multigraph over the hyperedges; parallel edges are distinguished by
/// their original edge ids. Deleted ids are the non-MST edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalentGraph {
    node_count: usize,
    edges: Vec<EgEdge>,
    deleted: BTreeSet<LineEdgeId>,
}

impl EquivalentGraph {
    /// Assembles a multigraph value directly. Normally produced by
    /// [`build_equivalent_graph`]; the raw form exists for tests and tools
    /// that already hold an edge list.
    pub fn from_parts(
        node_count: usize,
        edges: Vec<EgEdge>,
        deleted: BTreeSet<LineEdgeId>,
    ) -> EquivalentGraph {
        EquivalentGraph {
            node_count,
            edges,
            deleted,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Surviving edges in ascending id order.
    pub fn edges(&self) -> &[EgEdge] {
        &self.edges
    }

    pub fn deleted(&self) -> &BTreeSet<LineEdgeId> {
        &self.deleted
    }

    pub fn edge_by_id(&self, id: LineEdgeId) -> Option<&EgEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Endpoint multiset comparison key: (id, unordered endpoints).
    pub fn shape(&self) -> Vec<(LineEdgeId, RelId, RelId)> {
        self.edges
            .iter()
            .map(|e| {
                let (a, b) = if e.a <= e.b { (e.a, e.b) } else { (e.b, e.a) };
                (e.id, a, b)
            })
            .collect()
    }
}

/// A standalone multigraph edge used by the elementary sliding operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiEdge {
    pub id: LineEdgeId,
    pub a: RelId,
    pub b: RelId,
    pub weight: u32,
}

/// Elementary sliding transformation: given a tree edge `e* = (u, v)` and
/// an incident edge `e = (v, w)` with `w(e) < w(e*)` (equality is allowed
/// for the equal-weight moves the equivalent-graph construction performs),
/// move `e`'s endpoint `v` to `u`. The edge keeps its identity; the result
/// may be a self-loop.
pub fn slide(e: MultiEdge, e_star: MultiEdge) -> Result<MultiEdge, EquivError> {
    if e.weight > e_star.weight {
        return Err(EquivError::SlideWeight {
            edge_weight: e.weight,
            tree_weight: e_star.weight,
        });
    }
    // Shared endpoint v slides to the far end u of e*.
    let (u, v) = if e_star.a == e.a || e_star.a == e.b {
        (e_star.b, e_star.a)
    } else if e_star.b == e.a || e_star.b == e.b {
        (e_star.a, e_star.b)
    } else {
        return Err(EquivError::NotIncident(e.id, e_star.id));
    };
    let (a, b) = if e.a == v { (u, e.b) } else { (e.a, u) };
    Ok(MultiEdge { a, b, ..e })
}

/// Record of one vertex duplication: the clone was added to every
/// hyperedge of the original's neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicationRecord {
    pub original: VarId,
    pub clone: VarId,
    pub affected: Vec<RelId>,
}

/// Duplicates vertex `x`: a fresh vertex is added to every hyperedge
/// containing `x`. The line-graph structure is unchanged; weights inside
/// the neighborhood grow by one. The join-tree set is preserved.
pub fn duplicate_vertex(h: &Hypergraph, x: VarId) -> (Hypergraph, DuplicationRecord) {
    let clone_name = fresh_clone_name(h, x);
    let affected: Vec<RelId> = h.rels_of(x).to_vec();
    let mut relations = h.to_relations();
    for &r in &affected {
        relations[r.idx()].1.push(clone_name.clone());
    }
    let (out, warnings) =
        Hypergraph::from_relations(&relations).expect("duplication keeps the hypergraph valid");
    assert!(warnings.is_empty(), "duplication cannot create duplicates");
    let clone = var_by_name(&out, &clone_name).expect("clone variable exists");
    (
        out,
        DuplicationRecord {
            original: x,
            clone,
            affected,
        },
    )
}

fn var_by_name(h: &Hypergraph, name: &str) -> Option<VarId> {
    (0..h.var_count() as u32)
        .map(VarId)
        .find(|&v| h.var_name(v) == name)
}

fn fresh_clone_name(h: &Hypergraph, x: VarId) -> String {
    let base = h.var_name(x);
    let mut k = 1;
    loop {
        let candidate = format!("{base}'{k}");
        if var_by_name(h, &candidate).is_none() {
            return candidate;
        }
        k += 1;
    }
}

/// Rebuilds the hypergraph so the given MCS tree has strictly increasing
/// weights from root to leaves, by breadth-first vertex duplication: each
/// tree edge lighter than its parent edge duplicates one of its private
/// vertices (present in the edge label but not the parent's) until it is
/// heavier. Returns the duplicated hypergraph and the tree with updated
/// weights and labels.
pub fn build_mwjt(h: &Hypergraph, t: &RootedTree) -> Result<(Hypergraph, RootedTree), EquivError> {
    check_tree(h, t)?;
    let mut current = h.clone();
    // Children of each node, so the BFS visits edges parent-first.
    let n = h.rel_count();
    let mut children: Vec<Vec<RelId>> = vec![Vec::new(); n];
    for (c, p) in t.edges() {
        children[p.idx()].push(c);
    }
    let mut queue: VecDeque<RelId> = children[t.root().idx()].iter().copied().collect();
    while let Some(child) = queue.pop_front() {
        let parent = t.parent(child).expect("queued edges have parents");
        if let Some(grand) = t.parent(parent) {
            let edge_label = current.shared(child, parent);
            let parent_label = current.shared(parent, grand);
            let w = edge_label.len() as i64;
            let wp = parent_label.len() as i64;
            let delta = wp - w + 1;
            if delta > 0 {
                // A private vertex exists for every MCS tree edge with a
                // parent; pick the smallest for determinism.
                let x = edge_label
                    .difference(&parent_label)
                    .copied()
                    .next()
                    .ok_or_else(|| {
                        EquivError::Inconsistent(format!(
                            "tree edge ({}, {}) has no vertex outside its parent edge",
                            current.rel_name(child),
                            current.rel_name(parent)
                        ))
                    })?;
                // Rebuilding after each duplication renumbers variables;
                // track the source by name.
                let name = current.var_name(x).to_string();
                for _ in 0..delta {
                    let id = var_by_name(&current, &name).expect("duplication source exists");
                    let (next, _) = duplicate_vertex(&current, id);
                    current = next;
                }
            }
        }
        for &c in &children[child.idx()] {
            queue.push_back(c);
        }
    }
    // Same structure, new weights and labels.
    let mut weights = vec![0u32; n];
    let mut labels = vec![BTreeSet::new(); n];
    for (c, p) in t.edges() {
        let label = current.shared(c, p);
        weights[c.idx()] = label.len() as u32;
        labels[c.idx()] = label;
    }
    Ok((current, t.with_updated_annotations(weights, labels)))
}

fn check_tree(h: &Hypergraph, t: &RootedTree) -> Result<(), EquivError> {
    if t.node_count() != h.rel_count() {
        return Err(EquivError::Inconsistent(format!(
            "tree has {} nodes, hypergraph has {} relations",
            t.node_count(),
            h.rel_count()
        )));
    }
    for (c, p) in t.edges() {
        if h.shared(c, p).is_empty() {
            return Err(EquivError::Inconsistent(format!(
                "tree edge ({}, {}) joins disjoint hyperedges",
                h.rel_name(c),
                h.rel_name(p)
            )));
        }
    }
    Ok(())
}

/// Builds the equivalent graph from the weighted line graph and an MCS
/// tree. Tree edges stay in place; every non-tree edge is deleted or slid
/// directly to its LCA edges by the weight comparison below. Runs in
/// O(m + n) plus the index build.
pub fn build_equivalent_graph(
    l: &LineGraph,
    t: &RootedTree,
) -> Result<EquivalentGraph, EquivError> {
    let lookup_weight = |child: RelId| t.weight(child);
    build_eg_impl(
        l.node_count(),
        l.edges().iter().map(|e| (e.id, e.a, e.b, Some(e.weight))),
        t,
        lookup_weight,
    )
}

/// Gamma-acyclic fast path: the edge set comes from the union join graph
/// discovered by [`mcs_tree_gamma`] and carries no weights. Every non-tree
/// edge is an MST edge, so no deletion happens and the branch is chosen by
/// comparing the two LCA-edge weights alone.
///
/// [`mcs_tree_gamma`]: crate::mcs::mcs_tree_gamma
pub fn build_equivalent_graph_gamma(
    union_edges: &[(RelId, RelId)],
    t: &RootedTree,
) -> Result<EquivalentGraph, EquivError> {
    let lookup_weight = |child: RelId| t.weight(child);
    build_eg_impl(
        t.node_count(),
        union_edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (LineEdgeId(i as u32), a, b, None)),
        t,
        lookup_weight,
    )
}

fn build_eg_impl(
    node_count: usize,
    edges: impl Iterator<Item = (LineEdgeId, RelId, RelId, Option<u32>)>,
    t: &RootedTree,
    tree_weight: impl Fn(RelId) -> u32,
) -> Result<EquivalentGraph, EquivError> {
    let idx = TreeIndex::build(t);
    let mut out = Vec::new();
    let mut deleted = BTreeSet::new();
    for (id, a, b, weight) in edges {
        if t.is_tree_edge(a, b) {
            let child = if t.parent(a) == Some(b) { a } else { b };
            out.push(EgEdge {
                id,
                a,
                b,
                weight: tree_weight(child),
            });
            continue;
        }
        // Orient so that ri is the shallower endpoint.
        let (ri, rj) = if idx.depth(a) <= idx.depth(b) {
            (a, b)
        } else {
            (b, a)
        };
        let le = idx
            .lca_edges(ri, rj)
            .map_err(|e| EquivError::Inconsistent(e.to_string()))?;
        let l = le.lca;
        match (le.toward_u, le.toward_v) {
            // Ancestor case: one LCA edge; equal weight means parallel,
            // lighter means deleted.
            (None, Some(r2)) => {
                let w2 = tree_weight(r2);
                let w_star = weight.unwrap_or(w2);
                match w_star.cmp(&w2) {
                    std::cmp::Ordering::Less => {
                        deleted.insert(id);
                    }
                    std::cmp::Ordering::Equal => out.push(EgEdge {
                        id,
                        a: l,
                        b: r2,
                        weight: w_star,
                    }),
                    std::cmp::Ordering::Greater => {
                        return Err(EquivError::NotMaximum {
                            edge: id,
                            weight: w_star,
                            lca_weight: w2,
                        })
                    }
                }
            }
            (Some(r1), Some(r2)) => {
                let (w1, w2) = (tree_weight(r1), tree_weight(r2));
                // Without an explicit weight (gamma path) the edge is an MST
                // edge, i.e. exactly as heavy as the lighter LCA edge.
                let w_star = weight.unwrap_or_else(|| w1.min(w2));
                if w_star > w1 || w_star > w2 {
                    return Err(EquivError::NotMaximum {
                        edge: id,
                        weight: w_star,
                        lca_weight: w1.min(w2),
                    });
                }
                if w_star < w1 && w_star < w2 {
                    deleted.insert(id);
                } else if w_star == w1 && w_star == w2 {
                    // Both sides block at the LCA edges: the edge closes a
                    // triangle with them.
                    out.push(EgEdge {
                        id,
                        a: r1,
                        b: r2,
                        weight: w_star,
                    });
                } else if w_star == w1 {
                    // Parallel to the lighter LCA edge (ri side).
                    out.push(EgEdge {
                        id,
                        a: l,
                        b: r1,
                        weight: w_star,
                    });
                } else {
                    out.push(EgEdge {
                        id,
                        a: l,
                        b: r2,
                        weight: w_star,
                    });
                }
            }
            (Some(_), None) => unreachable!("rj is the deeper endpoint"),
            (None, None) => unreachable!("lca_edges rejects self-loops"),
        }
    }
    Ok(EquivalentGraph {
        node_count,
        edges: out,
        deleted,
    })
}

/// The union join graph: edges of the line graph appearing in at least one
/// join tree, i.e. the survivors of the equivalent-graph construction,
/// reported with their original endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionJoinGraph {
    pub node_count: usize,
    pub edges: Vec<LineEdge>,
}

/// Computes the union join graph of a connected alpha-acyclic hypergraph.
pub fn union_join_graph(h: &Hypergraph) -> Result<UnionJoinGraph, EquivError> {
    let l = LineGraph::from_hypergraph(h);
    let t = crate::mcs::mcs_tree(h, h.default_root(), &crate::mcs::TieRule::SmallestId)
        .map_err(|e| EquivError::Inconsistent(e.to_string()))?;
    if !crate::mcs::validate_join_tree(h, &t) {
        return Err(EquivError::Inconsistent(
            "hypergraph is not alpha-acyclic; the union join graph is empty".into(),
        ));
    }
    let eg = build_equivalent_graph(&l, &t)?;
    let edges = l
        .edges()
        .iter()
        .filter(|e| !eg.deleted().contains(&e.id))
        .cloned()
        .collect();
    Ok(UnionJoinGraph {
        node_count: l.node_count(),
        edges,
    })
}
