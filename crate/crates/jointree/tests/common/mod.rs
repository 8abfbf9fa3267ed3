//! Shared helpers for the integration suites: seeded corpora and naive
//! reference routines.

use jointree::hypergraph::{Hypergraph, LineEdgeId, LineGraph, RelId};
use jointree::mcs::RootedTree;
use jointree::oracle::{random_acyclic_hypergraph, AcyclicClass, SizeBounds};
use std::collections::BTreeSet;

pub fn corpus(class: AcyclicClass, count: usize, bounds: SizeBounds) -> Vec<Hypergraph> {
    (0..count)
        .map(|seed| random_acyclic_hypergraph(seed as u64, class, bounds))
        .collect()
}

pub fn default_alpha_corpus(count: usize) -> Vec<Hypergraph> {
    corpus(AcyclicClass::Alpha, count, SizeBounds::default())
}

/// Naive parent-walk LCA for cross-checking the index.
pub fn naive_lca(t: &RootedTree, mut u: RelId, mut v: RelId) -> RelId {
    while t.depth(u) > t.depth(v) {
        u = t.parent(u).unwrap();
    }
    while t.depth(v) > t.depth(u) {
        v = t.parent(v).unwrap();
    }
    while u != v {
        u = t.parent(u).unwrap();
        v = t.parent(v).unwrap();
    }
    u
}

/// Naive level ancestor by walking parent pointers.
pub fn naive_level_ancestor(t: &RootedTree, mut u: RelId, d: u32) -> RelId {
    while t.depth(u) > d {
        u = t.parent(u).unwrap();
    }
    u
}

/// The node path between two tree nodes, inclusive.
pub fn tree_path(t: &RootedTree, u: RelId, v: RelId) -> Vec<RelId> {
    let l = naive_lca(t, u, v);
    let mut up = Vec::new();
    let mut cur = u;
    while cur != l {
        up.push(cur);
        cur = t.parent(cur).unwrap();
    }
    up.push(l);
    let mut down = Vec::new();
    let mut cur = v;
    while cur != l {
        down.push(cur);
        cur = t.parent(cur).unwrap();
    }
    down.reverse();
    up.extend(down);
    up
}

/// Total weight of a tree given as line-graph edge ids.
pub fn tree_weight(l: &LineGraph, tree: &BTreeSet<LineEdgeId>) -> u64 {
    tree.iter().map(|&id| l.edge(id).weight as u64).sum()
}
