//! The canonical (shallowest) join tree of a Berge-acyclic hypergraph.
//!
//! For Berge-acyclic inputs the line graph is a block graph, hence
//! geodetic, and the union of unique shortest paths from any root is the
//! one join tree minimizing every node's depth. MCS constructs exactly that
//! tree, for every tie-breaking choice.

use crate::acyclicity::is_berge;
use crate::hypergraph::{Hypergraph, LineGraph, RelId};
use crate::mcs::{mcs_tree, McsError, RootedTree, TieRule};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("hypergraph is not Berge-acyclic; canonical trees are defined for Berge inputs")]
    NotBerge,
    #[error(transparent)]
    Mcs(#[from] McsError),
}

/// Builds the canonical join tree rooted at `root`. Errors unless the
/// hypergraph is Berge-acyclic.
pub fn canonical_tree(h: &Hypergraph, root: RelId) -> Result<RootedTree, CanonicalError> {
    if !is_berge(h) {
        return Err(CanonicalError::NotBerge);
    }
    Ok(mcs_tree(h, root, &TieRule::SmallestId)?)
}

/// True iff every node's depth in `t` equals its BFS distance from the root
/// in the line graph. On the Berge domain this is exactly the canonical
/// (depth-minimal) property.
pub fn is_canonical(h: &Hypergraph, t: &RootedTree) -> bool {
    let l = LineGraph::from_hypergraph(h);
    let dist = bfs_distances(&l, t.root());
    h.rels()
        .all(|r| dist[r.idx()].map(|d| d == t.depth(r)).unwrap_or(false))
}

/// BFS distances in the line graph, `None` for unreachable nodes.
pub fn bfs_distances(l: &LineGraph, source: RelId) -> Vec<Option<u32>> {
    let adj = adjacency(l);
    let mut dist = vec![None; l.node_count()];
    dist[source.idx()] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.idx()].unwrap();
        for &v in &adj[u.idx()] {
            if dist[v.idx()].is_none() {
                dist[v.idx()] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn adjacency(l: &LineGraph) -> Vec<Vec<RelId>> {
    let mut adj = vec![Vec::new(); l.node_count()];
    for e in l.edges() {
        adj[e.a.idx()].push(e.b);
        adj[e.b.idx()].push(e.a);
    }
    for list in &mut adj {
        list.sort();
    }
    adj
}

/// True iff every pair of nodes is joined by exactly one shortest path.
/// Diagnostic utility; block graphs (and hence line graphs of Berge-acyclic
/// hypergraphs) are geodetic.
pub fn geodetic_check(l: &LineGraph) -> bool {
    let adj = adjacency(l);
    let n = l.node_count();
    for s in 0..n as u32 {
        // Count shortest paths from s; any count > 1 refutes.
        let mut dist = vec![u32::MAX; n];
        let mut count = vec![0u64; n];
        dist[s as usize] = 0;
        count[s as usize] = 1;
        let mut queue = VecDeque::from([RelId(s)]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u.idx()] {
                let cand = dist[u.idx()] + 1;
                if dist[v.idx()] == u32::MAX {
                    dist[v.idx()] = cand;
                    count[v.idx()] = count[u.idx()];
                    queue.push_back(v);
                } else if dist[v.idx()] == cand {
                    count[v.idx()] += count[u.idx()];
                }
            }
        }
        if count.iter().any(|&c| c > 1) {
            return false;
        }
    }
    true
}

/// The unique shortest-path predecessor of every node from `source`.
/// Returns `None` if some node has several shortest paths (not geodetic) or
/// is unreachable.
pub fn unique_shortest_path_tree(l: &LineGraph, source: RelId) -> Option<Vec<Option<RelId>>> {
    let adj = adjacency(l);
    let dist = bfs_distances(l, source);
    let n = l.node_count();
    let mut pred: Vec<Option<RelId>> = vec![None; n];
    for v in 0..n as u32 {
        let v = RelId(v);
        if v == source {
            continue;
        }
        let dv = dist[v.idx()]?;
        let mut preds = adj[v.idx()]
            .iter()
            .filter(|&&u| dist[u.idx()] == Some(dv - 1));
        let first = preds.next()?;
        if preds.next().is_some() {
            return None;
        }
        pred[v.idx()] = Some(*first);
    }
    Some(pred)
}
