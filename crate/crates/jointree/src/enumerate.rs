//! Exhaustive enumeration of the spanning trees of an equivalent graph by
//! single edge swaps, mapped back to join trees of the hypergraph.
//!
//! The stream starts from a given spanning tree and emits one
//! `(add, remove)` edit per further tree: applying the edits in order walks
//! through every spanning tree exactly once, each prefix being a valid
//! spanning tree. The walk recursively splits on a non-bridge tree edge
//! `e`: all trees containing `e` are enumerated first (contract `e`), a
//! single swap removes `e` across the cut, and the trees avoiding `e`
//! follow (delete `e`). Choices always take the smallest edge id, so the
//! output order is deterministic.

use crate::equivgraph::{build_equivalent_graph, EquivError, EquivalentGraph};
use crate::hypergraph::{Hypergraph, LineEdgeId, LineGraph, RelId};
use crate::mcs::{mcs_tree, validate_join_tree, McsError, RootedTree, TieRule};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("initial edge set is not a spanning tree of the equivalent graph")]
    InitialNotSpanning,
    #[error("initial tree contains edge {0} which is absent from the equivalent graph")]
    UnknownEdge(LineEdgeId),
    #[error("hypergraph is not alpha-acyclic; it has no join trees")]
    NotAlphaAcyclic,
    #[error(transparent)]
    Mcs(#[from] McsError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// One edge swap: add one equivalent-graph edge, remove another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edit {
    pub add: LineEdgeId,
    pub remove: LineEdgeId,
}

#[derive(Clone, Debug)]
struct Frame {
    node_count: usize,
    /// Alive edges with frame-local endpoints, ascending by id.
    edges: Vec<(LineEdgeId, u32, u32)>,
}

impl Frame {
    fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.node_count
    }

    fn contract(&self, target: LineEdgeId) -> Frame {
        let &(_, ua, ub) = self
            .edges
            .iter()
            .find(|&&(id, _, _)| id == target)
            .expect("contracted edge is alive");
        let keep = ua.min(ub);
        let drop = ua.max(ub);
        let map = |v: u32| {
            if v == drop {
                keep
            } else if v > drop {
                v - 1
            } else {
                v
            }
        };
        let edges = self
            .edges
            .iter()
            .filter(|&&(id, _, _)| id != target)
            .filter_map(|&(id, a, b)| {
                let (a, b) = (map(a), map(b));
                // Edges parallel to the contracted one become self-loops
                // and can never join a spanning tree of the contraction.
                (a != b).then_some((id, a, b))
            })
            .collect();
        Frame {
            node_count: self.node_count - 1,
            edges,
        }
    }

    fn delete(&self, target: LineEdgeId) -> Frame {
        Frame {
            node_count: self.node_count,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(id, _, _)| id != target)
                .collect(),
        }
    }
}

enum Task {
    Explore(Frame),
    Bridge { frame: Frame, split: LineEdgeId },
}

/// Lazy, single-consumer stream of spanning-tree edits.
pub struct EditStream {
    initial: Vec<LineEdgeId>,
    current: BTreeSet<LineEdgeId>,
    stack: Vec<Task>,
}

impl EditStream {
    /// The starting spanning tree, ascending edge ids.
    pub fn initial(&self) -> &[LineEdgeId] {
        &self.initial
    }

    /// The tree reached after the edits emitted so far.
    pub fn current(&self) -> &BTreeSet<LineEdgeId> {
        &self.current
    }
}

/// Starts the edit enumeration of `eg`'s spanning trees from `initial`
/// (given as original edge ids; the MCS tree always qualifies because its
/// edges survive the equivalent-graph construction untouched).
pub fn enumerate_edits(
    eg: &EquivalentGraph,
    initial: &BTreeSet<LineEdgeId>,
) -> Result<EditStream, EnumError> {
    let frame = Frame {
        node_count: eg.node_count(),
        edges: eg.edges().iter().map(|e| (e.id, e.a.0, e.b.0)).collect(),
    };
    for &id in initial {
        if !frame.edges.iter().any(|&(eid, _, _)| eid == id) {
            return Err(EnumError::UnknownEdge(id));
        }
    }
    if initial.len() + 1 != frame.node_count || !is_spanning(&frame, initial) {
        return Err(EnumError::InitialNotSpanning);
    }
    Ok(EditStream {
        initial: initial.iter().copied().collect(),
        current: initial.clone(),
        stack: vec![Task::Explore(frame)],
    })
}

fn is_spanning(frame: &Frame, tree: &BTreeSet<LineEdgeId>) -> bool {
    let mut dsu: Vec<u32> = (0..frame.node_count as u32).collect();
    let mut components = frame.node_count;
    for &(id, a, b) in &frame.edges {
        if tree.contains(&id) {
            let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
            if ra == rb {
                return false;
            }
            dsu[ra as usize] = rb;
            components -= 1;
        }
    }
    components == 1
}

fn find(dsu: &mut [u32], x: u32) -> u32 {
    let mut root = x;
    while dsu[root as usize] != root {
        root = dsu[root as usize];
    }
    let mut cur = x;
    while dsu[cur as usize] != root {
        let next = dsu[cur as usize];
        dsu[cur as usize] = root;
        cur = next;
    }
    root
}

impl Iterator for EditStream {
    type Item = Edit;

    fn next(&mut self) -> Option<Edit> {
        while let Some(task) = self.stack.pop() {
            match task {
                Task::Explore(frame) => {
                    if frame.is_tree() {
                        continue;
                    }
                    let split = self.pick_split(&frame);
                    let contracted = frame.contract(split);
                    self.stack.push(Task::Bridge { frame, split });
                    self.stack.push(Task::Explore(contracted));
                }
                Task::Bridge { frame, split } => {
                    let add = self.pick_bridge(&frame, split);
                    self.current.remove(&split);
                    self.current.insert(add);
                    self.stack.push(Task::Explore(frame.delete(split)));
                    return Some(Edit { add, remove: split });
                }
            }
        }
        None
    }
}

impl EditStream {
    /// The smallest tree edge on the fundamental cycle of the smallest
    /// non-tree edge. Such an edge is never a bridge, so both branches of
    /// the split are nonempty.
    fn pick_split(&self, frame: &Frame) -> LineEdgeId {
        let &(_, fa, fb) = frame
            .edges
            .iter()
            .find(|&&(id, _, _)| !self.current.contains(&id))
            .expect("frame with more edges than a tree has a non-tree edge");
        // BFS through tree edges from fa to fb.
        let n = frame.node_count;
        let mut adj: Vec<Vec<(u32, LineEdgeId)>> = vec![Vec::new(); n];
        for &(id, a, b) in &frame.edges {
            if self.current.contains(&id) {
                adj[a as usize].push((b, id));
                adj[b as usize].push((a, id));
            }
        }
        let mut via: Vec<Option<(u32, LineEdgeId)>> = vec![None; n];
        let mut queue = std::collections::VecDeque::from([fa]);
        let mut seen = vec![false; n];
        seen[fa as usize] = true;
        while let Some(u) = queue.pop_front() {
            if u == fb {
                break;
            }
            for &(v, id) in &adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    via[v as usize] = Some((u, id));
                    queue.push_back(v);
                }
            }
        }
        let mut best: Option<LineEdgeId> = None;
        let mut cur = fb;
        while cur != fa {
            let (prev, id) = via[cur as usize].expect("tree spans the frame");
            best = Some(match best {
                Some(b) if b < id => b,
                _ => id,
            });
            cur = prev;
        }
        best.expect("cycle contains at least one tree edge")
    }

    /// The smallest alive edge crossing the cut left by removing `split`
    /// from the current tree.
    fn pick_bridge(&self, frame: &Frame, split: LineEdgeId) -> LineEdgeId {
        let mut dsu: Vec<u32> = (0..frame.node_count as u32).collect();
        for &(id, a, b) in &frame.edges {
            if id != split && self.current.contains(&id) {
                let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
                if ra != rb {
                    dsu[ra as usize] = rb;
                }
            }
        }
        frame
            .edges
            .iter()
            .find(|&&(id, a, b)| id != split && find(&mut dsu, a) != find(&mut dsu, b))
            .map(|&(id, _, _)| id)
            .expect("split edge is not a bridge")
    }
}

/// Materializes every spanning tree reached by the stream, starting with
/// the initial tree, as sets of original edge ids.
pub fn materialize_join_trees(mut stream: EditStream) -> Vec<BTreeSet<LineEdgeId>> {
    let mut trees = vec![stream.current().clone()];
    while stream.next().is_some() {
        trees.push(stream.current().clone());
    }
    trees
}

/// Everything needed to enumerate the join trees of one connected
/// alpha-acyclic hypergraph.
pub struct Pipeline {
    pub line_graph: LineGraph,
    pub tree: RootedTree,
    pub eg: EquivalentGraph,
    pub initial: BTreeSet<LineEdgeId>,
}

impl Pipeline {
    /// Builds the line graph, MCS tree (default root unless overridden) and
    /// equivalent graph. Fails on inputs without join trees.
    pub fn prepare(h: &Hypergraph, root: Option<RelId>) -> Result<Pipeline, EnumError> {
        let root = root.unwrap_or_else(|| h.default_root());
        let tree = mcs_tree(h, root, &TieRule::SmallestId)?;
        if !validate_join_tree(h, &tree) {
            return Err(EnumError::NotAlphaAcyclic);
        }
        let line_graph = LineGraph::from_hypergraph(h);
        let eg = build_equivalent_graph(&line_graph, &tree)?;
        let initial = tree_edge_ids(&line_graph, &tree);
        Ok(Pipeline {
            line_graph,
            tree,
            eg,
            initial,
        })
    }

    pub fn stream(&self) -> EditStream {
        enumerate_edits(&self.eg, &self.initial)
            .expect("the MCS tree spans its own equivalent graph")
    }
}

/// Resolves a rooted tree's edges to line-graph edge ids.
pub fn tree_edge_ids(l: &LineGraph, t: &RootedTree) -> BTreeSet<LineEdgeId> {
    t.edges()
        .map(|(c, p)| {
            l.edge_id(c, p)
                .expect("tree edges join intersecting hyperedges")
        })
        .collect()
}

/// Result of a counted enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountOutcome {
    Exact(u64),
    /// At least `limit` trees exist; enumeration stopped there.
    LimitReached(u64),
}

/// Counts join trees of a connected hypergraph up to `limit`. Inputs
/// without join trees count zero.
pub fn count_join_trees(h: &Hypergraph, limit: u64) -> Result<CountOutcome, EnumError> {
    let pipeline = match Pipeline::prepare(h, None) {
        Ok(p) => p,
        Err(EnumError::NotAlphaAcyclic) => return Ok(CountOutcome::Exact(0)),
        Err(e) => return Err(e),
    };
    let mut count = 1u64;
    let mut stream = pipeline.stream();
    while count < limit {
        if stream.next().is_none() {
            return Ok(CountOutcome::Exact(count));
        }
        count += 1;
    }
    if stream.next().is_none() {
        Ok(CountOutcome::Exact(count))
    } else {
        Ok(CountOutcome::LimitReached(limit))
    }
}
