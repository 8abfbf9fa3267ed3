//! GYO reduction and acyclicity classification (alpha, linear, Berge,
//! gamma).
//!
//! GYO succeeds exactly on alpha-acyclic inputs; linearity plus
//! alpha-acyclicity is equivalent to Berge-acyclicity; gamma-acyclicity is
//! decided by an exhaustive desk-scale cycle search guarded by an edge-count
//! bound.

use crate::hypergraph::{Hypergraph, RelId, VarId};
use crate::mcs::RootedTree;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

/// Default hyperedge-count bound for the exponential gamma-cycle search.
pub const DEFAULT_GAMMA_BOUND: usize = 16;

/// One GYO elimination step: `ear` was removed, attached to `parent`
/// (`None` only for the final remaining hyperedge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GyoStep {
    pub ear: RelId,
    pub parent: Option<RelId>,
}

/// A complete GYO reduction order. The parent links form a join tree rooted
/// at the last hyperedge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GyoOrder {
    pub steps: Vec<GyoStep>,
}

impl GyoOrder {
    pub fn to_tree(&self, h: &Hypergraph) -> RootedTree {
        let mut parents = vec![None; h.rel_count()];
        for step in &self.steps {
            parents[step.ear.idx()] = step.parent;
        }
        let root = self.steps.last().expect("order is nonempty").ear;
        let order = self.steps.iter().map(|s| s.ear).collect();
        RootedTree::from_parents(h, root, parents, order)
    }
}

/// Result of [`gyo_reduce`]: either a full reduction order or the
/// irreducible residue (the hypergraph is then not alpha-acyclic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GyoOutcome {
    Order(GyoOrder),
    Irreducible { residue: BTreeSet<RelId> },
}

impl GyoOutcome {
    pub fn order(&self) -> Option<&GyoOrder> {
        match self {
            GyoOutcome::Order(o) => Some(o),
            GyoOutcome::Irreducible { .. } => None,
        }
    }
}

/// Runs GYO reduction on a connected hypergraph.
///
/// An ear is a hyperedge whose intersections with all other remaining
/// hyperedges are covered by a single remaining hyperedge, its parent.
/// Among candidate ears the smallest id is removed first, and the smallest
/// qualifying parent is chosen, so the outcome is deterministic.
pub fn gyo_reduce(h: &Hypergraph) -> GyoOutcome {
    let mut remaining: BTreeSet<RelId> = h.rels().collect();
    let mut steps = Vec::with_capacity(h.rel_count());
    while remaining.len() > 1 {
        let mut found = None;
        'ears: for &r in &remaining {
            // External part of r: vertices shared with any other remaining
            // hyperedge.
            let ext: BTreeSet<VarId> = h
                .chi(r)
                .iter()
                .copied()
                .filter(|&x| {
                    h.rels_of(x)
                        .iter()
                        .any(|&s| s != r && remaining.contains(&s))
                })
                .collect();
            for &p in &remaining {
                if p != r && ext.is_subset(h.chi(p)) {
                    found = Some((r, p));
                    break 'ears;
                }
            }
        }
        match found {
            Some((ear, parent)) => {
                remaining.remove(&ear);
                steps.push(GyoStep {
                    ear,
                    parent: Some(parent),
                });
            }
            None => return GyoOutcome::Irreducible { residue: remaining },
        }
    }
    let last = *remaining.iter().next().expect("nonempty hypergraph");
    steps.push(GyoStep {
        ear: last,
        parent: None,
    });
    GyoOutcome::Order(GyoOrder { steps })
}

/// True iff every connected component admits a join tree (GYO succeeds).
pub fn is_alpha(h: &Hypergraph) -> bool {
    crate::hypergraph::connected_components(h)
        .iter()
        .all(|c| matches!(gyo_reduce(c), GyoOutcome::Order(_)))
}

/// True iff every pair of hyperedges shares at most one vertex.
pub fn is_linear(h: &Hypergraph) -> bool {
    let mut seen: HashMap<(RelId, RelId), ()> = HashMap::new();
    for x in 0..h.var_count() as u32 {
        let rels = h.rels_of(VarId(x));
        for (i, &a) in rels.iter().enumerate() {
            for &b in &rels[i + 1..] {
                let key = if a < b { (a, b) } else { (b, a) };
                if seen.insert(key, ()).is_some() {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff the hypergraph is Berge-acyclic: alpha-acyclic and linear.
pub fn is_berge(h: &Hypergraph) -> bool {
    is_alpha(h) && is_linear(h)
}

/// Outcome of a bounded cycle search. `Unknown` is returned only when the
/// instance exceeds the size bound, never silently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    Absent,
    Unknown,
}

impl<T> SearchOutcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

/// A gamma cycle `(r0, x0, ..., r_{k-1}, x_{k-1})`, k >= 3: each
/// `x_{i<k-1}` lies in `r_i` and `r_{i+1}` and in no other hyperedge of the
/// cycle, while the closing `x_{k-1}` lies in `r_{k-1}` and `r0` and
/// possibly elsewhere.
pub type GammaCycle = Vec<(RelId, VarId)>;

/// A Berge cycle `(r0, x0, ..., r_{k-1}, x_{k-1})`, k >= 2, with distinct
/// hyperedges and distinct vertices and `x_i` in `r_i` and `r_{(i+1) mod k}`.
pub type BergeCycle = Vec<(RelId, VarId)>;

/// Exhaustive backtracking search for a gamma cycle. Instances with more
/// than `bound` hyperedges return `Unknown`.
pub fn find_gamma_cycle(h: &Hypergraph, bound: usize) -> SearchOutcome<GammaCycle> {
    if h.rel_count() > bound {
        return SearchOutcome::Unknown;
    }
    let mut seq: Vec<RelId> = Vec::new();
    let mut xs: Vec<VarId> = Vec::new();
    for r0 in h.rels() {
        seq.push(r0);
        if let Some(cycle) = gamma_dfs(h, &mut seq, &mut xs) {
            return SearchOutcome::Found(cycle);
        }
        seq.pop();
    }
    SearchOutcome::Absent
}

fn gamma_dfs(h: &Hypergraph, seq: &mut Vec<RelId>, xs: &mut Vec<VarId>) -> Option<GammaCycle> {
    let t = seq.len();
    let last = seq[t - 1];
    // Close the cycle: the final vertex may occur in other hyperedges.
    if t >= 3 {
        let closing = h.shared(last, seq[0]);
        for &x in &closing {
            if !xs.contains(&x) {
                let mut cycle: GammaCycle = seq.iter().copied().zip(xs.iter().copied()).collect();
                cycle.push((last, x));
                return Some(cycle);
            }
        }
    }
    // Extend: the connecting vertex must be exclusive to its two endpoints
    // among the cycle members chosen so far; earlier exclusive vertices must
    // avoid the new member.
    for next in h.rels() {
        if seq.contains(&next) {
            continue;
        }
        if xs.iter().any(|&x| h.chi(next).contains(&x)) {
            continue;
        }
        for &x in &h.shared(last, next) {
            if xs.contains(&x) {
                continue;
            }
            if seq[..t - 1].iter().any(|&r| h.chi(r).contains(&x)) {
                continue;
            }
            seq.push(next);
            xs.push(x);
            if let Some(cycle) = gamma_dfs(h, seq, xs) {
                return Some(cycle);
            }
            seq.pop();
            xs.pop();
        }
    }
    None
}

/// Finds a Berge cycle by locating a cycle in the bipartite incidence graph
/// of hyperedges and vertices; the hypergraph is Berge-acyclic iff that
/// graph is a forest.
pub fn find_berge_cycle(h: &Hypergraph) -> SearchOutcome<BergeCycle> {
    // Incidence nodes: 0..n rels, n..n+v vars.
    let n = h.rel_count();
    let total = n + h.var_count();
    let mut state = vec![0u8; total]; // 0 unseen, 1 on stack, 2 done
    let mut parent: Vec<usize> = vec![usize::MAX; total];
    for start in 0..total {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let neighbors = incidence_neighbors(h, u, n);
            if *next >= neighbors.len() {
                state[u] = 2;
                stack.pop();
                continue;
            }
            let v = neighbors[*next];
            *next += 1;
            if v == parent[u] {
                continue;
            }
            match state[v] {
                0 => {
                    state[v] = 1;
                    parent[v] = u;
                    stack.push((v, 0));
                }
                1 => {
                    // Walk the tree path u -> v to extract the cycle.
                    let mut path = vec![u];
                    let mut cur = u;
                    while cur != v {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    return SearchOutcome::Found(alternating_cycle(&path, n));
                }
                _ => {}
            }
        }
    }
    SearchOutcome::Absent
}

fn incidence_neighbors(h: &Hypergraph, u: usize, n: usize) -> Vec<usize> {
    if u < n {
        h.chi(RelId(u as u32)).iter().map(|x| n + x.idx()).collect()
    } else {
        h.rels_of(VarId((u - n) as u32))
            .iter()
            .map(|r| r.idx())
            .collect()
    }
}

fn alternating_cycle(path: &[usize], n: usize) -> BergeCycle {
    // The incidence cycle alternates rel/var nodes; rotate so it starts with
    // a rel, then pair each rel with the vertex that follows it.
    let k = path.len();
    debug_assert_eq!(k % 2, 0);
    let start = path.iter().position(|&u| u < n).expect("cycle has a rel");
    let rotated: Vec<usize> = (0..k).map(|i| path[(start + i) % k]).collect();
    rotated
        .chunks(2)
        .map(|pair| (RelId(pair[0] as u32), VarId((pair[1] - n) as u32)))
        .collect()
}

/// Aggregated acyclicity report. Witnesses are rendered with relation and
/// variable names so the report is self-contained.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Classification {
    pub alpha: bool,
    pub linear: bool,
    pub berge: bool,
    /// `None` means the gamma-cycle search exceeded its size bound.
    pub gamma: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_cycle_witness: Option<Vec<(String, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub berge_cycle_witness: Option<Vec<(String, String)>>,
}

/// Classifies a hypergraph, running the gamma search with the given bound.
pub fn classify(h: &Hypergraph, gamma_bound: usize) -> Classification {
    let alpha = is_alpha(h);
    let linear = is_linear(h);
    let berge = alpha && linear;
    let names = |cycle: &[(RelId, VarId)]| {
        cycle
            .iter()
            .map(|&(r, x)| (h.rel_name(r).to_string(), h.var_name(x).to_string()))
            .collect()
    };
    let (gamma, gamma_cycle_witness) = match find_gamma_cycle(h, gamma_bound) {
        SearchOutcome::Found(c) => (Some(false), Some(names(&c))),
        SearchOutcome::Absent => (Some(true), None),
        SearchOutcome::Unknown => (None, None),
    };
    let berge_cycle_witness = find_berge_cycle(h).found().map(|c| names(c));

    // Hierarchy must hold whenever all flags are decided.
    if berge {
        assert_ne!(
            gamma,
            Some(false),
            "Berge-acyclic input produced a gamma cycle"
        );
    }
    if gamma == Some(true) {
        assert!(alpha, "gamma-acyclic input failed GYO reduction");
    }
    Classification {
        alpha,
        linear,
        berge,
        gamma,
        gamma_cycle_witness,
        berge_cycle_witness,
    }
}
