//! Brute-force reference implementations and seeded instance generators.
//! Used by tests and the `verify` command; every exponential routine is
//! guarded by a hard size limit.

use crate::acyclicity::{find_gamma_cycle, is_alpha, is_berge, SearchOutcome};
use crate::hypergraph::{Hypergraph, LineEdgeId, LineGraph, RelId};
use crate::mcs::validate_join_tree_edges;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Node-count guard for exhaustive spanning-tree enumeration.
pub const SPANNING_TREE_GUARD: usize = 10;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {nodes} nodes; the brute-force guard is {guard}")]
    TooLarge { nodes: usize, guard: usize },
}

/// Every spanning tree of an undirected multigraph, as sets of edge ids,
/// by recursive inclusion/exclusion with connectivity pruning. Exponential;
/// guarded at [`SPANNING_TREE_GUARD`] nodes.
pub fn all_spanning_trees(
    node_count: usize,
    edges: &[(LineEdgeId, RelId, RelId)],
) -> Result<Vec<BTreeSet<LineEdgeId>>, OracleError> {
    if node_count > SPANNING_TREE_GUARD {
        return Err(OracleError::TooLarge {
            nodes: node_count,
            guard: SPANNING_TREE_GUARD,
        });
    }
    if node_count == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    recurse(node_count, edges, 0, &mut chosen, &mut out);
    Ok(out)
}

fn recurse(
    n: usize,
    edges: &[(LineEdgeId, RelId, RelId)],
    next: usize,
    chosen: &mut Vec<(LineEdgeId, RelId, RelId)>,
    out: &mut Vec<BTreeSet<LineEdgeId>>,
) {
    if chosen.len() == n - 1 {
        if spans(n, chosen) {
            out.push(chosen.iter().map(|&(id, _, _)| id).collect());
        }
        return;
    }
    if next >= edges.len() || chosen.len() + (edges.len() - next) < n - 1 {
        return;
    }
    // Include edges[next] unless it closes a cycle among chosen edges.
    let e = edges[next];
    if !connects_cycle(chosen, e) {
        chosen.push(e);
        recurse(n, edges, next + 1, chosen, out);
        chosen.pop();
    }
    recurse(n, edges, next + 1, chosen, out);
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

fn connects_cycle(chosen: &[(LineEdgeId, RelId, RelId)], e: (LineEdgeId, RelId, RelId)) -> bool {
    let top = chosen
        .iter()
        .flat_map(|&(_, a, b)| [a.idx(), b.idx()])
        .chain([e.1.idx(), e.2.idx()])
        .max()
        .unwrap_or(0);
    let mut parent: Vec<usize> = (0..=top).collect();
    for &(_, a, b) in chosen {
        let (ra, rb) = (find(&mut parent, a.idx()), find(&mut parent, b.idx()));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    find(&mut parent, e.1.idx()) == find(&mut parent, e.2.idx())
}

fn spans(n: usize, chosen: &[(LineEdgeId, RelId, RelId)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for &(_, a, b) in chosen {
        let (ra, rb) = (find(&mut parent, a.idx()), find(&mut parent, b.idx()));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// All join trees of a connected hypergraph by brute force: spanning trees
/// of the line graph filtered by the running intersection property. As a
/// self-test, the maximum-weight filter must select exactly the same trees.
pub fn all_join_trees_bruteforce(h: &Hypergraph) -> Result<Vec<BTreeSet<LineEdgeId>>, OracleError> {
    let l = LineGraph::from_hypergraph(h);
    let edge_list: Vec<(LineEdgeId, RelId, RelId)> =
        l.edges().iter().map(|e| (e.id, e.a, e.b)).collect();
    let spanning = all_spanning_trees(h.rel_count(), &edge_list)?;

    let weight_of = |tree: &BTreeSet<LineEdgeId>| -> u64 {
        tree.iter().map(|&id| l.edge(id).weight as u64).sum()
    };
    let max_weight = spanning.iter().map(&weight_of).max().unwrap_or(0);

    let rip: Vec<BTreeSet<LineEdgeId>> = spanning
        .iter()
        .filter(|tree| {
            let edges: Vec<(RelId, RelId)> = tree
                .iter()
                .map(|&id| (l.edge(id).a, l.edge(id).b))
                .collect();
            validate_join_tree_edges(h, &edges)
        })
        .cloned()
        .collect();
    let max_trees: Vec<BTreeSet<LineEdgeId>> = if spanning.is_empty() {
        Vec::new()
    } else {
        spanning
            .iter()
            .filter(|t| weight_of(t) == max_weight)
            .cloned()
            .collect()
    };
    // Join trees exist iff some spanning tree satisfies RIP, and then they
    // are exactly the maximum spanning trees.
    if !rip.is_empty() {
        assert_eq!(
            rip, max_trees,
            "RIP filter and max-weight filter disagree; one of the routes is wrong"
        );
    }
    Ok(rip)
}

/// True iff the hypergraph admits a join tree (brute force).
pub fn has_join_tree(h: &Hypergraph) -> Result<bool, OracleError> {
    Ok(!all_join_trees_bruteforce(h)?.is_empty())
}

/// Acyclicity class requested from the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcyclicClass {
    Alpha,
    Berge,
    Gamma,
}

/// Size bounds for generated instances.
#[derive(Clone, Copy, Debug)]
pub struct SizeBounds {
    pub max_edges: usize,
    pub max_vars: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds {
            max_edges: 8,
            max_vars: 12,
        }
    }
}

/// Deterministic random hypergraph of the requested acyclicity class.
///
/// Alpha instances grow a random tree and instantiate each shared variable
/// along a connected subtree (so the tree is a join tree by construction);
/// Berge instances share single fresh variables per star; gamma instances
/// extend a Berge core with covering relations. Every draw is checked
/// against the class decision procedures and rejected on failure, so the
/// post-condition is the checker's verdict, not the construction.
pub fn random_acyclic_hypergraph(seed: u64, class: AcyclicClass, bounds: SizeBounds) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let candidate = match class {
            AcyclicClass::Alpha => gen_alpha(&mut rng, bounds),
            AcyclicClass::Berge => gen_berge(&mut rng, bounds),
            AcyclicClass::Gamma => gen_gamma(&mut rng, bounds),
        };
        let Some(h) = candidate else { continue };
        let ok = match class {
            AcyclicClass::Alpha => is_alpha(&h),
            AcyclicClass::Berge => is_berge(&h),
            AcyclicClass::Gamma => {
                matches!(find_gamma_cycle(&h, 16), SearchOutcome::Absent) && is_alpha(&h)
            }
        };
        if ok && crate::hypergraph::connected_components(&h).len() == 1 {
            return h;
        }
    }
    unreachable!("generator failed to produce a valid instance in 10000 attempts");
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    // parent[i] < i for i >= 1.
    (0..n)
        .map(|i| if i == 0 { 0 } else { rng.gen_range(0..i) })
        .collect()
}

fn gen_alpha(rng: &mut ChaCha8Rng, bounds: SizeBounds) -> Option<Hypergraph> {
    let n = rng.gen_range(2..=bounds.max_edges.max(2));
    let parent = random_tree(rng, n);
    let mut vars: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut var_budget = bounds.max_vars;
    let mut next_var = 0usize;
    let fresh = |budget: &mut usize, next: &mut usize| -> Option<String> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let name = format!("v{}", *next);
        *next += 1;
        Some(name)
    };
    // Each variable spans a connected subtree containing a random tree
    // edge, so the tree satisfies RIP by construction.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &p) in parent.iter().enumerate().skip(1) {
        children[p].push(i);
    }
    for i in 1..n {
        // Cover the tree edge (i, parent[i]) with 1 or 2 variables.
        let copies = if rng.gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..copies {
            let name = fresh(&mut var_budget, &mut next_var)?;
            let mut members = vec![i, parent[i]];
            // Optionally extend the subtree upward or downward.
            while rng.gen_bool(0.35) {
                let from = members[rng.gen_range(0..members.len())];
                let mut options: Vec<usize> = children[from]
                    .iter()
                    .copied()
                    .filter(|c| !members.contains(c))
                    .collect();
                if from != 0 && !members.contains(&parent[from]) {
                    options.push(parent[from]);
                }
                if options.is_empty() {
                    break;
                }
                members.push(options[rng.gen_range(0..options.len())]);
            }
            for m in members {
                vars[m].push(name.clone());
            }
        }
    }
    // A few private vertices for texture.
    for member_vars in vars.iter_mut() {
        if rng.gen_bool(0.4) {
            if let Some(name) = fresh(&mut var_budget, &mut next_var) {
                member_vars.push(name);
            }
        }
    }
    assemble(vars)
}

fn gen_berge(rng: &mut ChaCha8Rng, bounds: SizeBounds) -> Option<Hypergraph> {
    let n = rng.gen_range(2..=bounds.max_edges.max(2));
    let parent = random_tree(rng, n);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &p) in parent.iter().enumerate().skip(1) {
        children[p].push(i);
    }
    let mut vars: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut next_var = 0usize;
    let fresh = |next: &mut usize| {
        let name = format!("v{}", *next);
        *next += 1;
        name
    };
    for (i, kids) in children.iter().enumerate() {
        if kids.is_empty() {
            continue;
        }
        if rng.gen_bool(0.4) {
            // One shared variable for the whole star under i.
            let name = fresh(&mut next_var);
            vars[i].push(name.clone());
            for &c in kids {
                vars[c].push(name.clone());
            }
        } else {
            for &c in kids {
                let name = fresh(&mut next_var);
                vars[i].push(name.clone());
                vars[c].push(name.clone());
            }
        }
    }
    for member_vars in vars.iter_mut() {
        if rng.gen_bool(0.5) || member_vars.is_empty() {
            member_vars.push(fresh(&mut next_var));
        }
    }
    if next_var > bounds.max_vars.max(4) {
        return None;
    }
    assemble(vars)
}

fn gen_gamma(rng: &mut ChaCha8Rng, bounds: SizeBounds) -> Option<Hypergraph> {
    let shrunk = SizeBounds {
        max_edges: bounds.max_edges.saturating_sub(1).max(2),
        max_vars: bounds.max_vars,
    };
    let base = gen_berge(rng, shrunk)?;
    let mut relations: Vec<(String, Vec<String>)> = base.to_relations();
    // Add a covering relation: the union of a relation and one neighbor,
    // which keeps gamma-acyclicity when it merely absorbs an existing edge.
    let i = rng.gen_range(0..relations.len());
    let mut union: BTreeSet<String> = relations[i].1.iter().cloned().collect();
    let j = rng.gen_range(0..relations.len());
    union.extend(relations[j].1.iter().cloned());
    relations.push((
        format!("R{}", relations.len() + 1),
        union.into_iter().collect(),
    ));
    let (h, _) = Hypergraph::from_relations(&relations).ok()?;
    if h.rel_count() != relations.len() {
        return None; // duplicate merged; reject
    }
    Some(h)
}

fn assemble(vars: Vec<Vec<String>>) -> Option<Hypergraph> {
    if vars.iter().any(|v| v.is_empty()) {
        return None;
    }
    let relations: Vec<(String, Vec<String>)> = vars
        .into_iter()
        .enumerate()
        .map(|(i, vs)| (format!("R{}", i + 1), vs))
        .collect();
    let (h, warnings) = Hypergraph::from_relations(&relations).ok()?;
    if !warnings.is_empty() {
        return None; // duplicate hyperedges; reject rather than skew ids
    }
    Some(h)
}

/// Random left-deep plan utilities for plan sweeps.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<RelId> {
    let mut perm: Vec<RelId> = (0..n as u32).map(RelId).collect();
    perm.shuffle(rng);
    perm
}

/// A fresh deterministic RNG for test drivers.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
