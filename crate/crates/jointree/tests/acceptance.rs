//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `--nocapture` to see them). Budgets are asserted with
//! `std::time::Instant`.

mod common;

use common::*;
use jointree::acyclicity::{find_gamma_cycle, SearchOutcome, DEFAULT_GAMMA_BOUND};
use jointree::canonical::bfs_distances;
use jointree::enumerate::{
    count_join_trees, enumerate_edits, materialize_join_trees, tree_edge_ids, CountOutcome,
    Pipeline,
};
use jointree::equivgraph::{build_equivalent_graph, build_equivalent_graph_gamma, build_mwjt};
use jointree::fixtures;
use jointree::hypergraph::{Hypergraph, LineGraph, RelId};
use jointree::mcs::{mcs_tree, mcs_tree_gamma, validate_join_tree_edges, RootedTree, TieRule};
use jointree::oracle::{self, AcyclicClass, SizeBounds};
use jointree::planconv::{convert_plan, is_connected_plan, orphan_plan_from_cycle, sweep_plans};
use jointree::treeindex::TreeIndex;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

fn pass(criterion: u32, what: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its budget: {elapsed:?} > {budget:?}"
    );
    println!(
        "acceptance {criterion}: PASS — {what} ({:.2?} of {budget:?} budget)",
        elapsed
    );
}

/// 1. Enumeration on clique queries matches the closed-form counts
///    3, 16, 125, 1296 with all trees distinct and valid.
#[test]
fn criterion_01_cayley_counts() {
    let start = Instant::now();
    for (n, expected) in [(3usize, 3usize), (4, 16), (5, 125), (6, 1296)] {
        let h = fixtures::clique_query(n);
        let p = Pipeline::prepare(&h, None).unwrap();
        let trees = materialize_join_trees(p.stream());
        assert_eq!(trees.len(), expected, "clique n={n}");
        let distinct: BTreeSet<_> = trees.iter().cloned().collect();
        assert_eq!(distinct.len(), expected, "clique n={n} duplicates");
        for tree in &trees {
            let edges: Vec<(RelId, RelId)> = tree
                .iter()
                .map(|&id| {
                    let e = p.line_graph.edge(id);
                    (e.a, e.b)
                })
                .collect();
            assert!(validate_join_tree_edges(&h, &edges), "clique n={n}");
        }
    }
    pass(
        1,
        "clique enumeration counts 3/16/125/1296",
        start,
        Duration::from_secs(1),
    );
}

/// 2. On 200 seeded alpha-acyclic instances the enumerated set equals both
///    the RIP-filtered and the max-weight-filtered spanning trees.
#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let corpus = default_alpha_corpus(200);
    for (seed, h) in corpus.iter().enumerate() {
        let l = LineGraph::from_hypergraph(h);
        let edge_list: Vec<_> = l.edges().iter().map(|e| (e.id, e.a, e.b)).collect();
        let spanning = oracle::all_spanning_trees(h.rel_count(), &edge_list).unwrap();

        let rip: BTreeSet<_> = spanning
            .iter()
            .filter(|t| {
                let pairs: Vec<(RelId, RelId)> = t
                    .iter()
                    .map(|&id| {
                        let e = l.edge(id);
                        (e.a, e.b)
                    })
                    .collect();
                validate_join_tree_edges(h, &pairs)
            })
            .cloned()
            .collect();
        let best = spanning.iter().map(|t| tree_weight(&l, t)).max().unwrap();
        let max_weight: BTreeSet<_> = spanning
            .iter()
            .filter(|t| tree_weight(&l, t) == best)
            .cloned()
            .collect();

        let p = Pipeline::prepare(h, None).unwrap();
        let enumerated: BTreeSet<_> = materialize_join_trees(p.stream()).into_iter().collect();
        assert_eq!(enumerated, rip, "seed {seed}: RIP filter");
        assert_eq!(enumerated, max_weight, "seed {seed}: max-weight filter");
    }
    pass(
        2,
        "enumeration equals RIP and max-weight filters on 200 instances",
        start,
        Duration::from_secs(30),
    );
}

/// 3. Edit-stream contract: every prefix is a spanning tree of the
///    equivalent graph, no tree repeats, and doubling the output count at
///    fixed input raises wall time by at most 3x.
#[test]
fn criterion_03_edit_stream_contract() {
    let start = Instant::now();
    for h in default_alpha_corpus(200) {
        let p = Pipeline::prepare(&h, None).unwrap();
        let mut stream = p.stream();
        let mut seen: BTreeSet<BTreeSet<_>> = BTreeSet::new();
        seen.insert(stream.current().clone());
        assert!(spanning_in_eg(&p, stream.current()));
        while let Some(edit) = stream.next() {
            assert_ne!(edit.add, edit.remove);
            assert!(spanning_in_eg(&p, stream.current()), "prefix not spanning");
            assert!(seen.insert(stream.current().clone()), "tree repeated");
        }
    }

    // Coarse delay: double the output count on a fixed input.
    let h = fixtures::clique_query(8);
    let t1 = best_of_three(|| run_k(&h, 20_000));
    let t2 = best_of_three(|| run_k(&h, 40_000));
    let ratio = t2.as_secs_f64() / t1.as_secs_f64().max(1e-9);
    assert!(
        ratio <= 3.0,
        "doubling k scaled wall time by {ratio:.2} (> 3.0)"
    );
    pass(
        3,
        &format!("prefix/no-repeat contract holds; 2x output costs {ratio:.2}x time"),
        start,
        Duration::from_secs(30),
    );
}

fn spanning_in_eg(p: &Pipeline, tree: &BTreeSet<jointree::LineEdgeId>) -> bool {
    if tree.len() + 1 != p.eg.node_count() {
        return false;
    }
    let mut parent: Vec<usize> = (0..p.eg.node_count()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        r
    }
    let mut merged = 0;
    for e in p.eg.edges() {
        if tree.contains(&e.id) {
            let (ra, rb) = (find(&mut parent, e.a.idx()), find(&mut parent, e.b.idx()));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
            merged += 1;
        }
    }
    merged == tree.len() && merged + 1 == p.eg.node_count()
}

fn run_k(h: &Hypergraph, k: u64) -> Duration {
    let start = Instant::now();
    match count_join_trees(h, k).unwrap() {
        CountOutcome::LimitReached(n) => assert_eq!(n, k),
        CountOutcome::Exact(n) => panic!("fixture has {n} trees, fewer than k={k}"),
    }
    start.elapsed()
}

fn best_of_three(mut run: impl FnMut() -> Duration) -> Duration {
    (0..3).map(|_| run()).min().unwrap()
}

/// 4. The duplicated hypergraph's tree has strictly increasing weights and
///    the same oracle join-tree set as the original.
#[test]
fn criterion_04_monotonic_weights() {
    let start = Instant::now();
    for (seed, h) in default_alpha_corpus(120).iter().enumerate() {
        let t = mcs_tree(h, h.default_root(), &TieRule::SmallestId).unwrap();
        let (h_star, t_star) = build_mwjt(h, &t).unwrap();
        for (c, p) in t_star.edges() {
            if t_star.parent(p).is_some() {
                assert!(
                    t_star.weight(c) > t_star.weight(p),
                    "seed {seed}: weights not monotonic"
                );
            }
        }
        let before: BTreeSet<_> = oracle::all_join_trees_bruteforce(h)
            .unwrap()
            .into_iter()
            .collect();
        let after: BTreeSet<_> = oracle::all_join_trees_bruteforce(&h_star)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(
            before, after,
            "seed {seed}: duplication changed the join-tree set"
        );
    }
    pass(
        4,
        "monotonic weights and duplication-invariant join-tree sets",
        start,
        Duration::from_secs(10),
    );
}

/// 5. buildEG is weight-independent: original weights and post-duplication
///    weights produce identical multigraphs by (edge id, endpoints).
#[test]
fn criterion_05_weight_independent_equivalent_graph() {
    let start = Instant::now();
    for (seed, h) in default_alpha_corpus(120).iter().enumerate() {
        let l = LineGraph::from_hypergraph(h);
        let t = mcs_tree(h, h.default_root(), &TieRule::SmallestId).unwrap();
        let eg = build_equivalent_graph(&l, &t).unwrap();
        let (h_star, t_star) = build_mwjt(h, &t).unwrap();
        let l_star = LineGraph::from_hypergraph(&h_star);
        let eg_star = build_equivalent_graph(&l_star, &t_star).unwrap();
        assert_eq!(eg.shape(), eg_star.shape(), "seed {seed}");
        assert_eq!(eg.deleted(), eg_star.deleted(), "seed {seed}");
    }
    pass(
        5,
        "equivalent graphs identical under original and duplicated weights",
        start,
        Duration::from_secs(30),
    );
}

/// 6. Canonical trees on 100+ Berge instances: every node's MCS depth
///    equals its BFS distance for every root, and every tie permutation
///    (exhaustive up to 7 relations, sampled above) gives the same edges.
#[test]
fn criterion_06_canonical_trees() {
    let start = Instant::now();
    let small = corpus(
        AcyclicClass::Berge,
        100,
        SizeBounds {
            max_edges: 7,
            max_vars: 24,
        },
    );
    let large = corpus(
        AcyclicClass::Berge,
        8,
        SizeBounds {
            max_edges: 11,
            max_vars: 40,
        },
    );
    for (seed, h) in small.iter().chain(large.iter()).enumerate() {
        let l = LineGraph::from_hypergraph(h);
        let n = h.rel_count();
        for root in h.rels() {
            let dist = bfs_distances(&l, root);
            let reference = mcs_tree(h, root, &TieRule::SmallestId).unwrap();
            for r in h.rels() {
                assert_eq!(
                    Some(reference.depth(r)),
                    dist[r.idx()],
                    "seed {seed}: depth off BFS distance"
                );
            }
            let reference_edges = reference.edge_set();
            let mut sweep = |perm: &[RelId]| {
                let t = mcs_tree(h, root, &TieRule::Permutation(perm.to_vec())).unwrap();
                assert_eq!(
                    t.edge_set(),
                    reference_edges,
                    "seed {seed}: tie choice changed the canonical tree"
                );
            };
            if n <= 7 {
                let mut perm: Vec<RelId> = h.rels().collect();
                permute_all(&mut perm, 0, &mut sweep);
            } else {
                let mut rng = oracle::rng_from_seed(seed as u64);
                for _ in 0..30 {
                    let perm = oracle::random_permutation(&mut rng, n);
                    sweep(&perm);
                }
            }
        }
    }
    pass(
        6,
        "canonical depths equal BFS distances; all tie sweeps agree",
        start,
        Duration::from_secs(60),
    );
}

fn permute_all(items: &mut Vec<RelId>, k: usize, visit: &mut impl FnMut(&[RelId])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_all(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// 7. Left-deep plan characterization, both directions: gamma-acyclic
///    fixtures convert every connected permutation; every gamma-cyclic
///    fixture yields a connected orphaned permutation.
#[test]
fn criterion_07_plan_characterization() {
    let start = Instant::now();
    // Forward: gamma-acyclic fixtures sweep clean.
    let mut gamma_fixtures = vec![
        fixtures::h_path(),
        fixtures::clique_query(4),
        fixtures::clique_query(5),
    ];
    for seed in 0..10u64 {
        gamma_fixtures.push(oracle::random_acyclic_hypergraph(
            seed,
            AcyclicClass::Gamma,
            SizeBounds {
                max_edges: 7,
                max_vars: 18,
            },
        ));
    }
    for (i, h) in gamma_fixtures.iter().enumerate() {
        assert!(
            matches!(
                find_gamma_cycle(h, DEFAULT_GAMMA_BOUND),
                SearchOutcome::Absent
            ),
            "fixture {i} must be gamma-acyclic"
        );
        let report = sweep_plans(h, 7).unwrap();
        assert!(report.connected_plans > 0, "fixture {i}");
        assert!(report.orphaned.is_empty(), "fixture {i}: orphan found");
        assert_eq!(report.rip_failures, 0, "fixture {i}: invalid conversion");
    }
    // Converse: gamma-cyclic fixtures produce an orphaned connected plan.
    for (i, h) in [
        fixtures::h_gam(),
        fixtures::h_comp(),
        fixtures::hub_six(),
        fixtures::pure_cycle(3),
        fixtures::pure_cycle(4),
        fixtures::pure_cycle(5),
    ]
    .iter()
    .enumerate()
    {
        let cycle = match find_gamma_cycle(h, DEFAULT_GAMMA_BOUND) {
            SearchOutcome::Found(c) => c,
            other => panic!("fixture {i} must have a gamma cycle, got {other:?}"),
        };
        let plan = orphan_plan_from_cycle(h, &cycle);
        assert!(
            is_connected_plan(h, &plan),
            "fixture {i}: plan disconnected"
        );
        assert!(convert_plan(h, &plan).is_err(), "fixture {i}: no orphan");
    }
    pass(
        7,
        "connected sweeps orphan-free on gamma fixtures; orphans found on cyclic ones",
        start,
        Duration::from_secs(60),
    );
}

/// 8. MCS structural invariants on the random corpus, all roots: every parented
///    tree edge keeps a private vertex, and edges sharing a fresh vertex
///    are siblings.
#[test]
fn criterion_08_mcs_structure() {
    let start = Instant::now();
    for (seed, h) in default_alpha_corpus(200).iter().enumerate() {
        for root in h.rels() {
            let t = mcs_tree(h, root, &TieRule::SmallestId).unwrap();
            let edges: Vec<RelId> = t.edges().map(|(c, _)| c).collect();
            for &c in &edges {
                let p = t.parent(c).unwrap();
                if t.parent(p).is_some() {
                    assert!(
                        !t.label(c).is_subset(t.label(p)),
                        "seed {seed}: edge label inside its parent's"
                    );
                }
            }
            for &c1 in &edges {
                let p1 = match t.parent(c1).and_then(|p| t.parent(p).map(|_| p)) {
                    Some(p) => p,
                    None => continue,
                };
                for &c2 in &edges {
                    let p2 = match t.parent(c2).and_then(|p| t.parent(p).map(|_| p)) {
                        Some(p) => p,
                        None => continue,
                    };
                    if c1 == c2 {
                        continue;
                    }
                    let fresh1: BTreeSet<_> =
                        t.label(c1).difference(t.label(p1)).copied().collect();
                    let fresh2: BTreeSet<_> =
                        t.label(c2).difference(t.label(p2)).copied().collect();
                    if fresh1.intersection(&fresh2).next().is_some() {
                        assert_eq!(p1, p2, "seed {seed}: fresh-variable edges not siblings");
                    }
                }
            }
        }
    }
    pass(
        8,
        "MCS private-vertex and sibling invariants on all roots",
        start,
        Duration::from_secs(30),
    );
}

/// 9. Tree index vs naive walks: 10,000 mixed queries on trees up to 1000
///    nodes.
#[test]
fn criterion_09_tree_index() {
    let start = Instant::now();
    let mut rng = oracle::rng_from_seed(42);
    let mut queries = 0usize;
    for &n in &[1000usize, 700, 300, 50] {
        let (_h, t) = random_tree_hypergraph(&mut rng, n);
        let idx = TreeIndex::build(&t);
        for _ in 0..2500 {
            let (u, v) = random_pair(&mut rng, n);
            let (u, v) = (RelId(u), RelId(v));
            assert_eq!(idx.lca(u, v), naive_lca(&t, u, v));
            let d = rand::Rng::gen_range(&mut rng, 0..=t.depth(u));
            assert_eq!(
                idx.level_ancestor(u, d).unwrap(),
                naive_level_ancestor(&t, u, d)
            );
            if u != v && !t.is_tree_edge(u, v) {
                let le = idx.lca_edges(u, v).unwrap();
                let path = tree_path(&t, u, v);
                let l = naive_lca(&t, u, v);
                assert_eq!(le.lca, l);
                for child in le.children() {
                    assert!(path.contains(&child));
                    assert_eq!(t.parent(child), Some(l));
                }
            }
            queries += 1;
        }
    }
    assert!(queries >= 10_000);
    pass(
        9,
        "10,000 index queries match naive walks",
        start,
        Duration::from_secs(5),
    );
}

fn random_pair(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> (u32, u32) {
    (
        rand::Rng::gen_range(rng, 0..n as u32),
        rand::Rng::gen_range(rng, 0..n as u32),
    )
}

/// A tree-shaped hypergraph (fresh shared variable per edge) whose rooted
/// tree mirrors random parent links.
fn random_tree_hypergraph(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> (Hypergraph, RootedTree) {
    let mut vars: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut parents: Vec<Option<RelId>> = vec![None; n];
    for i in 1..n {
        let p = rand::Rng::gen_range(rng, 0..i);
        parents[i] = Some(RelId(p as u32));
        let shared = format!("s{i}");
        vars[i].push(shared.clone());
        vars[p].push(shared);
    }
    vars[0].push("r".to_string());
    let relations: Vec<(String, Vec<String>)> = vars
        .into_iter()
        .enumerate()
        .map(|(i, vs)| (format!("R{i}"), vs))
        .collect();
    let (h, _) = Hypergraph::from_relations(&relations).unwrap();
    let order: Vec<RelId> = h.rels().collect();
    let t = RootedTree::from_parents(&h, RelId(0), parents, order);
    (h, t)
}

/// 10. The gamma fast path produces the same join trees as the general
///     path on gamma-acyclic fixtures.
#[test]
fn criterion_10_gamma_fast_path() {
    let start = Instant::now();
    let mut gamma_fixtures = vec![
        fixtures::h_path(),
        fixtures::clique_query(3),
        fixtures::clique_query(4),
        fixtures::clique_query(5),
    ];
    for seed in 100..130u64 {
        gamma_fixtures.push(oracle::random_acyclic_hypergraph(
            seed,
            AcyclicClass::Gamma,
            SizeBounds::default(),
        ));
    }
    for (i, h) in gamma_fixtures.iter().enumerate() {
        let general = Pipeline::prepare(h, None).unwrap();
        let general_trees: BTreeSet<_> = materialize_join_trees(general.stream())
            .into_iter()
            .collect();

        let root = general.tree.root();
        let (tg, union_edges) = mcs_tree_gamma(h, root).unwrap();
        let eg_gamma = build_equivalent_graph_gamma(&union_edges, &tg).unwrap();
        let initial = tree_edge_ids(&general.line_graph, &tg);
        let stream = enumerate_edits(&eg_gamma, &initial).unwrap();
        let fast_trees: BTreeSet<_> = materialize_join_trees(stream).into_iter().collect();
        assert_eq!(fast_trees, general_trees, "fixture {i}");
    }
    pass(
        10,
        "gamma fast path equals the general path",
        start,
        Duration::from_secs(30),
    );
}
