//! Small named hypergraphs used across tests, docs and the verify command.

use crate::hypergraph::Hypergraph;

fn build(relations: &[(&str, Vec<&str>)]) -> Hypergraph {
    let (h, warnings) = Hypergraph::from_relations(relations).expect("fixture is valid");
    assert!(warnings.is_empty(), "fixture has duplicate hyperedges");
    h
}

/// Path: R1={a,b}, R2={b,c}, R3={c,d}. Berge-acyclic.
pub fn h_path() -> Hypergraph {
    build(&[
        ("R1", vec!["a", "b"]),
        ("R2", vec!["b", "c"]),
        ("R3", vec!["c", "d"]),
    ])
}

/// Composite-key chain: A={x,y}, B={x,y,z}, C={x,z}. Alpha-acyclic but not
/// linear, so neither Berge- nor gamma-acyclic.
pub fn h_comp() -> Hypergraph {
    build(&[
        ("A", vec!["x", "y"]),
        ("B", vec!["x", "y", "z"]),
        ("C", vec!["x", "z"]),
    ])
}

/// Triangle: R1={a,b}, R2={b,c}, R3={c,a}. Not alpha-acyclic.
pub fn h_cyc() -> Hypergraph {
    build(&[
        ("R1", vec!["a", "b"]),
        ("R2", vec!["b", "c"]),
        ("R3", vec!["c", "a"]),
    ])
}

/// R1={a,b}, R2={b,c}, R3={a,b,c}. Alpha-acyclic with a gamma cycle.
pub fn h_gam() -> Hypergraph {
    build(&[
        ("R1", vec!["a", "b"]),
        ("R2", vec!["b", "c"]),
        ("R3", vec!["a", "b", "c"]),
    ])
}

/// Clique query on n relations: Ri = {a, bi}. Its line graph is K_n with
/// unit weights, so it is Berge-acyclic with n^(n-2) join trees.
pub fn clique_query(n: usize) -> Hypergraph {
    assert!(n >= 1);
    let names: Vec<String> = (1..=n).map(|i| format!("R{i}")).collect();
    let privs: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let rels: Vec<(&str, Vec<&str>)> = (0..n)
        .map(|i| (names[i].as_str(), vec!["a", privs[i].as_str()]))
        .collect();
    build(&rels)
}

/// Six relations around a hub variable with a composite cluster:
/// P={a,p}, S={a,s}, T={a,c}, U={a,c,d}, W={a,c,e}, Y={a,d}.
/// |H| = 14 and |L| = 19; exercises tentative-parent overwrites in MCS and
/// all buildEG branches.
pub fn hub_six() -> Hypergraph {
    build(&[
        ("P", vec!["a", "p"]),
        ("S", vec!["a", "s"]),
        ("T", vec!["a", "c"]),
        ("U", vec!["a", "c", "d"]),
        ("W", vec!["a", "c", "e"]),
        ("Y", vec!["a", "d"]),
    ])
}

/// Pure cycle of k >= 3 relations: Ri = {x(i-1), xi} mod k. Every vertex is
/// exclusive to its two neighbors, so the cycle is a gamma cycle and the
/// hypergraph is not alpha-acyclic.
pub fn pure_cycle(k: usize) -> Hypergraph {
    assert!(k >= 3);
    let names: Vec<String> = (0..k).map(|i| format!("R{i}")).collect();
    let vars: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let rels: Vec<(&str, Vec<&str>)> = (0..k)
        .map(|i| {
            (
                names[i].as_str(),
                vec![vars[(i + k - 1) % k].as_str(), vars[i].as_str()],
            )
        })
        .collect();
    build(&rels)
}
