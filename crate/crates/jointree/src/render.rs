//! JSON and DOT serialization of trees and equivalent graphs.
//!
//! Trees serialize by relation name so documents survive reloading into a
//! hypergraph with the same relations. DOT output is undirected; tree edges
//! are labeled with their shared variables.

use crate::equivgraph::EquivalentGraph;
use crate::hypergraph::{Hypergraph, LineGraph, RelId};
use crate::mcs::RootedTree;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("tree document must name every relation exactly once")]
    BadNodeSet,
    #[error("tree document has no root")]
    NoRoot,
    #[error("parent links contain a cycle or unreachable node")]
    NotATree,
    #[error("invalid tree json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
pub struct TreeDoc {
    pub root: String,
    pub nodes: Vec<TreeNodeDoc>,
}

#[derive(Serialize, Deserialize)]
pub struct TreeNodeDoc {
    pub relation: String,
    pub parent: Option<String>,
    pub weight: u32,
    pub shared: Vec<String>,
    pub depth: u32,
}

/// Renders a rooted tree as a JSON document.
pub fn tree_to_json(h: &Hypergraph, t: &RootedTree) -> String {
    let nodes = h
        .rels()
        .map(|r| TreeNodeDoc {
            relation: h.rel_name(r).to_string(),
            parent: t.parent(r).map(|p| h.rel_name(p).to_string()),
            weight: t.weight(r),
            shared: t
                .label(r)
                .iter()
                .map(|&x| h.var_name(x).to_string())
                .collect(),
            depth: t.depth(r),
        })
        .collect();
    let doc = TreeDoc {
        root: h.rel_name(t.root()).to_string(),
        nodes,
    };
    serde_json::to_string_pretty(&doc).expect("tree document serializes")
}

/// Reloads a tree document against the hypergraph it was produced from.
pub fn tree_from_json(h: &Hypergraph, text: &str) -> Result<RootedTree, RenderError> {
    let doc: TreeDoc = serde_json::from_str(text)?;
    let root = h
        .rel_by_name(&doc.root)
        .ok_or_else(|| RenderError::UnknownRelation(doc.root.clone()))?;
    if doc.nodes.len() != h.rel_count() {
        return Err(RenderError::BadNodeSet);
    }
    let mut parents: Vec<Option<RelId>> = vec![None; h.rel_count()];
    let mut seen = vec![false; h.rel_count()];
    let mut order = Vec::with_capacity(doc.nodes.len());
    for node in &doc.nodes {
        let r = h
            .rel_by_name(&node.relation)
            .ok_or_else(|| RenderError::UnknownRelation(node.relation.clone()))?;
        if seen[r.idx()] {
            return Err(RenderError::BadNodeSet);
        }
        seen[r.idx()] = true;
        order.push(r);
        match &node.parent {
            Some(p) => {
                parents[r.idx()] = Some(
                    h.rel_by_name(p)
                        .ok_or_else(|| RenderError::UnknownRelation(p.clone()))?,
                );
            }
            None if r == root => {}
            None => return Err(RenderError::NoRoot),
        }
    }
    if parents[root.idx()].is_some() {
        return Err(RenderError::NotATree);
    }
    // Every node must reach the root without cycles.
    for r in h.rels() {
        let mut cur = r;
        let mut steps = 0;
        while let Some(p) = parents[cur.idx()] {
            cur = p;
            steps += 1;
            if steps > h.rel_count() {
                return Err(RenderError::NotATree);
            }
        }
        if cur != root {
            return Err(RenderError::NotATree);
        }
    }
    Ok(RootedTree::from_parents(h, root, parents, order))
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\\\""))
}

/// Renders a rooted tree in DOT. Edges are undirected (the child-to-parent
/// orientation is suppressed) and labeled with their shared variables.
pub fn tree_to_dot(h: &Hypergraph, t: &RootedTree) -> String {
    let mut out = String::from("graph jointree {\n");
    out.push_str(&format!("  // root: {}\n", h.rel_name(t.root())));
    for r in h.rels() {
        if let Some(p) = t.parent(r) {
            let label = t
                .label(r)
                .iter()
                .map(|&x| h.var_name(x).to_string())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "  {} -- {} [label={}];\n",
                quote(h.rel_name(p)),
                quote(h.rel_name(r)),
                quote(&label)
            ));
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct EgDoc {
    nodes: Vec<String>,
    edges: Vec<EgEdgeDoc>,
    deleted: Vec<u32>,
}

#[derive(Serialize)]
struct EgEdgeDoc {
    id: u32,
    a: String,
    b: String,
    weight: u32,
    original_a: String,
    original_b: String,
}

/// Renders an equivalent graph as JSON: surviving edges with their original
/// ids and current endpoints, plus the deleted (non-MST) ids.
pub fn eg_to_json(h: &Hypergraph, l: &LineGraph, eg: &EquivalentGraph) -> String {
    let doc = EgDoc {
        nodes: h.rels().map(|r| h.rel_name(r).to_string()).collect(),
        edges: eg
            .edges()
            .iter()
            .map(|e| {
                let orig = l.edge(e.id);
                EgEdgeDoc {
                    id: e.id.0,
                    a: h.rel_name(e.a).to_string(),
                    b: h.rel_name(e.b).to_string(),
                    weight: e.weight,
                    original_a: h.rel_name(orig.a).to_string(),
                    original_b: h.rel_name(orig.b).to_string(),
                }
            })
            .collect(),
        deleted: eg.deleted().iter().map(|d| d.0).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("equivalent graph serializes")
}

/// Renders an equivalent graph in DOT; parallel edges are drawn separately
/// and deleted edges are omitted.
pub fn eg_to_dot(h: &Hypergraph, eg: &EquivalentGraph) -> String {
    let mut out = String::from("graph equivalent {\n");
    for e in eg.edges() {
        out.push_str(&format!(
            "  {} -- {} [label=\"e{} w={}\"];\n",
            quote(h.rel_name(e.a)),
            quote(h.rel_name(e.b)),
            e.id.0,
            e.weight
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mcs::{mcs_tree, validate_join_tree, TieRule};

    #[test]
    fn tree_json_round_trip() {
        let h = fixtures::hub_six();
        let t = mcs_tree(&h, h.rel_by_name("P").unwrap(), &TieRule::SmallestId).unwrap();
        let json = tree_to_json(&h, &t);
        let back = tree_from_json(&h, &json).unwrap();
        assert_eq!(back.edge_set(), t.edge_set());
        assert_eq!(back.root(), t.root());
        assert!(validate_join_tree(&h, &back));
    }

    #[test]
    fn tree_json_rejects_cycles() {
        let h = fixtures::h_path();
        let doc = r#"{
            "root": "R1",
            "nodes": [
                {"relation": "R1", "parent": null, "weight": 0, "shared": [], "depth": 0},
                {"relation": "R2", "parent": "R3", "weight": 1, "shared": ["c"], "depth": 1},
                {"relation": "R3", "parent": "R2", "weight": 1, "shared": ["c"], "depth": 2}
            ]
        }"#;
        assert!(matches!(
            tree_from_json(&h, doc),
            Err(RenderError::NotATree)
        ));
    }

    #[test]
    fn dot_contains_labeled_edges() {
        let h = fixtures::h_path();
        let t = mcs_tree(&h, h.rel_by_name("R1").unwrap(), &TieRule::SmallestId).unwrap();
        let dot = tree_to_dot(&h, &t);
        assert!(dot.contains("\"R1\" -- \"R2\" [label=\"b\"]"));
        assert!(dot.starts_with("graph jointree {"));
    }

    #[test]
    fn eg_json_lists_deleted_ids() {
        let h = fixtures::h_comp();
        let l = LineGraph::from_hypergraph(&h);
        let t = mcs_tree(&h, h.rel_by_name("B").unwrap(), &TieRule::SmallestId).unwrap();
        let eg = crate::equivgraph::build_equivalent_graph(&l, &t).unwrap();
        let json = eg_to_json(&h, &l, &eg);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["deleted"].as_array().unwrap().len(), 1);
        assert_eq!(value["edges"].as_array().unwrap().len(), 2);
    }
}
