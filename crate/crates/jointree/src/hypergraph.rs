//! Query ingestion: join predicates, the query hypergraph and its weighted
//! line graph.
//!
//! A query is a set of equi-join predicates `Ra.i = Rb.j`. Attributes that
//! are transitively equated collapse into one variable (a connected component
//! of the predicate graph); each relation becomes a hyperedge over the
//! variables it touches. The line graph has a node per hyperedge and an edge
//! per intersecting pair, weighted by the number of shared variables.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Index of a relation (hyperedge) within a [`Hypergraph`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct RelId(pub u32);

/// Index of a variable (vertex) within a [`Hypergraph`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VarId(pub u32);

/// Stable identity of a line-graph edge. Sliding transformations move an
/// edge's endpoints but never change its id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct LineEdgeId(pub u32);

impl RelId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl VarId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl LineEdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LineEdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// An equi-join predicate `R<a>.<i> = R<b>.<j>`, stored in normalized form
/// with `(a, i) < (b, j)` so that symmetric duplicates collapse.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Predicate {
    pub a: u32,
    pub i: u32,
    pub b: u32,
    pub j: u32,
}

impl Predicate {
    /// Normalizes endpoint order. Rejects self-joins (`a == b`).
    pub fn new(a: u32, i: u32, b: u32, j: u32) -> Result<Self, CoreError> {
        if a == b {
            return Err(CoreError::SelfJoin { rel: a });
        }
        if a == 0 || b == 0 || i == 0 || j == 0 {
            return Err(CoreError::ZeroIndex);
        }
        if (a, i) <= (b, j) {
            Ok(Predicate { a, i, b, j })
        } else {
            Ok(Predicate {
                a: b,
                i: j,
                b: a,
                j: i,
            })
        }
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("line {line}: malformed predicate `{text}` (expected `R<a>.<i>=R<b>.<j>`)")]
    Malformed { line: usize, text: String },
    #[error("line {line}: self-join predicate `{text}` is not allowed")]
    SelfJoinAt { line: usize, text: String },
    #[error("self-join on relation R{rel} is not allowed")]
    SelfJoin { rel: u32 },
    #[error("relation and attribute indices start at 1")]
    ZeroIndex,
    #[error("empty predicate set")]
    EmptyQuery,
    #[error("relation `{name}` has an empty variable set")]
    EmptyHyperedge { name: String },
    #[error("hypergraph has no relations")]
    NoRelations,
    #[error("invalid hypergraph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses a predicate list in the `R<a>.<i>=R<b>.<j>` line format.
///
/// Blank lines and `#` comments are skipped; duplicate and symmetric
/// predicates collapse to one. Self-joins are rejected with the offending
/// line number.
pub fn parse_query(text: &str) -> Result<BTreeSet<Predicate>, CoreError> {
    let mut preds = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let pred = parse_predicate(line).ok_or_else(|| CoreError::Malformed {
            line: lineno + 1,
            text: line.to_string(),
        })?;
        if pred.a == pred.b {
            return Err(CoreError::SelfJoinAt {
                line: lineno + 1,
                text: line.to_string(),
            });
        }
        preds.insert(Predicate::new(pred.a, pred.i, pred.b, pred.j)?);
    }
    if preds.is_empty() {
        return Err(CoreError::EmptyQuery);
    }
    Ok(preds)
}

struct RawPredicate {
    a: u32,
    i: u32,
    b: u32,
    j: u32,
}

fn parse_predicate(line: &str) -> Option<RawPredicate> {
    let (lhs, rhs) = line.split_once('=')?;
    let (a, i) = parse_attr(lhs.trim())?;
    let (b, j) = parse_attr(rhs.trim())?;
    Some(RawPredicate { a, i, b, j })
}

fn parse_attr(s: &str) -> Option<(u32, u32)> {
    let rest = s.strip_prefix('R')?;
    let (rel, attr) = rest.split_once('.')?;
    let rel: u32 = rel.parse().ok()?;
    let attr: u32 = attr.parse().ok()?;
    if rel == 0 || attr == 0 {
        return None;
    }
    Some((rel, attr))
}

/// The query hypergraph: a vertex per variable, a hyperedge per relation.
///
/// Invariants enforced at construction: no empty hyperedge, no two
/// hyperedges with the same vertex set (duplicates are merged with a
/// warning), no isolated vertices (vertices exist only inside hyperedges).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    rel_names: Vec<String>,
    var_names: Vec<String>,
    chi: Vec<BTreeSet<VarId>>,
    var_rels: Vec<Vec<RelId>>,
}

impl Hypergraph {
    /// Builds a hypergraph from named relations over named variables.
    /// Relations with identical vertex sets are merged into the first
    /// occurrence; each merge is reported as a warning string.
    pub fn from_relations<S: AsRef<str>>(
        relations: &[(S, Vec<S>)],
    ) -> Result<(Hypergraph, Vec<String>), CoreError> {
        if relations.is_empty() {
            return Err(CoreError::NoRelations);
        }
        let mut var_ids: BTreeMap<String, VarId> = BTreeMap::new();
        let mut var_names = Vec::new();
        let mut assign = |name: &str, var_names: &mut Vec<String>| -> VarId {
            *var_ids.entry(name.to_string()).or_insert_with(|| {
                let id = VarId(var_names.len() as u32);
                var_names.push(name.to_string());
                id
            })
        };

        let mut rel_names = Vec::new();
        let mut chi: Vec<BTreeSet<VarId>> = Vec::new();
        let mut seen: HashMap<BTreeSet<VarId>, usize> = HashMap::new();
        let mut warnings = Vec::new();
        for (name, vars) in relations {
            let name = name.as_ref();
            if vars.is_empty() {
                return Err(CoreError::EmptyHyperedge {
                    name: name.to_string(),
                });
            }
            let set: BTreeSet<VarId> = vars
                .iter()
                .map(|v| assign(v.as_ref(), &mut var_names))
                .collect();
            if let Some(&prev) = seen.get(&set) {
                warnings.push(format!(
                    "relation `{}` duplicates `{}` (same variable set); merged",
                    name, rel_names[prev]
                ));
                continue;
            }
            seen.insert(set.clone(), chi.len());
            rel_names.push(name.to_string());
            chi.push(set);
        }
        Ok((Hypergraph::assemble(rel_names, var_names, chi), warnings))
    }

    fn assemble(rel_names: Vec<String>, var_names: Vec<String>, chi: Vec<BTreeSet<VarId>>) -> Self {
        // Variables referenced by no remaining hyperedge keep their slot but
        // have an empty neighborhood; they cannot arise from public
        // constructors.
        let mut var_rels = vec![Vec::new(); var_names.len()];
        for (r, set) in chi.iter().enumerate() {
            for &x in set {
                var_rels[x.idx()].push(RelId(r as u32));
            }
        }
        Hypergraph {
            rel_names,
            var_names,
            chi,
            var_rels,
        }
    }

    pub fn rel_count(&self) -> usize {
        self.rel_names.len()
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn rels(&self) -> impl Iterator<Item = RelId> {
        (0..self.rel_count() as u32).map(RelId)
    }

    pub fn chi(&self, r: RelId) -> &BTreeSet<VarId> {
        &self.chi[r.idx()]
    }

    /// The neighborhood of `x`: all hyperedges containing it.
    pub fn rels_of(&self, x: VarId) -> &[RelId] {
        &self.var_rels[x.idx()]
    }

    pub fn rel_name(&self, r: RelId) -> &str {
        &self.rel_names[r.idx()]
    }

    pub fn var_name(&self, x: VarId) -> &str {
        &self.var_names[x.idx()]
    }

    pub fn rel_by_name(&self, name: &str) -> Option<RelId> {
        self.rel_names
            .iter()
            .position(|n| n == name)
            .map(|i| RelId(i as u32))
    }

    /// |H| = sum of hyperedge cardinalities.
    pub fn size(&self) -> usize {
        self.chi.iter().map(|s| s.len()).sum()
    }

    /// Number of shared variables of two relations.
    pub fn shared(&self, a: RelId, b: RelId) -> BTreeSet<VarId> {
        self.chi(a).intersection(self.chi(b)).copied().collect()
    }

    /// Default root for tree constructions: the largest relation by arity,
    /// ties broken by smallest id.
    pub fn default_root(&self) -> RelId {
        let mut best = RelId(0);
        for r in self.rels() {
            if self.chi(r).len() > self.chi(best).len() {
                best = r;
            }
        }
        best
    }

    /// Renders the relations back to `(name, sorted variable names)` pairs.
    pub fn to_relations(&self) -> Vec<(String, Vec<String>)> {
        self.rels()
            .map(|r| {
                (
                    self.rel_name(r).to_string(),
                    self.chi(r)
                        .iter()
                        .map(|&x| self.var_name(x).to_string())
                        .collect(),
                )
            })
            .collect()
    }
}

/// Builds the query hypergraph from a predicate set by computing connected
/// components of the predicate graph (vertices are `R<a>.<i>` attribute
/// slots, edges are predicates). One variable per component; each relation's
/// hyperedge collects the components of its attributes. Transitively implied
/// predicates are therefore redundant on input.
///
/// A variable is named after the smallest `(relation, attribute)` pair in
/// its component, which makes the output independent of predicate order.
pub fn build_hypergraph(
    preds: &BTreeSet<Predicate>,
) -> Result<(Hypergraph, Vec<String>), CoreError> {
    if preds.is_empty() {
        return Err(CoreError::EmptyQuery);
    }
    // Attribute slots that occur in at least one predicate.
    let mut slots: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut slot_list: Vec<(u32, u32)> = Vec::new();
    let mut slot_of = |key: (u32, u32), list: &mut Vec<(u32, u32)>| -> usize {
        *slots.entry(key).or_insert_with(|| {
            list.push(key);
            list.len() - 1
        })
    };
    let mut pred_edges = Vec::with_capacity(preds.len());
    for p in preds {
        let u = slot_of((p.a, p.i), &mut slot_list);
        let v = slot_of((p.b, p.j), &mut slot_list);
        pred_edges.push((u, v));
    }

    let mut dsu = Dsu::new(slot_list.len());
    for &(u, v) in &pred_edges {
        dsu.union(u, v);
    }

    // Component representative = minimal (rel, attr) slot, which names the
    // variable.
    let mut rep: HashMap<usize, (u32, u32)> = HashMap::new();
    for (idx, &slot) in slot_list.iter().enumerate() {
        let root = dsu.find(idx);
        let entry = rep.entry(root).or_insert(slot);
        if slot < *entry {
            *entry = slot;
        }
    }

    // Deterministic variable numbering: sort components by representative.
    let mut comp_reps: Vec<(usize, (u32, u32))> = rep.into_iter().collect();
    comp_reps.sort_by_key(|&(_, min_slot)| min_slot);
    let comp_var: HashMap<usize, VarId> = comp_reps
        .iter()
        .enumerate()
        .map(|(i, &(root, _))| (root, VarId(i as u32)))
        .collect();
    let var_names: Vec<String> = comp_reps
        .iter()
        .map(|&(_, (a, i))| format!("R{a}.{i}"))
        .collect();

    // Relations present in the query, in ascending id order.
    let rel_ids: BTreeSet<u32> = preds.iter().flat_map(|p| [p.a, p.b]).collect();
    let mut rel_index: HashMap<u32, usize> = HashMap::new();
    let mut rel_names = Vec::new();
    for &a in &rel_ids {
        rel_index.insert(a, rel_names.len());
        rel_names.push(format!("R{a}"));
    }

    let mut chi: Vec<BTreeSet<VarId>> = vec![BTreeSet::new(); rel_names.len()];
    for (idx, &(a, _)) in slot_list.iter().enumerate() {
        let var = comp_var[&dsu.find(idx)];
        chi[rel_index[&a]].insert(var);
    }

    // Same duplicate-merging rule as the direct constructor.
    let mut seen: HashMap<BTreeSet<VarId>, usize> = HashMap::new();
    let mut warnings = Vec::new();
    let mut kept_names = Vec::new();
    let mut kept_chi = Vec::new();
    for (i, set) in chi.into_iter().enumerate() {
        if let Some(&prev) = seen.get(&set) {
            let prev_name: &String = &kept_names[prev];
            warnings.push(format!(
                "relation `{}` duplicates `{}` (same variable set); merged",
                rel_names[i], prev_name
            ));
            continue;
        }
        seen.insert(set.clone(), kept_chi.len());
        kept_names.push(rel_names[i].clone());
        kept_chi.push(set);
    }
    Ok((
        Hypergraph::assemble(kept_names, var_names, kept_chi),
        warnings,
    ))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One edge of the weighted line graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineEdge {
    pub id: LineEdgeId,
    pub a: RelId,
    pub b: RelId,
    pub weight: u32,
    /// The shared variables; `weight == label.len()`.
    pub label: BTreeSet<VarId>,
}

/// The weighted line graph of a hypergraph: a simple graph over hyperedges
/// with an edge wherever two hyperedges intersect. Edge ids are assigned in
/// ascending `(a, b)` endpoint order and are stable for a given hypergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineGraph {
    node_count: usize,
    edges: Vec<LineEdge>,
}

impl LineGraph {
    /// Derives the line graph from the hypergraph via variable
    /// neighborhoods: every pair in `H|_x` shares `x`.
    pub fn from_hypergraph(h: &Hypergraph) -> LineGraph {
        let mut labels: BTreeMap<(RelId, RelId), BTreeSet<VarId>> = BTreeMap::new();
        for x in 0..h.var_count() as u32 {
            let rels = h.rels_of(VarId(x));
            for (i, &a) in rels.iter().enumerate() {
                for &b in &rels[i + 1..] {
                    let key = if a < b { (a, b) } else { (b, a) };
                    labels.entry(key).or_default().insert(VarId(x));
                }
            }
        }
        Self::from_labels(h.rel_count(), labels)
    }

    fn from_labels(
        node_count: usize,
        labels: BTreeMap<(RelId, RelId), BTreeSet<VarId>>,
    ) -> LineGraph {
        let edges = labels
            .into_iter()
            .enumerate()
            .map(|(i, ((a, b), label))| LineEdge {
                id: LineEdgeId(i as u32),
                a,
                b,
                weight: label.len() as u32,
                label,
            })
            .collect();
        LineGraph { node_count, edges }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[LineEdge] {
        &self.edges
    }

    pub fn edge(&self, id: LineEdgeId) -> &LineEdge {
        &self.edges[id.idx()]
    }

    /// Looks up an edge id by its (unordered) original endpoints.
    pub fn edge_id(&self, a: RelId, b: RelId) -> Option<LineEdgeId> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&key, |e| (e.a, e.b))
            .ok()
            .map(|i| self.edges[i].id)
    }

    /// |L| = sum of edge weights.
    pub fn size(&self) -> usize {
        self.edges.iter().map(|e| e.weight as usize).sum()
    }

    /// Weight of an edge between `a` and `b`, or 0 when they do not
    /// intersect.
    pub fn weight(&self, a: RelId, b: RelId) -> u32 {
        self.edge_id(a, b)
            .map(|id| self.edge(id).weight)
            .unwrap_or(0)
    }
}

/// Builds the weighted line graph straight from a predicate set using the
/// counting pass over the shared-variable multigraph: after attributes are
/// collapsed into variables, each `(variable, relation pair)` incidence is
/// one parallel edge, and parallel edges are folded into integer weights
/// with a reusable counter array.
///
/// Agrees with [`LineGraph::from_hypergraph`] on the hypergraph produced by
/// [`build_hypergraph`] for the same predicates.
pub fn build_line_graph(preds: &BTreeSet<Predicate>) -> Result<LineGraph, CoreError> {
    let (h, _) = build_hypergraph(preds)?;
    let m = h.rel_count();
    // Multigraph adjacency: one (a, b, x) arc per shared variable, emitted
    // from variable neighborhoods.
    let mut multi: Vec<Vec<(usize, VarId)>> = vec![Vec::new(); m];
    for x in 0..h.var_count() as u32 {
        let rels = h.rels_of(VarId(x));
        for (i, &a) in rels.iter().enumerate() {
            for &b in &rels[i + 1..] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                multi[lo.idx()].push((hi.idx(), VarId(x)));
            }
        }
    }
    // Counting pass: weight[j] accumulates parallel-edge counts for the
    // current i, then resets so the array can be reused.
    let mut weight = vec![0u32; m];
    let mut label: Vec<BTreeSet<VarId>> = vec![BTreeSet::new(); m];
    let mut labels: BTreeMap<(RelId, RelId), BTreeSet<VarId>> = BTreeMap::new();
    for (i, adjacent) in multi.iter().enumerate() {
        for &(j, x) in adjacent {
            weight[j] += 1;
            label[j].insert(x);
        }
        for &(j, _) in adjacent {
            if weight[j] != 0 {
                debug_assert_eq!(weight[j] as usize, label[j].len());
                labels.insert(
                    (RelId(i as u32), RelId(j as u32)),
                    std::mem::take(&mut label[j]),
                );
                weight[j] = 0;
            }
        }
    }
    Ok(LineGraph::from_labels(m, labels))
}

#[derive(Deserialize, Serialize)]
struct HypergraphFile {
    relations: BTreeMap<String, Vec<String>>,
}

/// Loads a hypergraph from a JSON document `{"relations": {"R1": ["a"],
/// ...}}`. Duplicate hyperedges merge with a warning; empty hyperedges and
/// an empty relations object are errors.
pub fn hypergraph_from_file<P: AsRef<Path>>(
    path: P,
) -> Result<(Hypergraph, Vec<String>), CoreError> {
    let text = std::fs::read_to_string(&path).map_err(|source| CoreError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    hypergraph_from_json(&text)
}

/// JSON variant of [`hypergraph_from_file`] for in-memory documents.
pub fn hypergraph_from_json(text: &str) -> Result<(Hypergraph, Vec<String>), CoreError> {
    let doc: HypergraphFile = serde_json::from_str(text)?;
    let rels: Vec<(String, Vec<String>)> = doc.relations.into_iter().collect();
    Hypergraph::from_relations(&rels)
}

/// Splits a hypergraph into connected components of its line graph, in
/// ascending order of their smallest relation id. Downstream algorithms run
/// per component.
pub fn connected_components(h: &Hypergraph) -> Vec<Hypergraph> {
    let n = h.rel_count();
    let mut dsu = Dsu::new(n);
    for x in 0..h.var_count() as u32 {
        let rels = h.rels_of(VarId(x));
        for w in rels.windows(2) {
            dsu.union(w[0].idx(), w[1].idx());
        }
    }
    let mut groups: BTreeMap<usize, Vec<RelId>> = BTreeMap::new();
    for r in h.rels() {
        groups.entry(dsu.find(r.idx())).or_default().push(r);
    }
    groups
        .into_values()
        .map(|rels| {
            let named: Vec<(String, Vec<String>)> = rels
                .iter()
                .map(|&r| {
                    (
                        h.rel_name(r).to_string(),
                        h.chi(r)
                            .iter()
                            .map(|&x| h.var_name(x).to_string())
                            .collect(),
                    )
                })
                .collect();
            let (sub, warnings) = Hypergraph::from_relations(&named)
                .expect("component of a valid hypergraph is valid");
            debug_assert!(warnings.is_empty());
            sub
        })
        .collect()
}
