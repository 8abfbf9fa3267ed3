//! Join trees for acyclic conjunctive queries: construction, acyclicity
//! classification, canonical (shallowest) trees, conversion from left-deep
//! plans, and exhaustive enumeration by edits.
//!
//! The pipeline for enumeration is: parse a query or hypergraph
//! ([`hypergraph`]), build an MCS tree ([`mcs`]), derive the equivalent
//! graph whose spanning trees biject with the join trees ([`equivgraph`]),
//! then stream one edge swap per join tree ([`enumerate`]). Brute-force
//! reference implementations live in [`oracle`].

pub mod acyclicity;
pub mod canonical;
pub mod enumerate;
pub mod equivgraph;
pub mod fixtures;
pub mod hypergraph;
pub mod mcs;
pub mod oracle;
pub mod planconv;
pub mod render;
pub mod treeindex;

pub use acyclicity::{classify, Classification, DEFAULT_GAMMA_BOUND};
pub use hypergraph::{Hypergraph, LineEdgeId, LineGraph, RelId, VarId};
pub use mcs::{mcs_tree, validate_join_tree, RootedTree, TieRule};
