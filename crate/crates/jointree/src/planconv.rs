//! Conversion of connected left-deep linear plans into join trees.
//!
//! The plan's first relation becomes the root; every later relation is
//! attached to the first earlier relation containing all variables it
//! shares with its predecessors. A relation with no such predecessor is an
//! orphan and the conversion fails. A plan converts without orphans exactly
//! when its reverse is a GYO reduction order, which holds for every
//! connected plan iff the query is gamma-acyclic.

use crate::acyclicity::GammaCycle;
use crate::hypergraph::{Hypergraph, RelId, VarId};
use crate::mcs::{validate_join_tree, RootedTree};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("plan is not a permutation of the hypergraph's relations")]
    NotAPermutation,
    #[error("unknown relation `{0}` in plan")]
    UnknownRelation(String),
    #[error("relation `{rel}` is an orphan: key {{{key}}} fits no earlier relation")]
    Orphan { rel: String, key: String },
    #[error("exhaustive sweep limited to {limit} relations, got {actual}")]
    SweepTooLarge { limit: usize, actual: usize },
}

/// Resolves a comma-separated list of relation names into a plan.
pub fn plan_from_names(h: &Hypergraph, names: &[&str]) -> Result<Vec<RelId>, PlanError> {
    let plan: Vec<RelId> = names
        .iter()
        .map(|n| {
            h.rel_by_name(n)
                .ok_or_else(|| PlanError::UnknownRelation(n.to_string()))
        })
        .collect::<Result<_, _>>()?;
    check_permutation(h, &plan)?;
    Ok(plan)
}

fn check_permutation(h: &Hypergraph, plan: &[RelId]) -> Result<(), PlanError> {
    let set: BTreeSet<RelId> = plan.iter().copied().collect();
    if plan.len() != h.rel_count() || set.len() != h.rel_count() {
        return Err(PlanError::NotAPermutation);
    }
    Ok(())
}

/// True iff every relation after the first intersects some predecessor.
pub fn is_connected_plan(h: &Hypergraph, plan: &[RelId]) -> bool {
    for (i, &r) in plan.iter().enumerate().skip(1) {
        if plan[..i].iter().all(|&p| h.shared(r, p).is_empty()) {
            return false;
        }
    }
    true
}

/// Converts a left-deep plan into a rooted join tree, or reports the first
/// orphan. On success the parent links satisfy the GYO parent condition, so
/// the result is a valid join tree.
pub fn convert_plan(h: &Hypergraph, plan: &[RelId]) -> Result<RootedTree, PlanError> {
    check_permutation(h, plan)?;
    let mut parents: Vec<Option<RelId>> = vec![None; h.rel_count()];
    let mut prefix_vars: BTreeSet<VarId> = h.chi(plan[0]).iter().copied().collect();
    for (i, &r) in plan.iter().enumerate().skip(1) {
        let key: BTreeSet<VarId> = h.chi(r).intersection(&prefix_vars).copied().collect();
        let parent = plan[..i].iter().copied().find(|&p| key.is_subset(h.chi(p)));
        match parent {
            Some(p) => parents[r.idx()] = Some(p),
            None => {
                return Err(PlanError::Orphan {
                    rel: h.rel_name(r).to_string(),
                    key: key
                        .iter()
                        .map(|&x| h.var_name(x))
                        .collect::<Vec<_>>()
                        .join(","),
                })
            }
        }
        prefix_vars.extend(h.chi(r).iter().copied());
    }
    Ok(RootedTree::from_parents(h, plan[0], parents, plan.to_vec()))
}

/// True iff reversing the plan yields a valid GYO reduction order: each
/// element must have an earlier plan element covering its intersections
/// with all earlier elements (checked pairwise, independently of
/// [`convert_plan`]'s accumulated key).
pub fn is_reverse_gyo(h: &Hypergraph, plan: &[RelId]) -> bool {
    if check_permutation(h, plan).is_err() {
        return false;
    }
    for (i, &r) in plan.iter().enumerate().skip(1) {
        let has_parent = plan[..i].iter().any(|&p| {
            plan[..i]
                .iter()
                .all(|&q| h.shared(r, q).is_subset(h.chi(p)))
        });
        if !has_parent {
            return false;
        }
    }
    true
}

/// Outcome of an exhaustive sweep over all connected permutations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub connected_plans: usize,
    /// Connected permutations whose conversion hit an orphan.
    pub orphaned: Vec<Vec<RelId>>,
    /// Conversions that produced a tree failing the running intersection
    /// property (always zero; retained as an explicit check).
    pub rip_failures: usize,
}

/// Converts every connected permutation of the relations (n! plans, so the
/// relation count is capped by `max_n`, default 7).
pub fn sweep_plans(h: &Hypergraph, max_n: usize) -> Result<SweepReport, PlanError> {
    let n = h.rel_count();
    if n > max_n {
        return Err(PlanError::SweepTooLarge {
            limit: max_n,
            actual: n,
        });
    }
    let mut report = SweepReport::default();
    let mut plan: Vec<RelId> = h.rels().collect();
    permute(&mut plan, 0, &mut |plan| {
        if !is_connected_plan(h, plan) {
            return;
        }
        report.connected_plans += 1;
        match convert_plan(h, plan) {
            Ok(tree) => {
                if !validate_join_tree(h, &tree) {
                    report.rip_failures += 1;
                }
            }
            Err(PlanError::Orphan { .. }) => report.orphaned.push(plan.to_vec()),
            Err(e) => unreachable!("sweep plans are permutations: {e}"),
        }
    });
    Ok(report)
}

fn permute(items: &mut Vec<RelId>, k: usize, visit: &mut impl FnMut(&[RelId])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Builds a connected plan with an orphan from a gamma-cycle witness,
/// following the exchange used in the characterization proof: with the
/// cycle `r_0..r_{k-1}`, the order `r_0,..,r_{k-3}, r_{k-1}, r_{k-2}`
/// leaves `r_{k-2}` without a parent, because its two exclusive cycle
/// variables live in different predecessors. Remaining relations are
/// appended greedily so the whole plan stays connected.
pub fn orphan_plan_from_cycle(h: &Hypergraph, cycle: &GammaCycle) -> Vec<RelId> {
    let k = cycle.len();
    assert!(k >= 3, "gamma cycles have length at least 3");
    let members: Vec<RelId> = cycle.iter().map(|&(r, _)| r).collect();
    let mut plan: Vec<RelId> = Vec::with_capacity(h.rel_count());
    plan.extend(&members[..k - 2]);
    plan.push(members[k - 1]);
    plan.push(members[k - 2]);

    let mut used: BTreeSet<RelId> = plan.iter().copied().collect();
    while plan.len() < h.rel_count() {
        let next = h
            .rels()
            .find(|r| !used.contains(r) && plan.iter().any(|&p| !h.shared(*r, p).is_empty()))
            .expect("hypergraph is connected");
        used.insert(next);
        plan.push(next);
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acyclicity::{find_gamma_cycle, SearchOutcome, DEFAULT_GAMMA_BOUND};
    use crate::fixtures;

    fn plan(h: &Hypergraph, names: &[&str]) -> Vec<RelId> {
        plan_from_names(h, names).unwrap()
    }

    #[test]
    fn connectivity_checks() {
        let h = fixtures::h_path();
        assert!(is_connected_plan(&h, &plan(&h, &["R1", "R2", "R3"])));
        assert!(!is_connected_plan(&h, &plan(&h, &["R1", "R3", "R2"])));

        let g = fixtures::h_gam();
        assert!(is_connected_plan(&g, &plan(&g, &["R1", "R2", "R3"])));
    }

    #[test]
    fn convert_path_plan() {
        let h = fixtures::h_path();
        let t = convert_plan(&h, &plan(&h, &["R1", "R2", "R3"])).unwrap();
        let r = |n: &str| h.rel_by_name(n).unwrap();
        assert_eq!(t.parent(r("R2")), Some(r("R1")));
        assert_eq!(t.parent(r("R3")), Some(r("R2")));
        assert!(validate_join_tree(&h, &t));
    }

    #[test]
    fn convert_gam_plan_rooted_at_cover() {
        let h = fixtures::h_gam();
        let t = convert_plan(&h, &plan(&h, &["R3", "R1", "R2"])).unwrap();
        let r = |n: &str| h.rel_by_name(n).unwrap();
        assert_eq!(t.parent(r("R1")), Some(r("R3")));
        assert_eq!(t.parent(r("R2")), Some(r("R3")));
        assert!(validate_join_tree(&h, &t));
    }

    #[test]
    fn gam_plan_with_orphan() {
        let h = fixtures::h_gam();
        match convert_plan(&h, &plan(&h, &["R1", "R2", "R3"])) {
            Err(PlanError::Orphan { rel, key }) => {
                assert_eq!(rel, "R3");
                assert_eq!(key, "a,b,c");
            }
            other => panic!("expected orphan, got {other:?}"),
        }
    }

    #[test]
    fn reverse_gyo_checks() {
        let h = fixtures::h_path();
        assert!(is_reverse_gyo(&h, &plan(&h, &["R1", "R2", "R3"])));

        let g = fixtures::h_gam();
        assert!(!is_reverse_gyo(&g, &plan(&g, &["R1", "R2", "R3"])));
        assert!(is_reverse_gyo(&g, &plan(&g, &["R3", "R2", "R1"])));
    }

    #[test]
    fn sweep_gamma_acyclic_has_no_orphans() {
        for h in [fixtures::h_path(), fixtures::clique_query(4)] {
            let report = sweep_plans(&h, 7).unwrap();
            assert!(report.connected_plans > 0);
            assert!(report.orphaned.is_empty());
            assert_eq!(report.rip_failures, 0);
        }
    }

    #[test]
    fn sweep_gam_finds_orphans() {
        let report = sweep_plans(&fixtures::h_gam(), 7).unwrap();
        assert!(!report.orphaned.is_empty());
    }

    #[test]
    fn sweep_size_guard() {
        let h = fixtures::clique_query(8);
        assert!(matches!(
            sweep_plans(&h, 7),
            Err(PlanError::SweepTooLarge { .. })
        ));
    }

    #[test]
    fn proof_driven_generator_orphans_every_gamma_cyclic_fixture() {
        for h in [
            fixtures::h_gam(),
            fixtures::h_comp(),
            fixtures::pure_cycle(3),
            fixtures::pure_cycle(4),
            fixtures::pure_cycle(5),
        ] {
            let cycle = match find_gamma_cycle(&h, DEFAULT_GAMMA_BOUND) {
                SearchOutcome::Found(c) => c,
                other => panic!("fixture must have a gamma cycle, got {other:?}"),
            };
            let plan = orphan_plan_from_cycle(&h, &cycle);
            assert!(
                is_connected_plan(&h, &plan),
                "generated plan must be connected"
            );
            assert!(
                matches!(convert_plan(&h, &plan), Err(PlanError::Orphan { .. })),
                "generated plan must contain an orphan"
            );
            assert!(!is_reverse_gyo(&h, &plan));
        }
    }

    #[test]
    fn conversion_success_implies_reverse_gyo() {
        let h = fixtures::hub_six();
        let report_rels: Vec<RelId> = h.rels().collect();
        // Check on a few deterministic permutations of the hub fixture.
        let mut plan = report_rels;
        for rotation in 0..plan.len() {
            plan.rotate_left(1);
            if !is_connected_plan(&h, &plan) {
                continue;
            }
            let converted = convert_plan(&h, &plan).is_ok();
            assert_eq!(
                converted,
                is_reverse_gyo(&h, &plan),
                "plan {plan:?} rotation {rotation}"
            );
        }
    }
}
