mod common;

use common::{all_digraphs, count_branchings, digraph, max_leaf, min_set_cover};
use kleaf::connectivity::{
    as_path, contract_arc, dominators, is_separator, reachable_from, unique_out_branching,
};
use kleaf::format::{parse_digraph, serialize};
use kleaf::rules::{is_reduced, reduce_to_fixpoint, Reduction};
use kleaf::solver::Solver;
use kleaf::{Digraph, RootedInstance, Variant, Vertex};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn arb_digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1)).prop_map(move |bits| {
            let pairs = (1..=n).flat_map(|u| (1..=n).filter(move |&v| v != u).map(move |v| (u, v)));
            let arcs = pairs.zip(bits).filter(|(_, b)| *b).map(|(a, _)| a);
            Digraph::from_parts(1..=n, arcs).unwrap()
        })
    })
}

fn arb_rooted(max_n: usize) -> impl Strategy<Value = (Digraph, Vertex)> {
    arb_digraph(max_n).prop_flat_map(|d| {
        let n = d.vertex_count();
        (Just(d), 1..=n)
    })
}

#[test]
fn oracle_sanity() {
    let path = digraph(&[(1, 2), (2, 3)]);
    assert_eq!(max_leaf(&path, 1, Variant::Branching), Some(1));
    assert_eq!(max_leaf(&path, 2, Variant::Branching), None);
    assert_eq!(max_leaf(&path, 2, Variant::Tree), Some(1));
    let star = digraph(&[(1, 2), (1, 3), (1, 4)]);
    assert_eq!(max_leaf(&star, 1, Variant::Branching), Some(3));
    assert_eq!(max_leaf(&star, 4, Variant::Tree), Some(1));
    assert_eq!(count_branchings(&star, 1), 1);
    let k3 = all_digraphs(3).pop().unwrap();
    assert_eq!(k3.arc_count(), 6);
    assert_eq!(count_branchings(&k3, 1), 3);
    assert_eq!(all_digraphs(3).len(), 64);
    let fam = vec![
        BTreeSet::from([1]),
        BTreeSet::from([2]),
        BTreeSet::from([1, 2]),
    ];
    assert_eq!(min_set_cover(2, &fam), Some(1));
}

#[test]
fn unique_branching_matches_enumeration_exhaustively() {
    let solver = Solver::default();
    for n in 1..=4 {
        for d in all_digraphs(n) {
            for r in 1..=n {
                let count = solver.count_out_branchings(&d, r).unwrap();
                let unique = unique_out_branching(&d, r).unwrap();
                assert_eq!(unique.is_some(), count == 1, "{d:?} root {r}");
                if let Some(t) = unique {
                    assert!(t.is_out_branching_of(&d));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn branching_count_matches_rejection((d, r) in arb_rooted(6)) {
        let solver = Solver::default();
        let listed = solver.enumerate_out_branchings(&d, r).unwrap().collect::<Vec<_>>();
        let distinct: BTreeSet<_> = listed.iter().map(|t| t.parents().clone()).collect();
        prop_assert_eq!(distinct.len(), listed.len());
        prop_assert!(listed.iter().all(|t| t.is_out_branching_of(&d)));
        prop_assert_eq!(listed.len() as u64, count_branchings(&d, r));
        let unique = unique_out_branching(&d, r).unwrap();
        prop_assert_eq!(unique.is_some(), listed.len() == 1);
    }

    #[test]
    fn solver_matches_internal_set_oracle((d, r) in arb_rooted(8)) {
        let solver = Solver::default();
        for variant in [Variant::Branching, Variant::Tree] {
            prop_assert_eq!(solver.max_leaf(&d, r, variant).unwrap(), max_leaf(&d, r, variant));
        }
        let (leaves, tree) = solver.max_leaf_out_tree(&d, r).unwrap();
        prop_assert!(tree.is_out_tree_of(&d));
        prop_assert_eq!(tree.leaf_count(), leaves);
    }

    #[test]
    fn tree_equals_branching_when_all_reachable((d, r) in arb_rooted(8)) {
        let solver = Solver::default();
        if reachable_from(&d, r).unwrap().len() == d.vertex_count() {
            let branching = solver.max_leaf_out_branching(&d, r).unwrap().map(|(l, _)| l);
            prop_assert_eq!(branching, Some(solver.max_leaf_out_tree(&d, r).unwrap().0));
        }
    }

    #[test]
    fn deleting_an_arc_never_helps((d, r) in arb_rooted(7), pick in any::<prop::sample::Index>()) {
        let arcs: Vec<_> = d.arcs().collect();
        prop_assume!(!arcs.is_empty());
        let (u, v) = arcs[pick.index(arcs.len())];
        let mut smaller = d.clone();
        smaller.remove_arc(u, v).unwrap();
        let solver = Solver::default();
        let before = solver.max_leaf(&d, r, Variant::Branching).unwrap();
        let after = solver.max_leaf(&smaller, r, Variant::Branching).unwrap();
        prop_assert!(after <= before);
    }

    #[test]
    fn dominators_are_singleton_separators((d, r) in arb_rooted(8)) {
        let dom = dominators(&d, r).unwrap();
        let reach = reachable_from(&d, r).unwrap();
        for v in d.vertices() {
            if !reach.contains(&v) {
                prop_assert!(dom[&v].is_empty());
                continue;
            }
            prop_assert!(dom[&v].contains(&r) && dom[&v].contains(&v));
            for u in d.vertices().filter(|&u| u != v && u != r) {
                let sep = is_separator(&d, r, &BTreeSet::from([u]), v).unwrap();
                prop_assert_eq!(dom[&v].contains(&u), sep, "u={} v={}", u, v);
            }
        }
    }

    #[test]
    fn reachable_set_is_closed((d, r) in arb_rooted(8)) {
        let reach = reachable_from(&d, r).unwrap();
        for &u in &reach {
            prop_assert!(d.out_neighbors(u).is_subset(&reach));
        }
        // dropping everything outside leaves it unchanged
        prop_assert_eq!(reachable_from(&d.induced(&reach), r).unwrap(), reach);
    }

    #[test]
    fn contraction_merges_neighbourhoods(d in arb_digraph(7), pick in any::<prop::sample::Index>()) {
        let arcs: Vec<_> = d.arcs().collect();
        prop_assume!(!arcs.is_empty());
        let (u, v) = arcs[pick.index(arcs.len())];
        let (c, w) = contract_arc(&d, u, v).unwrap();
        prop_assert_eq!(c.vertex_count(), d.vertex_count() - 1);
        prop_assert!(!c.contains(u) && !c.contains(v) && !d.contains(w));
        let merged = |s: &BTreeSet<Vertex>, t: &BTreeSet<Vertex>| -> BTreeSet<Vertex> {
            s.union(t).copied().filter(|&x| x != u && x != v).collect()
        };
        prop_assert_eq!(c.out_neighbors(w), &merged(d.out_neighbors(u), d.out_neighbors(v)));
        prop_assert_eq!(c.in_neighbors(w), &merged(d.in_neighbors(u), d.in_neighbors(v)));
        for (x, y) in d.arcs().filter(|&(x, y)| ![u, v].contains(&x) && ![u, v].contains(&y)) {
            prop_assert!(c.has_arc(x, y));
        }
        for (x, y) in c.arcs() {
            prop_assert!(x != y);
        }
    }

    #[test]
    fn format_round_trip(d in arb_digraph(8), k in 1usize..5, r in 1usize..=8) {
        let root = (r <= d.vertex_count()).then_some(r);
        let text = serialize(&d, root, Some(k));
        let parsed = parse_digraph(&text).unwrap();
        prop_assert_eq!(&parsed.digraph, &d);
        prop_assert_eq!(parsed.root, root);
        prop_assert_eq!(parsed.k, Some(k));
        prop_assert_eq!(serialize(&parsed.digraph, parsed.root, parsed.k), text);
    }

    #[test]
    fn fixpoint_is_reduced_and_replays((d, r) in arb_rooted(8), tree in any::<bool>()) {
        let variant = if tree { Variant::Tree } else { Variant::Branching };
        let inst = RootedInstance::new(d.clone(), r, 2, variant).unwrap();
        let (res, trace) = reduce_to_fixpoint(&inst);
        match res {
            Reduction::Reduced(out) => {
                prop_assert!(is_reduced(&out));
                prop_assert_eq!(out.root(), r);
                prop_assert_eq!(out.k(), 2);
                prop_assert_eq!(&trace.replay(&d).unwrap(), out.digraph());
            }
            Reduction::No => prop_assert_eq!(variant, Variant::Branching),
        }
    }
}

#[test]
fn unique_branching_of_a_path_is_the_path() {
    let d = digraph(&[(1, 2), (2, 3), (3, 2), (3, 4), (4, 3)]);
    let t = unique_out_branching(&d, 1).unwrap().unwrap();
    assert_eq!(as_path(&t), Some(vec![1, 2, 3, 4]));
    assert!(unique_out_branching(&d, 3).unwrap().is_none());
}
