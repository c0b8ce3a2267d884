//! Brute-force oracles that share no code with the library's solver.
//!
//! Max-leaf values are computed from the internal vertex set instead of by
//! enumerating trees: a set `N` containing the root is the internal set of
//! some out-tree iff every vertex of `N` is reachable from the root inside
//! `N`. Such a tree can take every out-neighbour of `N` outside `N` as a
//! leaf.
#![allow(dead_code)]

use kleaf::{Digraph, Variant, Vertex};
use std::collections::{BTreeMap, BTreeSet};

struct Masks {
    n: usize,
    root: usize,
    out: Vec<u32>,
}

impl Masks {
    fn new(d: &Digraph, r: Vertex) -> Self {
        let ids: BTreeMap<Vertex, usize> = d.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        assert!(ids.len() <= 24, "oracle is exponential");
        let mut out = vec![0u32; ids.len()];
        for (u, v) in d.arcs() {
            out[ids[&u]] |= 1 << ids[&v];
        }
        Self {
            n: ids.len(),
            root: ids[&r],
            out,
        }
    }

    fn full(&self) -> u32 {
        (1 << self.n) - 1
    }

    fn neighbourhood(&self, set: u32) -> u32 {
        (0..self.n)
            .filter(|i| set >> i & 1 == 1)
            .fold(0, |acc, i| acc | self.out[i])
    }

    /// Whether every vertex of `set` is reachable from the root inside `set`.
    fn connected(&self, set: u32) -> bool {
        let mut seen = 1u32 << self.root;
        loop {
            let next = (seen | self.neighbourhood(seen)) & set;
            if next == seen {
                return seen == set;
            }
            seen = next;
        }
    }

    /// Every set containing the root that can be the internal part of an
    /// out-tree.
    fn internal_sets(&self) -> impl Iterator<Item = u32> + '_ {
        let others = self.full() & !(1 << self.root);
        // enumerate submasks of `others`
        let mut sub = others;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = sub;
            if sub == 0 {
                done = true;
            } else {
                sub = (sub - 1) & others;
            }
            Some(cur | 1 << self.root)
        })
        .filter(|&set| self.connected(set))
    }
}

/// Maximum leaves of an `r`-out-branching (`None` if none exists) or of an
/// `r`-out-tree.
pub fn max_leaf(d: &Digraph, r: Vertex, variant: Variant) -> Option<usize> {
    let m = Masks::new(d, r);
    match variant {
        Variant::Branching => {
            if m.n == 1 {
                return Some(1);
            }
            m.internal_sets()
                .filter(|&set| (set | m.neighbourhood(set)) == m.full())
                .map(|set| m.n - set.count_ones() as usize)
                .max()
        }
        Variant::Tree => m
            .internal_sets()
            .map(|set| (m.neighbourhood(set) & !set).count_ones() as usize)
            .max()
            .map(|v| v.max(1)),
    }
}

pub fn decide(d: &Digraph, r: Vertex, k: usize, variant: Variant) -> bool {
    max_leaf(d, r, variant).is_some_and(|v| v >= k)
}

pub fn decide_unrooted(d: &Digraph, k: usize, variant: Variant) -> bool {
    d.vertices().any(|r| decide(d, r, k, variant))
}

/// Counts out-branchings by trying every parent assignment and rejecting
/// the ones that contain a cycle.
pub fn count_branchings(d: &Digraph, r: Vertex) -> u64 {
    let others: Vec<Vertex> = d.vertices().filter(|&v| v != r).collect();
    let choices: Vec<Vec<Vertex>> = others
        .iter()
        .map(|&v| d.in_neighbors(v).iter().copied().collect())
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return 0;
    }
    let mut pick = vec![0usize; others.len()];
    let mut count = 0;
    loop {
        let parent: BTreeMap<Vertex, Vertex> = others
            .iter()
            .zip(&pick)
            .zip(&choices)
            .map(|((&v, &i), c)| (v, c[i]))
            .collect();
        let reaches_root = others.iter().all(|&v| {
            let mut cur = v;
            for _ in 0..=others.len() {
                if cur == r {
                    return true;
                }
                cur = parent[&cur];
            }
            false
        });
        count += reaches_root as u64;
        // odometer step
        let mut i = 0;
        loop {
            if i == pick.len() {
                return count;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Size of a smallest subfamily covering `1..=n`, if any.
pub fn min_set_cover(n: usize, family: &[BTreeSet<usize>]) -> Option<usize> {
    let universe: BTreeSet<usize> = (1..=n).collect();
    (0u32..1 << family.len())
        .filter(|pick| {
            let covered: BTreeSet<usize> = family
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .flat_map(|(_, s)| s.iter().copied())
                .collect();
            covered == universe
        })
        .map(|pick| pick.count_ones() as usize)
        .min()
}

/// Every simple digraph on vertices `1..=n`.
pub fn all_digraphs(n: usize) -> Vec<Digraph> {
    let pairs: Vec<(Vertex, Vertex)> = (1..=n)
        .flat_map(|u| (1..=n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let arcs = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| *a);
            Digraph::from_parts(1..=n, arcs).unwrap()
        })
        .collect()
}

pub fn digraph(arcs: &[(Vertex, Vertex)]) -> Digraph {
    Digraph::from_arcs(arcs.iter().copied()).unwrap()
}
