//! Exact brute-force solvers for maximum-leaf out-branchings and out-trees.
//!
//! Every non-root vertex chooses one in-neighbour as its parent; choices that
//! close a cycle are pruned as soon as they are made, so each surviving full
//! assignment is a spanning arborescence. This is slow but easy to audit,
//! which is what an oracle for the rest of the crate needs.

use crate::connectivity::reachable_from;
use crate::digraph::{Digraph, OutTree, RootedInstance, Variant, Vertex};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

pub const DEFAULT_BOUND: usize = 12;

/// Exhaustive solver with a vertex-count guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Solver {
    pub max_vertices: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Self {
            max_vertices: DEFAULT_BOUND,
        }
    }
}

impl Solver {
    pub fn with_bound(max_vertices: usize) -> Self {
        Self { max_vertices }
    }

    fn guard(&self, d: &Digraph) -> Result<()> {
        if d.vertex_count() > self.max_vertices {
            Err(Error::TooLarge {
                actual: d.vertex_count(),
                bound: self.max_vertices,
            })
        } else {
            Ok(())
        }
    }

    pub fn enumerate_out_branchings<'a>(
        &self,
        d: &'a Digraph,
        r: Vertex,
    ) -> Result<OutBranchings<'a>> {
        d.check(r)?;
        self.guard(d)?;
        Ok(OutBranchings {
            search: Search::new(d, r),
            digraph: d,
        })
    }

    pub fn count_out_branchings(&self, d: &Digraph, r: Vertex) -> Result<u64> {
        d.check(r)?;
        self.guard(d)?;
        let mut search = Search::new(d, r);
        let mut count = 0;
        while search.advance() {
            count += 1;
        }
        Ok(count)
    }

    /// Maximum leaf count over out-branchings rooted at `r`, with a witness.
    /// `None` when some vertex is unreachable from `r`.
    pub fn max_leaf_out_branching(
        &self,
        d: &Digraph,
        r: Vertex,
    ) -> Result<Option<(usize, OutTree)>> {
        d.check(r)?;
        self.guard(d)?;
        let mut search = Search::new(d, r);
        let mut best: Option<(usize, Vec<Option<usize>>)> = None;
        while search.advance() {
            let leaves = search.leaves();
            if best.as_ref().is_none_or(|(b, _)| leaves > *b) {
                best = Some((leaves, search.parent.clone()));
            }
        }
        Ok(best.map(|(leaves, parent)| {
            let tree = search.to_tree(&parent);
            debug_assert_eq!(tree.leaf_count(), leaves);
            (leaves, tree)
        }))
    }

    /// Maximum leaf count over out-trees rooted at `r`. Every out-tree lives
    /// inside the part of `d` reachable from `r`, and there any out-tree with
    /// `k` leaves extends to a spanning one with `k` leaves, so this is the
    /// branching optimum of that part.
    pub fn max_leaf_out_tree(&self, d: &Digraph, r: Vertex) -> Result<(usize, OutTree)> {
        let reach = reachable_from(d, r)?;
        let sub = d.induced(&reach);
        Ok(self
            .max_leaf_out_branching(&sub, r)?
            .expect("every vertex of the reachable part is reachable"))
    }

    /// Max leaf value for the instance's variant; `None` if the branching
    /// variant has no out-branching at all.
    pub fn max_leaf(&self, d: &Digraph, r: Vertex, variant: Variant) -> Result<Option<usize>> {
        Ok(match variant {
            Variant::Branching => self.max_leaf_out_branching(d, r)?.map(|(n, _)| n),
            Variant::Tree => Some(self.max_leaf_out_tree(d, r)?.0),
        })
    }

    pub fn decide(&self, inst: &RootedInstance) -> Result<bool> {
        Ok(self
            .max_leaf(inst.digraph(), inst.root(), inst.variant())?
            .is_some_and(|leaves| leaves >= inst.k()))
    }

    /// Best value over all possible roots.
    pub fn max_leaf_unrooted(&self, d: &Digraph, variant: Variant) -> Result<Option<usize>> {
        let mut best = None;
        for r in d.vertices() {
            if let Some(v) = self.max_leaf(d, r, variant)? {
                best = best.max(Some(v));
            }
        }
        Ok(best)
    }
}

pub fn enumerate_out_branchings(d: &Digraph, r: Vertex) -> Result<Vec<OutTree>> {
    Ok(Solver::default().enumerate_out_branchings(d, r)?.collect())
}

pub fn max_leaf_out_branching(d: &Digraph, r: Vertex) -> Result<Option<(usize, OutTree)>> {
    Solver::default().max_leaf_out_branching(d, r)
}

pub fn max_leaf_out_tree(d: &Digraph, r: Vertex) -> Result<(usize, OutTree)> {
    Solver::default().max_leaf_out_tree(d, r)
}

pub fn decide(inst: &RootedInstance) -> Result<bool> {
    Solver::default().decide(inst)
}

/// Stream of all out-branchings rooted at a vertex, each yielded once.
pub struct OutBranchings<'a> {
    search: Search,
    digraph: &'a Digraph,
}

impl Iterator for OutBranchings<'_> {
    type Item = OutTree;

    fn next(&mut self) -> Option<OutTree> {
        if self.search.advance() {
            let tree = self.search.to_tree(&self.search.parent);
            debug_assert!(tree.is_out_branching_of(self.digraph));
            Some(tree)
        } else {
            None
        }
    }
}

/// Backtracking state over parent choices, on dense indices.
struct Search {
    ids: Vec<Vertex>,
    root: usize,
    order: Vec<usize>,
    in_nb: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    choice: Vec<usize>,
    children: Vec<u32>,
    internal: usize,
    depth: usize,
    // true while positioned on an emitted assignment
    emitted: bool,
    done: bool,
}

impl Search {
    fn new(d: &Digraph, r: Vertex) -> Self {
        let ids: Vec<Vertex> = d.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let in_nb = ids
            .iter()
            .map(|&v| d.in_neighbors(v).iter().map(|u| index[u]).collect())
            .collect();
        let root = index[&r];
        let order: Vec<usize> = (0..ids.len()).filter(|&i| i != root).collect();
        let all_reachable = reachable_from(d, r).is_ok_and(|reach| reach.len() == d.vertex_count());
        let n = ids.len();
        Self {
            ids,
            root,
            choice: vec![0; order.len()],
            order,
            in_nb,
            parent: vec![None; n],
            children: vec![0; n],
            internal: 0,
            depth: 0,
            emitted: false,
            done: !all_reachable,
        }
    }

    fn leaves(&self) -> usize {
        self.ids.len() - self.internal
    }

    fn set_parent(&mut self, v: usize, p: Option<usize>) {
        if let Some(old) = self.parent[v] {
            self.children[old] -= 1;
            if self.children[old] == 0 {
                self.internal -= 1;
            }
        }
        if let Some(new) = p {
            if self.children[new] == 0 {
                self.internal += 1;
            }
            self.children[new] += 1;
        }
        self.parent[v] = p;
    }

    fn closes_cycle(&self, p: usize, v: usize) -> bool {
        let mut cur = p;
        loop {
            if cur == v {
                return true;
            }
            if cur == self.root {
                return false;
            }
            match self.parent[cur] {
                Some(next) => cur = next,
                None => return false,
            }
        }
    }

    /// Moves to the next complete acyclic assignment.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        let m = self.order.len();
        if self.emitted {
            self.emitted = false;
            if m == 0 {
                self.done = true;
                return false;
            }
            self.depth = m - 1;
            self.choice[self.depth] += 1;
        }
        loop {
            if self.depth == m {
                self.emitted = true;
                return true;
            }
            let d = self.depth;
            let v = self.order[d];
            self.set_parent(v, None);
            let mut placed = false;
            while self.choice[d] < self.in_nb[v].len() {
                let p = self.in_nb[v][self.choice[d]];
                if !self.closes_cycle(p, v) {
                    self.set_parent(v, Some(p));
                    placed = true;
                    break;
                }
                self.choice[d] += 1;
            }
            if placed {
                self.depth += 1;
                if self.depth < m {
                    self.choice[self.depth] = 0;
                }
            } else if d == 0 {
                self.done = true;
                return false;
            } else {
                self.depth -= 1;
                self.choice[self.depth] += 1;
            }
        }
    }

    fn to_tree(&self, parent: &[Option<usize>]) -> OutTree {
        let map = parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (self.ids[v], self.ids[p])))
            .collect();
        OutTree::new(self.ids[self.root], map).expect("search only emits arborescences")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(arcs: &[(Vertex, Vertex)]) -> Digraph {
        Digraph::from_arcs(arcs.iter().copied()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_out_branchings(&g(&[(0, 1), (0, 2)]), 0)
                .unwrap()
                .len(),
            1
        );
        let diamond = g(&[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(enumerate_out_branchings(&diamond, 0).unwrap().len(), 2);
        let stray = g(&[(0, 1), (2, 1)]);
        assert!(enumerate_out_branchings(&stray, 0).unwrap().is_empty());
    }

    #[test]
    fn complete_digraph_count_matches_cayley() {
        // arborescences of the complete digraph on n vertices with fixed root: n^(n-2)
        let n = 6;
        let d = Digraph::from_arcs(
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))),
        )
        .unwrap();
        assert_eq!(
            Solver::default().count_out_branchings(&d, 0).unwrap(),
            6u64.pow(4)
        );
    }

    #[test]
    fn max_leaf_examples() {
        assert_eq!(
            max_leaf_out_branching(&g(&[(0, 1), (0, 2), (0, 3)]), 0)
                .unwrap()
                .unwrap()
                .0,
            3
        );
        assert_eq!(
            max_leaf_out_branching(&g(&[(0, 1), (1, 2)]), 0)
                .unwrap()
                .unwrap()
                .0,
            1
        );
        assert!(max_leaf_out_branching(&g(&[(0, 1), (2, 3)]), 0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn out_tree_examples() {
        assert_eq!(max_leaf_out_tree(&g(&[(0, 1), (2, 3)]), 0).unwrap().0, 1);
        let star_plus = g(&[(0, 1), (0, 2), (0, 3), (4, 1)]);
        assert_eq!(max_leaf_out_tree(&star_plus, 0).unwrap().0, 3);
        let mut lonely = Digraph::new();
        lonely.add_vertex(3);
        assert_eq!(max_leaf_out_tree(&lonely, 3).unwrap().0, 1);
    }

    #[test]
    fn decide_examples() {
        let star = g(&[(0, 1), (0, 2), (0, 3)]);
        let yes = RootedInstance::new(star.clone(), 0, 3, Variant::Branching).unwrap();
        let no = RootedInstance::new(star, 0, 4, Variant::Branching).unwrap();
        assert!(decide(&yes).unwrap());
        assert!(!decide(&no).unwrap());

        let stray = g(&[(0, 1), (2, 1)]);
        let b = RootedInstance::new(stray.clone(), 0, 1, Variant::Branching).unwrap();
        let t = RootedInstance::new(stray, 0, 1, Variant::Tree).unwrap();
        assert!(!decide(&b).unwrap());
        assert!(decide(&t).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let path = Digraph::from_arcs((0..13).map(|i| (i, i + 1))).unwrap();
        assert!(matches!(
            max_leaf_out_branching(&path, 0),
            Err(Error::TooLarge {
                actual: 14,
                bound: 12
            })
        ));
        assert!(Solver::with_bound(14)
            .max_leaf_out_branching(&path, 0)
            .is_ok());
    }

    #[test]
    fn single_vertex_is_one_leaf() {
        let mut d = Digraph::new();
        d.add_vertex(0);
        let all = enumerate_out_branchings(&d, 0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].leaf_count(), 1);
    }
}
