//! Reachability, dominators, small separators, arc contraction and the
//! unique-out-branching test used by the reduction rules.

use crate::digraph::{Digraph, OutTree, Vertex};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Largest graph `unique_out_branching` will enumerate.
pub const UNIQUE_BRANCHING_BOUND: usize = 10;

/// Vertices reachable from `r` by a directed path, `r` included.
pub fn reachable_from(d: &Digraph, r: Vertex) -> Result<BTreeSet<Vertex>> {
    d.check(r)?;
    Ok(reach_avoiding(d, r, &BTreeSet::new(), None))
}

/// BFS from `r` that never enters `blocked` and never uses `skip_arc`.
pub(crate) fn reach_avoiding(
    d: &Digraph,
    r: Vertex,
    blocked: &BTreeSet<Vertex>,
    skip_arc: Option<(Vertex, Vertex)>,
) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::from([r]);
    let mut queue = VecDeque::from([r]);
    while let Some(u) = queue.pop_front() {
        for &w in d.out_neighbors(u) {
            if blocked.contains(&w) || skip_arc == Some((u, w)) {
                continue;
            }
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// For every vertex `v`, the set of vertices lying on all `r`-to-`v` paths
/// (both `r` and `v` included). Unreachable vertices map to the empty set.
///
/// Computed naively: a vertex `u` dominates exactly the reachable vertices
/// that become unreachable once `u` is deleted.
pub fn dominators(d: &Digraph, r: Vertex) -> Result<BTreeMap<Vertex, BTreeSet<Vertex>>> {
    let reach = reachable_from(d, r)?;
    let mut dom: BTreeMap<Vertex, BTreeSet<Vertex>> =
        d.vertices().map(|v| (v, BTreeSet::new())).collect();
    for &v in &reach {
        let set = dom.get_mut(&v).unwrap();
        set.insert(r);
        set.insert(v);
    }
    for &u in reach.iter().filter(|&&u| u != r) {
        let without = reach_avoiding(d, r, &BTreeSet::from([u]), None);
        for &v in reach.iter().filter(|v| !without.contains(v)) {
            dom.get_mut(&v).unwrap().insert(u);
        }
    }
    Ok(dom)
}

/// Whether deleting `s` leaves `v` unreachable from `r`.
///
/// `s` may contain neither `r` nor `v`; that is reported as an error.
pub fn is_separator(d: &Digraph, r: Vertex, s: &BTreeSet<Vertex>, v: Vertex) -> Result<bool> {
    d.check(r)?;
    d.check(v)?;
    for &x in s {
        d.check(x)?;
    }
    if s.contains(&v) {
        return Err(Error::InvalidSeparator(v));
    }
    if s.contains(&r) {
        return Err(Error::InvalidSeparator(r));
    }
    Ok(!reach_avoiding(d, r, s, None).contains(&v))
}

/// Vertices that become unreachable from `r` once arc `(u, v)` is deleted.
pub(crate) fn cut_by_arc(d: &Digraph, r: Vertex, u: Vertex, v: Vertex) -> BTreeSet<Vertex> {
    let before = reach_avoiding(d, r, &BTreeSet::new(), None);
    let after = reach_avoiding(d, r, &BTreeSet::new(), Some((u, v)));
    before.difference(&after).copied().collect()
}

/// Contracts arc `(u, v)` into a freshly minted vertex, which is returned
/// alongside the new graph.
pub fn contract_arc(d: &Digraph, u: Vertex, v: Vertex) -> Result<(Digraph, Vertex)> {
    let id = d.fresh_id();
    Ok((contract_arc_into(d, u, v, id)?, id))
}

/// Contracts arc `(u, v)` into vertex `merged`, which must be fresh or one of
/// `u`, `v`. Arcs into (out of) either endpoint become arcs into (out of)
/// `merged`; parallel arcs are merged and loops dropped.
pub fn contract_arc_into(d: &Digraph, u: Vertex, v: Vertex, merged: Vertex) -> Result<Digraph> {
    if !d.has_arc(u, v) {
        return Err(Error::MissingArc(u, v));
    }
    if merged != u && merged != v && d.contains(merged) {
        return Err(Error::VertexExists(merged));
    }
    let ins: BTreeSet<Vertex> = d
        .in_neighbors(u)
        .union(d.in_neighbors(v))
        .copied()
        .filter(|&w| w != u && w != v)
        .collect();
    let outs: BTreeSet<Vertex> = d
        .out_neighbors(u)
        .union(d.out_neighbors(v))
        .copied()
        .filter(|&w| w != u && w != v)
        .collect();
    let mut c = d.clone();
    c.remove_vertex(u)?;
    c.remove_vertex(v)?;
    c.add_vertex(merged);
    for w in ins {
        c.add_arc(w, merged)?;
    }
    for w in outs {
        c.add_arc(merged, w)?;
    }
    Ok(c)
}

/// The out-branching of `d` rooted at `root`, if there is exactly one.
///
/// Every non-root vertex picks one of its in-neighbours as parent; the
/// assignments forming an arborescence are counted, stopping at two.
pub fn unique_out_branching(d: &Digraph, root: Vertex) -> Result<Option<OutTree>> {
    d.check(root)?;
    if d.vertex_count() > UNIQUE_BRANCHING_BOUND {
        return Err(Error::TooLarge {
            actual: d.vertex_count(),
            bound: UNIQUE_BRANCHING_BOUND,
        });
    }
    let others: Vec<Vertex> = d.vertices().filter(|&v| v != root).collect();
    let choices: Vec<Vec<Vertex>> = others
        .iter()
        .map(|&v| d.in_neighbors(v).iter().copied().collect())
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut found: Option<BTreeMap<Vertex, Vertex>> = None;
    let mut count = 0usize;
    let mut pick = vec![0usize; others.len()];
    loop {
        let parent: BTreeMap<Vertex, Vertex> = others
            .iter()
            .zip(&pick)
            .zip(&choices)
            .map(|((&v, &i), c)| (v, c[i]))
            .collect();
        if reaches_root(&parent, root) {
            count += 1;
            if count > 1 {
                return Ok(None);
            }
            found = Some(parent);
        }
        // odometer step
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return Ok(found.and_then(|p| OutTree::new(root, p)));
            }
            pick[pos] += 1;
            if pick[pos] < choices[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

fn reaches_root(parent: &BTreeMap<Vertex, Vertex>, root: Vertex) -> bool {
    parent.keys().all(|&start| {
        let mut cur = start;
        for _ in 0..=parent.len() {
            if cur == root {
                return true;
            }
            cur = parent[&cur];
        }
        false
    })
}

/// Whether `tree` is a directed path, returned in order from its root.
pub fn as_path(tree: &OutTree) -> Option<Vec<Vertex>> {
    let mut child: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for (p, v) in tree.arcs() {
        if child.insert(p, v).is_some() {
            return None;
        }
    }
    let mut path = vec![tree.root()];
    while let Some(&next) = child.get(path.last().unwrap()) {
        path.push(next);
    }
    Some(path)
}
