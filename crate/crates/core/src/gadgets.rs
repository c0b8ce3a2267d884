//! Lower-bound constructions: disjoint-union composition, willow graphs,
//! the Set Cover gadget, padding and the willow chain.

use crate::connectivity::reach_avoiding;
use crate::digraph::{Arc, Digraph, Vertex};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Disjoint union of instances sharing the same `k`. Vertices of the i-th
/// input are renumbered consecutively after those of the previous inputs,
/// starting at 1.
pub fn compose_disjoint_union(instances: &[(Digraph, usize)]) -> Result<(Digraph, usize)> {
    let (_, k) = *instances.first().ok_or(Error::Empty)?;
    let mut union = Digraph::new();
    let mut offset = 1;
    for (d, ki) in instances {
        if *ki != k {
            return Err(Error::ParameterMismatch(k, *ki));
        }
        let (relabeled, _) = d.relabeled(offset);
        offset += d.vertex_count();
        for v in relabeled.vertices() {
            union.add_vertex(v);
        }
        for (u, v) in relabeled.arcs() {
            union.add_arc(u, v)?;
        }
    }
    Ok((union, k))
}

/// A digraph whose arcs split into a spanning stem path (`a1`, bottom to
/// top) and arcs pointing back down the stem (`a2`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WillowGraph {
    digraph: Digraph,
    stem: Vec<Vertex>,
    a1: BTreeSet<Arc>,
    a2: BTreeSet<Arc>,
}

impl WillowGraph {
    /// Splits `digraph` along `stem`. Fails unless the stem visits every
    /// vertex once, consecutive stem vertices are joined by arcs, and all
    /// remaining arcs point backwards along the stem.
    ///
    /// The single-source condition on the back arcs is not enforced here;
    /// see [`WillowGraph::is_willow`].
    pub fn new(digraph: Digraph, stem: Vec<Vertex>) -> Result<Self> {
        let position: BTreeMap<Vertex, usize> =
            stem.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if position.len() != stem.len() || stem.len() != digraph.vertex_count() {
            return Err(Error::InvalidWillow(
                "stem must visit every vertex once".into(),
            ));
        }
        for &v in &stem {
            digraph.check(v)?;
        }
        let a1: BTreeSet<Arc> = stem.windows(2).map(|w| (w[0], w[1])).collect();
        if let Some(&(u, v)) = a1.iter().find(|(u, v)| !digraph.has_arc(*u, *v)) {
            return Err(Error::InvalidWillow(format!("stem arc {u}->{v} missing")));
        }
        let a2: BTreeSet<Arc> = digraph.arcs().filter(|a| !a1.contains(a)).collect();
        if let Some(&(u, v)) = a2.iter().find(|(u, v)| position[u] < position[v]) {
            return Err(Error::InvalidWillow(format!(
                "{u}->{v} is not a backward arc"
            )));
        }
        Ok(Self {
            digraph,
            stem,
            a1,
            a2,
        })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn stem(&self) -> &[Vertex] {
        &self.stem
    }

    pub fn a1(&self) -> &BTreeSet<Arc> {
        &self.a1
    }

    pub fn a2(&self) -> &BTreeSet<Arc> {
        &self.a2
    }

    pub fn bottom(&self) -> Vertex {
        self.stem[0]
    }

    pub fn top(&self) -> Vertex {
        *self.stem.last().unwrap()
    }

    /// The back arcs form a DAG (always true for backward arcs) with a
    /// single vertex of in-degree zero, necessarily the top.
    pub fn is_willow(&self) -> bool {
        let heads: BTreeSet<Vertex> = self.a2.iter().map(|a| a.1).collect();
        heads.len() + 1 == self.stem.len()
    }

    fn back_arc_graph(&self) -> Digraph {
        let mut d = Digraph::new();
        for v in self.digraph.vertices() {
            d.add_vertex(v);
        }
        for &(u, v) in &self.a2 {
            d.add_arc(u, v).expect("back arcs are simple");
        }
        d
    }
}

/// A willow whose top has back arcs to the two stem vertices below it,
/// those two vertices touch no other back arc, and every vertex is
/// reachable from the top through back arcs alone.
pub fn is_nice_willow(w: &WillowGraph) -> bool {
    let n = w.stem.len();
    if n < 3 || !w.is_willow() {
        return false;
    }
    let (top, below, below2) = (w.stem[n - 1], w.stem[n - 2], w.stem[n - 3]);
    if !w.a2.contains(&(top, below)) || !w.a2.contains(&(top, below2)) {
        return false;
    }
    let touches_other =
        w.a2.iter()
            .any(|&(a, b)| (a == below || b == below || a == below2 || b == below2) && a != top);
    if touches_other {
        return false;
    }
    reach_avoiding(&w.back_arc_graph(), top, &BTreeSet::new(), None).len() == n
}

/// A Set Cover instance over the universe `{1..n}`: is there a subfamily of
/// at most `bound` sets covering every element?
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    universe_size: usize,
    family: Vec<BTreeSet<usize>>,
    bound: usize,
}

impl SetCoverInstance {
    /// Requires every element in some set and `bound <= m - 2`.
    pub fn new(universe_size: usize, family: Vec<BTreeSet<usize>>, bound: usize) -> Result<Self> {
        check_family(universe_size, &family)?;
        if bound + 2 > family.len() {
            return Err(Error::InvalidSetCover(format!(
                "bound {bound} exceeds m - 2 for m = {}",
                family.len()
            )));
        }
        Ok(Self {
            universe_size,
            family,
            bound,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn family(&self) -> &[BTreeSet<usize>] {
        &self.family
    }

    pub fn bound(&self) -> usize {
        self.bound
    }
}

fn check_family(universe_size: usize, family: &[BTreeSet<usize>]) -> Result<()> {
    if let Some(bad) = family
        .iter()
        .flatten()
        .find(|&&e| e == 0 || e > universe_size)
    {
        return Err(Error::InvalidSetCover(format!(
            "element {bad} outside 1..={universe_size}"
        )));
    }
    let covered: BTreeSet<usize> = family.iter().flatten().copied().collect();
    if covered.len() != universe_size {
        let missing = (1..=universe_size).find(|e| !covered.contains(e)).unwrap();
        return Err(Error::InvalidSetCover(format!(
            "element {missing} is in no set"
        )));
    }
    Ok(())
}

/// Vertex ids of the Set Cover gadget, numbered along the stem from the
/// bottom: `e_n, ..., e_1, s_m, ..., s_1, p, p', r`.
#[derive(Clone, Copy, Debug)]
pub struct SetCoverLayout {
    pub n: usize,
    pub m: usize,
}

impl SetCoverLayout {
    pub fn element(&self, j: usize) -> Vertex {
        self.n - j + 1
    }

    pub fn set(&self, i: usize) -> Vertex {
        self.n + self.m - i + 1
    }

    pub fn p(&self) -> Vertex {
        self.n + self.m + 1
    }

    pub fn p_prime(&self) -> Vertex {
        self.n + self.m + 2
    }

    pub fn root(&self) -> Vertex {
        self.n + self.m + 3
    }
}

/// The Set Cover gadget for a family, without the `bound <= m - 2`
/// requirement (the graph does not depend on the bound).
pub fn set_cover_gadget(universe_size: usize, family: &[BTreeSet<usize>]) -> Result<WillowGraph> {
    check_family(universe_size, family)?;
    let lay = SetCoverLayout {
        n: universe_size,
        m: family.len(),
    };
    let stem: Vec<Vertex> = (1..=lay.root()).collect();
    let mut d = Digraph::new();
    for &v in &stem {
        d.add_vertex(v);
    }
    for w in stem.windows(2) {
        d.add_arc(w[0], w[1])?;
    }
    for (i, set) in family.iter().enumerate() {
        let s = lay.set(i + 1);
        d.add_arc(lay.root(), s)?;
        for &e in set {
            d.add_arc(s, lay.element(e))?;
        }
    }
    d.add_arc(lay.root(), lay.p())?;
    d.add_arc(lay.root(), lay.p_prime())?;
    WillowGraph::new(d, stem)
}

/// Builds the nice willow whose out-branchings with `n + m + 2 - b` leaves
/// correspond to set covers of size at most `b`.
pub fn set_cover_to_willow(sc: &SetCoverInstance) -> Result<(WillowGraph, usize)> {
    let w = set_cover_gadget(sc.universe_size, &sc.family)?;
    let target = sc.universe_size + sc.family.len() + 2 - sc.bound;
    Ok((w, target))
}

/// Raises a willow's leaf budget from `budget` to `max_budget` by
/// subdividing the topmost stem arc `max_budget - budget` times and adding a
/// back arc from the top to every new vertex.
pub fn pad_willow(w: &WillowGraph, budget: usize, max_budget: usize) -> Result<WillowGraph> {
    if budget > max_budget {
        return Err(Error::BudgetExceedsMax {
            budget,
            max: max_budget,
        });
    }
    if !is_nice_willow(w) {
        return Err(Error::InvalidWillow("padding needs a nice willow".into()));
    }
    if budget == max_budget {
        return Ok(w.clone());
    }
    let n = w.stem.len();
    let (below, top) = (w.stem[n - 2], w.stem[n - 1]);
    let mut d = w.digraph.clone();
    d.remove_arc(below, top)?;
    let mut stem = w.stem[..n - 1].to_vec();
    for _ in budget..max_budget {
        let x = d.add_fresh_vertex();
        d.add_arc(*stem.last().unwrap(), x)?;
        d.add_arc(top, x)?;
        stem.push(x);
    }
    d.add_arc(*stem.last().unwrap(), top)?;
    stem.push(top);
    WillowGraph::new(d, stem)
}

/// Chains willows that all carry leaf budget `max_budget`: their disjoint
/// union plus an arc from each top to the next bottom, closing the cycle
/// from the last top to the first bottom. Returns the digraph and the new
/// parameter `max_budget + 1`.
pub fn build_willow_chain(
    willows: &[(WillowGraph, usize)],
    max_budget: usize,
) -> Result<(Digraph, usize)> {
    if willows.is_empty() {
        return Err(Error::Empty);
    }
    for (w, budget) in willows {
        if *budget != max_budget {
            return Err(Error::InvalidWillow(format!(
                "budget {budget} not normalized to {max_budget}"
            )));
        }
        if !is_nice_willow(w) {
            return Err(Error::InvalidWillow("chain needs nice willows".into()));
        }
    }
    let mut chain = Digraph::new();
    let mut ends = Vec::with_capacity(willows.len());
    let mut offset = 1;
    for (w, _) in willows {
        let (relabeled, map) = w.digraph.relabeled(offset);
        offset += w.digraph.vertex_count();
        for v in relabeled.vertices() {
            chain.add_vertex(v);
        }
        for (u, v) in relabeled.arcs() {
            chain.add_arc(u, v)?;
        }
        ends.push((map[&w.bottom()], map[&w.top()]));
    }
    for i in 0..ends.len() {
        let top = ends[i].1;
        let next_bottom = ends[(i + 1) % ends.len()].0;
        // a single willow may already have this arc among its back arcs
        chain.add_arc(top, next_bottom)?;
    }
    Ok((chain, max_budget + 1))
}

/// Pads every willow to the largest budget, then chains them.
pub fn normalize_and_chain(willows: &[(WillowGraph, usize)]) -> Result<(Digraph, usize)> {
    let max_budget = willows.iter().map(|(_, b)| *b).max().ok_or(Error::Empty)?;
    let padded = willows
        .iter()
        .map(|(w, b)| Ok((pad_willow(w, *b, max_budget)?, max_budget)))
        .collect::<Result<Vec<_>>>()?;
    build_willow_chain(&padded, max_budget)
}
