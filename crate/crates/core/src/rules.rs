//! The five reduction rules for rooted k-leaf out-branching and the driver
//! that applies them until none fires.
//!
//! Each detector performs at most one rewrite and reports it as a
//! [`RuleEvent`]. Events carry every id they touch or mint, so a
//! [`ReductionTrace`] can be replayed on the original digraph.

use crate::connectivity::{
    as_path, contract_arc_into, cut_by_arc, dominators, is_separator, reachable_from,
    unique_out_branching,
};
use crate::digraph::{Arc, Digraph, RootedInstance, Variant, Vertex};
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Reachability,
    UselessArc,
    Bridge,
    AvoidableArc,
    TwoDirectionalPath,
}

impl RuleId {
    pub const ALL: [RuleId; 5] = [
        RuleId::Reachability,
        RuleId::UselessArc,
        RuleId::Bridge,
        RuleId::AvoidableArc,
        RuleId::TwoDirectionalPath,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RuleId::Reachability => "reachability",
            RuleId::UselessArc => "useless-arc",
            RuleId::Bridge => "bridge",
            RuleId::AvoidableArc => "avoidable-arc",
            RuleId::TwoDirectionalPath => "two-directional-path",
        };
        write!(f, "rule{} {}", self.number(), name)
    }
}

/// One rule application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleEvent {
    /// Vertices unreachable from the root. For the tree variant they are
    /// deleted; for the branching variant the instance is a no-instance.
    Reachability { unreachable: BTreeSet<Vertex> },
    /// `arc = (v, u)` deleted because `u` dominates `v`.
    UselessArc { arc: Arc, dominator: Vertex },
    /// `arc` cut off `cut` from the root and was contracted into `merged`.
    Bridge {
        arc: Arc,
        cut: BTreeSet<Vertex>,
        merged: Vertex,
    },
    /// `arc = (v, w)` deleted; `separator` cuts `v` from the root and every
    /// separator vertex has an arc to `w`.
    AvoidableArc {
        arc: Arc,
        separator: BTreeSet<Vertex>,
    },
    /// `path` replaced by the six-arc gadget on `p_1, p_out, u, v, p_in, p_l`.
    TwoDirectionalPath {
        path: Vec<Vertex>,
        p_in: Vertex,
        p_out: Vertex,
        removed: BTreeSet<Vertex>,
        u: Vertex,
        v: Vertex,
    },
}

impl RuleEvent {
    pub fn rule(&self) -> RuleId {
        match self {
            RuleEvent::Reachability { .. } => RuleId::Reachability,
            RuleEvent::UselessArc { .. } => RuleId::UselessArc,
            RuleEvent::Bridge { .. } => RuleId::Bridge,
            RuleEvent::AvoidableArc { .. } => RuleId::AvoidableArc,
            RuleEvent::TwoDirectionalPath { .. } => RuleId::TwoDirectionalPath,
        }
    }

    /// Re-applies the rewrite to `d`. Detection is not repeated.
    pub fn apply(&self, d: &Digraph) -> Result<Digraph> {
        let mut out = d.clone();
        match self {
            RuleEvent::Reachability { unreachable } => {
                for &x in unreachable {
                    out.remove_vertex(x)?;
                }
            }
            RuleEvent::UselessArc { arc, .. } | RuleEvent::AvoidableArc { arc, .. } => {
                out.remove_arc(arc.0, arc.1)?;
            }
            RuleEvent::Bridge { arc, merged, .. } => {
                out = contract_arc_into(d, arc.0, arc.1, *merged)?;
            }
            RuleEvent::TwoDirectionalPath {
                path,
                p_in,
                p_out,
                removed,
                u,
                v,
            } => {
                for &x in removed {
                    out.remove_vertex(x)?;
                }
                out.add_vertex(*u);
                out.add_vertex(*v);
                let (p1, pl) = (path[0], *path.last().unwrap());
                for (a, b) in [
                    (*p_out, *u),
                    (*u, *v),
                    (*v, *p_in),
                    (pl, *v),
                    (*v, *u),
                    (*u, p1),
                ] {
                    out.add_arc(a, b)?;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RuleEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.rule())?;
        match self {
            RuleEvent::Reachability { unreachable } => write!(f, "unreachable {unreachable:?}"),
            RuleEvent::UselessArc { arc, dominator } => {
                write!(f, "delete {}->{} (dominated by {dominator})", arc.0, arc.1)
            }
            RuleEvent::Bridge { arc, cut, merged } => write!(
                f,
                "contract {}->{} into {merged} (cuts {cut:?})",
                arc.0, arc.1
            ),
            RuleEvent::AvoidableArc { arc, separator } => {
                write!(f, "delete {}->{} (separator {separator:?})", arc.0, arc.1)
            }
            RuleEvent::TwoDirectionalPath {
                path,
                p_in,
                p_out,
                u,
                v,
                ..
            } => write!(
                f,
                "replace path {path:?} (in {p_in}, out {p_out}) with new {u}, {v}"
            ),
        }
    }
}

/// Applied events plus the fate of every original vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub events: Vec<RuleEvent>,
    /// Original vertex to the vertex now standing for it, or `None` once
    /// deleted.
    pub id_map: BTreeMap<Vertex, Option<Vertex>>,
}

impl ReductionTrace {
    pub fn new(original: &Digraph) -> Self {
        Self {
            events: Vec::new(),
            id_map: original.vertices().map(|v| (v, Some(v))).collect(),
        }
    }

    pub fn push(&mut self, event: RuleEvent) {
        let remap = |f: &dyn Fn(Vertex) -> Option<Vertex>,
                     map: &mut BTreeMap<_, Option<Vertex>>| {
            for cur in map.values_mut() {
                if let Some(c) = *cur {
                    *cur = f(c);
                }
            }
        };
        match &event {
            RuleEvent::Reachability { unreachable } => remap(
                &|c| (!unreachable.contains(&c)).then_some(c),
                &mut self.id_map,
            ),
            RuleEvent::Bridge { arc, merged, .. } => remap(
                &|c| Some(if c == arc.0 || c == arc.1 { *merged } else { c }),
                &mut self.id_map,
            ),
            RuleEvent::TwoDirectionalPath { removed, .. } => {
                remap(&|c| (!removed.contains(&c)).then_some(c), &mut self.id_map)
            }
            RuleEvent::UselessArc { .. } | RuleEvent::AvoidableArc { .. } => {}
        }
        self.events.push(event);
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Every intermediate digraph, starting with `original`.
    pub fn replay_steps(&self, original: &Digraph) -> Result<Vec<Digraph>> {
        let mut steps = vec![original.clone()];
        for e in &self.events {
            let next = e.apply(steps.last().unwrap())?;
            steps.push(next);
        }
        Ok(steps)
    }

    pub fn replay(&self, original: &Digraph) -> Result<Digraph> {
        Ok(self.replay_steps(original)?.pop().unwrap())
    }

    pub fn count(&self, rule: RuleId) -> usize {
        self.events.iter().filter(|e| e.rule() == rule).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule1Outcome {
    /// Branching variant with an unreachable vertex.
    NoVerdict(BTreeSet<Vertex>),
    /// Tree variant: unreachable vertices deleted.
    RemovedVertices(Digraph, BTreeSet<Vertex>),
    NotApplicable,
}

pub fn apply_rule1(inst: &RootedInstance) -> Rule1Outcome {
    let d = inst.digraph();
    let reach = reachable_from(d, inst.root()).expect("instance root exists");
    if reach.len() == d.vertex_count() {
        return Rule1Outcome::NotApplicable;
    }
    let unreachable: BTreeSet<Vertex> = d.vertices().filter(|v| !reach.contains(v)).collect();
    match inst.variant() {
        Variant::Branching => Rule1Outcome::NoVerdict(unreachable),
        Variant::Tree => Rule1Outcome::RemovedVertices(d.induced(&reach), unreachable),
    }
}

/// Deletes one arc `(v, u)` where `u` is a strict dominator of `v`.
/// Arcs into the root are such arcs.
pub fn apply_rule2(inst: &RootedInstance) -> Option<(Digraph, RuleEvent)> {
    let d = inst.digraph();
    let dom = dominators(d, inst.root()).expect("instance root exists");
    let (v, u) = d.arcs().find(|&(v, u)| dom[&v].contains(&u))?;
    let event = RuleEvent::UselessArc {
        arc: (v, u),
        dominator: u,
    };
    Some((event.apply(d).expect("arc exists"), event))
}

/// Contracts one arc whose deletion cuts at least two vertices off the
/// root; the merged vertex gets a fresh id.
pub fn apply_rule3(inst: &RootedInstance) -> Option<(Digraph, RuleEvent)> {
    let d = inst.digraph();
    let r = inst.root();
    // arcs leaving the root are left alone so the root keeps its identity
    let (arc, cut) = d.arcs().filter(|a| a.0 != r).find_map(|(u, v)| {
        let cut = cut_by_arc(d, r, u, v);
        (cut.len() >= 2).then_some(((u, v), cut))
    })?;
    let event = RuleEvent::Bridge {
        arc,
        cut,
        merged: d.fresh_id(),
    };
    Some((event.apply(d).expect("arc exists"), event))
}

/// Deletes one arc `(v, w)` for which some `S` of one or two in-neighbours
/// of `w` (excluding `v` and the root) separates `v` from the root.
pub fn apply_rule4(inst: &RootedInstance) -> Option<(Digraph, RuleEvent)> {
    find_avoidable_arc(inst, false)
}

/// Rule 4 detector. With `allow_target_in_separator` the search also admits
/// separators containing `v` itself, counting them as separating; that
/// variant is unsound and exists only as a negative control.
pub(crate) fn find_avoidable_arc(
    inst: &RootedInstance,
    allow_target_in_separator: bool,
) -> Option<(Digraph, RuleEvent)> {
    let d = inst.digraph();
    let r = inst.root();
    for (v, w) in d.arcs() {
        let pool: Vec<Vertex> = d
            .in_neighbors(w)
            .iter()
            .copied()
            .filter(|&x| x != r && (allow_target_in_separator || x != v))
            .collect();
        let singles = pool.iter().map(|&x| BTreeSet::from([x]));
        let pairs = pool
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| pool[i + 1..].iter().map(move |&y| BTreeSet::from([x, y])));
        for s in singles.chain(pairs) {
            let separates = if s.contains(&v) {
                true
            } else {
                is_separator(d, r, &s, v).expect("separator avoids root and target")
            };
            if separates {
                let event = RuleEvent::AvoidableArc {
                    arc: (v, w),
                    separator: s,
                };
                return Some((event.apply(d).expect("arc exists"), event));
            }
        }
    }
    None
}

/// Replaces one two-directional path of 7 or 8 vertices by the 4-vertex
/// gadget through two new vertices.
pub fn apply_rule5(inst: &RootedInstance) -> Option<(Digraph, RuleEvent)> {
    let d = inst.digraph();
    let event = find_two_directional_path(d, inst.root())?;
    Some((event.apply(d).expect("matched path exists"), event))
}

fn low_degree(d: &Digraph, x: Vertex) -> bool {
    d.in_degree(x) <= 2 && d.out_degree(x) <= 2
}

fn find_two_directional_path(d: &Digraph, r: Vertex) -> Option<RuleEvent> {
    let mut path = Vec::with_capacity(8);
    for start in d.vertices() {
        path.clear();
        path.push(start);
        if let Some(e) = extend_path(d, r, &mut path) {
            return Some(e);
        }
    }
    None
}

// Depth-first growth along out-arcs; every vertex that becomes internal must
// have in- and out-degree at most two.
fn extend_path(d: &Digraph, r: Vertex, path: &mut Vec<Vertex>) -> Option<RuleEvent> {
    if path.len() >= 7 {
        if let Some(e) = match_path(d, r, path) {
            return Some(e);
        }
        if path.len() == 8 {
            return None;
        }
    }
    let last = *path.last().unwrap();
    if path.len() >= 2 && !low_degree(d, last) {
        return None;
    }
    for &next in d.out_neighbors(last) {
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        let found = extend_path(d, r, path);
        path.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn match_path(d: &Digraph, r: Vertex, path: &[Vertex]) -> Option<RuleEvent> {
    let l = path.len();
    let members: BTreeSet<Vertex> = path.iter().copied().collect();
    let entries: BTreeSet<Vertex> = path
        .iter()
        .copied()
        .filter(|&x| d.in_neighbors(x).iter().any(|y| !members.contains(y)))
        .collect();
    let exits: BTreeSet<Vertex> = path
        .iter()
        .copied()
        .filter(|&x| d.out_neighbors(x).iter().any(|y| !members.contains(y)))
        .collect();
    let (p1, pl) = (path[0], path[l - 1]);

    let p_in_options: Vec<Vertex> = [pl, path[l - 2]]
        .into_iter()
        .filter(|&p_in| entries.iter().all(|&x| x == p1 || x == p_in))
        .filter(|&p_in| r == p1 || r == p_in || !members.contains(&r))
        .collect();
    let p_out_options: Vec<Vertex> = [p1, path[1]]
        .into_iter()
        .filter(|&p_out| exits.iter().all(|&x| x == pl || x == p_out))
        .collect();
    if p_in_options.is_empty() || p_out_options.is_empty() {
        return None;
    }

    let local = d.induced(&members);
    let from_p1 = unique_out_branching(&local, p1).ok()??;
    if as_path(&from_p1)? != path {
        return None;
    }
    for p_in in p_in_options {
        let Some(q) = unique_out_branching(&local, p_in)
            .ok()
            .flatten()
            .and_then(|t| as_path(&t))
        else {
            continue;
        };
        let Some(after_pl_on_q) = q
            .iter()
            .position(|&x| x == pl)
            .and_then(|i| q.get(i + 1).copied())
        else {
            continue;
        };
        for &p_out in &p_out_options {
            let idx = path.iter().position(|&x| x == p_out).unwrap();
            if path[idx + 1] == after_pl_on_q {
                continue;
            }
            let kept = [p1, p_in, p_out, pl];
            let removed: BTreeSet<Vertex> =
                path.iter().copied().filter(|x| !kept.contains(x)).collect();
            let u = d.fresh_id();
            return Some(RuleEvent::TwoDirectionalPath {
                path: path.to_vec(),
                p_in,
                p_out,
                removed,
                u,
                v: u + 1,
            });
        }
    }
    None
}

/// Applies the first rule that fires, in priority order 2..5. Rule 1 is
/// handled by the caller since it may end the reduction.
fn apply_one(inst: &RootedInstance) -> Option<(Digraph, RuleEvent)> {
    apply_rule2(inst)
        .or_else(|| apply_rule3(inst))
        .or_else(|| apply_rule4(inst))
        .or_else(|| apply_rule5(inst))
}

/// Result of saturating the rules, before any size check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    No,
    Reduced(RootedInstance),
}

/// Applies rules 1 to 5 in priority order, restarting from rule 1 after
/// every application, until none fires. Root and `k` are never changed.
pub fn reduce_to_fixpoint(inst: &RootedInstance) -> (Reduction, ReductionTrace) {
    let mut trace = ReductionTrace::new(inst.digraph());
    let mut cur = inst.clone();
    loop {
        match apply_rule1(&cur) {
            Rule1Outcome::NoVerdict(unreachable) => {
                trace.push(RuleEvent::Reachability { unreachable });
                return (Reduction::No, trace);
            }
            Rule1Outcome::RemovedVertices(d, unreachable) => {
                trace.push(RuleEvent::Reachability { unreachable });
                cur = cur.with_digraph(d);
                continue;
            }
            Rule1Outcome::NotApplicable => {}
        }
        match apply_one(&cur) {
            Some((d, event)) => {
                trace.push(event);
                cur = cur.with_digraph(d);
            }
            None => return (Reduction::Reduced(cur), trace),
        }
    }
}

/// Whether any detector fires on `inst`.
pub fn is_reduced(inst: &RootedInstance) -> bool {
    apply_rule1(inst) == Rule1Outcome::NotApplicable && apply_one(inst).is_none()
}
