//! Simple directed graphs, rooted instances and out-tree witnesses.
//!
//! Vertex identifiers are plain integers that stay stable while a graph is
//! rewritten: removing a vertex never renumbers the others, and new vertices
//! are minted from a counter that only grows.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Vertex = usize;
pub type Arc = (Vertex, Vertex);

/// A simple digraph: no self-loops, no parallel arcs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Digraph {
    out: BTreeMap<Vertex, BTreeSet<Vertex>>,
    inn: BTreeMap<Vertex, BTreeSet<Vertex>>,
    next_id: Vertex,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.out == other.out
    }
}

impl Eq for Digraph {}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a digraph on the given vertices and arcs, rejecting loops,
    /// duplicate arcs and arcs with unknown endpoints.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = Vertex>,
        arcs: impl IntoIterator<Item = Arc>,
    ) -> Result<Self> {
        let mut d = Digraph::new();
        for v in vertices {
            d.add_vertex(v);
        }
        for (u, v) in arcs {
            if d.has_arc(u, v) {
                return Err(Error::DuplicateArc(u, v));
            }
            d.add_arc(u, v)?;
        }
        Ok(d)
    }

    /// Builds a digraph from an arc list; vertices are the arc endpoints.
    /// Duplicate arcs are merged.
    pub fn from_arcs(arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        let mut d = Digraph::new();
        for (u, v) in arcs {
            d.add_vertex(u);
            d.add_vertex(v);
            d.add_arc(u, v)?;
        }
        Ok(d)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.out.entry(v).or_default();
        self.inn.entry(v).or_default();
        self.next_id = self.next_id.max(v + 1);
    }

    /// Mints a vertex id that has never been used in this graph.
    pub fn add_fresh_vertex(&mut self) -> Vertex {
        let v = self.next_id;
        self.add_vertex(v);
        v
    }

    /// The id `add_fresh_vertex` would mint next.
    pub fn fresh_id(&self) -> Vertex {
        self.next_id
    }

    /// Inserts an arc. Returns `false` if it was already present.
    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.check(u)?;
        self.check(v)?;
        let fresh = self.out.get_mut(&u).unwrap().insert(v);
        self.inn.get_mut(&v).unwrap().insert(u);
        Ok(fresh)
    }

    pub fn remove_arc(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        let present = self.out.get_mut(&u).map(|s| s.remove(&v)).unwrap_or(false);
        if !present {
            return Err(Error::MissingArc(u, v));
        }
        self.inn.get_mut(&v).unwrap().remove(&u);
        Ok(())
    }

    /// Removes a vertex together with its incident arcs.
    pub fn remove_vertex(&mut self, v: Vertex) -> Result<()> {
        let outs = self.out.remove(&v).ok_or(Error::UnknownVertex(v))?;
        let ins = self.inn.remove(&v).unwrap();
        for w in outs {
            self.inn.get_mut(&w).unwrap().remove(&v);
        }
        for w in ins {
            self.out.get_mut(&w).unwrap().remove(&v);
        }
        Ok(())
    }

    pub fn check(&self, v: Vertex) -> Result<()> {
        if self.out.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.out.contains_key(&v)
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.out.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.values().map(BTreeSet::len).sum()
    }

    /// Vertices in increasing id order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.out.keys().copied()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.out
            .iter()
            .flat_map(|(&u, hs)| hs.iter().map(move |&v| (u, v)))
    }

    /// Panics on unknown vertices; use [`Digraph::check`] first for
    /// untrusted ids.
    pub fn out_neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.out[&v]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.inn[&v]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[&v].len()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.inn[&v].len()
    }

    /// The subgraph induced on `keep`. Unknown ids in `keep` are ignored.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Digraph {
        let mut d = Digraph::new();
        for &v in keep.iter().filter(|v| self.contains(**v)) {
            d.add_vertex(v);
        }
        for (u, v) in self.arcs() {
            if keep.contains(&u) && keep.contains(&v) {
                d.add_arc(u, v).expect("endpoints present");
            }
        }
        d.next_id = d.next_id.max(self.next_id);
        d
    }

    /// Relabels vertices to `offset + 0, offset + 1, ...` in id order.
    /// Returns the relabelled graph and the old-to-new map.
    pub fn relabeled(&self, offset: Vertex) -> (Digraph, BTreeMap<Vertex, Vertex>) {
        let map: BTreeMap<Vertex, Vertex> = self
            .vertices()
            .enumerate()
            .map(|(i, v)| (v, offset + i))
            .collect();
        let mut d = Digraph::new();
        for &v in map.values() {
            d.add_vertex(v);
        }
        for (u, v) in self.arcs() {
            d.add_arc(map[&u], map[&v])
                .expect("relabel preserves simplicity");
        }
        (d, map)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Spanning out-trees.
    Branching,
    /// Out-trees that need not span the digraph.
    Tree,
}

/// A digraph with a designated root and a leaf target `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedInstance {
    digraph: Digraph,
    root: Vertex,
    k: usize,
    variant: Variant,
}

impl RootedInstance {
    pub fn new(digraph: Digraph, root: Vertex, k: usize, variant: Variant) -> Result<Self> {
        digraph.check(root)?;
        if k == 0 {
            return Err(Error::ZeroParameter);
        }
        Ok(Self {
            digraph,
            root,
            k,
            variant,
        })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn with_digraph(&self, digraph: Digraph) -> Self {
        debug_assert!(digraph.contains(self.root));
        Self {
            digraph,
            ..self.clone()
        }
    }

    pub fn into_digraph(self) -> Digraph {
        self.digraph
    }
}

/// A rooted out-tree given by its parent map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutTree {
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
    leaf_count: usize,
}

impl OutTree {
    /// Builds a tree from its parent map. Fails if the map has a cycle,
    /// reaches outside the tree, or assigns the root a parent.
    pub fn new(root: Vertex, parent: BTreeMap<Vertex, Vertex>) -> Option<Self> {
        if parent.contains_key(&root) {
            return None;
        }
        for &start in parent.keys() {
            let mut cur = start;
            let mut steps = 0;
            while cur != root {
                cur = *parent.get(&cur)?;
                steps += 1;
                if steps > parent.len() {
                    return None;
                }
            }
        }
        let inner: BTreeSet<Vertex> = parent.values().copied().collect();
        let leaf_count = 1 + parent.len() - inner.len();
        Some(Self {
            root,
            parent,
            leaf_count,
        })
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied()
    }

    pub fn parents(&self) -> &BTreeMap<Vertex, Vertex> {
        &self.parent
    }

    /// Tree vertices without children. The single-vertex tree has one leaf.
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        std::iter::once(self.root)
            .chain(self.parent.keys().copied())
            .collect()
    }

    pub fn leaves(&self) -> BTreeSet<Vertex> {
        let inner: BTreeSet<Vertex> = self.parent.values().copied().collect();
        self.vertices()
            .into_iter()
            .filter(|v| !inner.contains(v))
            .collect()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.parent.iter().map(|(&v, &p)| (p, v))
    }

    /// Every tree arc is an arc of `d`.
    pub fn is_out_tree_of(&self, d: &Digraph) -> bool {
        d.contains(self.root) && self.arcs().all(|(u, v)| d.has_arc(u, v))
    }

    /// A spanning out-tree of `d`.
    pub fn is_out_branching_of(&self, d: &Digraph) -> bool {
        self.is_out_tree_of(d) && self.parent.len() + 1 == d.vertex_count()
    }
}
