//! Plain-text formats.
//!
//! Digraphs follow DIMACS conventions:
//!
//! ```text
//! c comment
//! p <n> <m>
//! a <tail> <head>     (1-indexed, m lines)
//! r <root>            (optional)
//! k <k>               (optional)
//! ```
//!
//! Set Cover instances are a line `n m b` followed by `m` lines of element
//! ids.

use crate::digraph::{Digraph, Vertex};
use crate::gadgets::SetCoverInstance;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} outside 1..={n}")]
    OutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: self-loop on {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate arc {tail} {head}")]
    DuplicateArc {
        line: usize,
        tail: usize,
        head: usize,
    },
    #[error("missing problem line `p <n> <m>`")]
    MissingHeader,
    #[error("header announces {expected} arcs, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("{0}")]
    Instance(#[from] crate::error::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGraph {
    pub digraph: Digraph,
    pub root: Option<Vertex>,
    pub k: Option<usize>,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn numbers<const N: usize>(line: usize, fields: &[&str]) -> Result<[usize; N], ParseError> {
    if fields.len() != N {
        return Err(syntax(
            line,
            format!("expected {N} numbers, got {}", fields.len()),
        ));
    }
    let mut out = [0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f
            .parse()
            .map_err(|_| syntax(line, format!("`{f}` is not a non-negative integer")))?;
    }
    Ok(out)
}

pub fn parse_digraph(text: &str) -> Result<ParsedGraph, ParseError> {
    let mut n: Option<(usize, usize)> = None;
    let mut digraph = Digraph::new();
    let mut root = None;
    let mut k = None;
    let in_range = |line, v, n: usize| {
        if (1..=n).contains(&v) {
            Ok(v)
        } else {
            Err(ParseError::OutOfRange { line, vertex: v, n })
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some((&tag, rest)) = fields.split_first() else {
            continue;
        };
        match tag {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(syntax(line, "second problem line"));
                }
                let [vertices, arcs] = numbers::<2>(line, rest)?;
                for v in 1..=vertices {
                    digraph.add_vertex(v);
                }
                n = Some((vertices, arcs));
            }
            "a" | "r" | "k" if n.is_none() => {
                return Err(syntax(line, format!("`{tag}` before problem line")));
            }
            "a" => {
                let vn = n.unwrap().0;
                let [t, h] = numbers::<2>(line, rest)?;
                let (t, h) = (in_range(line, t, vn)?, in_range(line, h, vn)?);
                if t == h {
                    return Err(ParseError::SelfLoop { line, vertex: t });
                }
                if !digraph.add_arc(t, h)? {
                    return Err(ParseError::DuplicateArc {
                        line,
                        tail: t,
                        head: h,
                    });
                }
            }
            "r" => {
                let [v] = numbers::<1>(line, rest)?;
                root = Some(in_range(line, v, n.unwrap().0)?);
            }
            "k" => {
                let [v] = numbers::<1>(line, rest)?;
                if v == 0 {
                    return Err(syntax(line, "k must be at least 1"));
                }
                k = Some(v);
            }
            other => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
    }
    let (_, expected) = n.ok_or(ParseError::MissingHeader)?;
    if digraph.arc_count() != expected {
        return Err(ParseError::ArcCount {
            expected,
            found: digraph.arc_count(),
        });
    }
    Ok(ParsedGraph { digraph, root, k })
}

/// Canonical text: vertices renumbered `1..=n` in id order, arcs sorted.
pub fn serialize(d: &Digraph, root: Option<Vertex>, k: Option<usize>) -> String {
    let (relabeled, map) = d.relabeled(1);
    serialize_mapped(&relabeled, root.map(|r| map[&r]), k)
}

fn serialize_mapped(d: &Digraph, root: Option<Vertex>, k: Option<usize>) -> String {
    let mut out = format!("p {} {}\n", d.vertex_count(), d.arc_count());
    for (u, v) in d.arcs() {
        out.push_str(&format!("a {u} {v}\n"));
    }
    if let Some(r) = root {
        out.push_str(&format!("r {r}\n"));
    }
    if let Some(k) = k {
        out.push_str(&format!("k {k}\n"));
    }
    out
}

/// Map from a digraph's ids to the `1..=n` ids used by [`serialize`].
pub fn canonical_ids(d: &Digraph) -> BTreeMap<Vertex, Vertex> {
    d.vertices().enumerate().map(|(i, v)| (v, i + 1)).collect()
}

pub fn parse_set_cover(text: &str) -> Result<SetCoverInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
    let (line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m, b] = numbers::<3>(line, &fields)?;
    let mut family = Vec::with_capacity(m);
    for (line, l) in lines {
        let set: BTreeSet<usize> = l
            .split_whitespace()
            .map(|f| {
                f.parse::<usize>()
                    .map_err(|_| syntax(line, format!("`{f}` is not an element id")))
                    .and_then(|e| in_range_elem(line, e, n))
            })
            .collect::<Result<_, _>>()?;
        family.push(set);
    }
    if family.len() != m {
        return Err(syntax(
            line,
            format!("header announces {m} sets, found {}", family.len()),
        ));
    }
    Ok(SetCoverInstance::new(n, family, b)?)
}

fn in_range_elem(line: usize, e: usize, n: usize) -> Result<usize, ParseError> {
    if (1..=n).contains(&e) {
        Ok(e)
    } else {
        Err(ParseError::OutOfRange { line, vertex: e, n })
    }
}
