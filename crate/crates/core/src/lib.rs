//! Kernelization and exact solving for the rooted and unrooted k-leaf
//! out-branching and out-tree problems on digraphs.
//!
//! The crate provides the reduction rules and their fixpoint driver, the
//! cubic size verdict for rooted instances, the per-root Turing kernel for
//! unrooted ones, a brute-force max-leaf oracle, and constructors for the
//! willow-graph gadgets used in the kernel lower bound.

pub mod cli;
pub mod connectivity;
pub mod digraph;
pub mod error;
pub mod format;
pub mod gadgets;
pub mod harness;
pub mod kernel;
pub mod rules;
pub mod solver;

pub use digraph::{Arc, Digraph, OutTree, RootedInstance, Variant, Vertex};
pub use error::{Error, Result};
