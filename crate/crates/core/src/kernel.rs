//! Rooted kernelization with the cubic size verdict, and the per-root
//! Turing kernelization for the unrooted problems.

use crate::digraph::{Digraph, RootedInstance, Variant, Vertex};
use crate::error::Result;
use crate::rules::{reduce_to_fixpoint, Reduction, ReductionTrace};
use crate::solver::Solver;
use rayon::prelude::*;
use serde::Serialize;

/// Reduced instances with more vertices than this have a k-leaf solution.
pub fn size_bound(k: usize) -> u128 {
    1540 * (k as u128).pow(3)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "instance", rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Reduced(RootedInstance),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelOutcome {
    pub verdict: Verdict,
    pub trace: ReductionTrace,
    pub size_bound_used: u128,
}

impl KernelOutcome {
    pub fn kernel(&self) -> Option<&RootedInstance> {
        match &self.verdict {
            Verdict::Reduced(inst) => Some(inst),
            _ => None,
        }
    }

    /// Answer of the original instance, solving a reduced kernel with
    /// `solver` when no verdict was reached.
    pub fn decide(&self, solver: &Solver) -> Result<bool> {
        match &self.verdict {
            Verdict::Yes => Ok(true),
            Verdict::No => Ok(false),
            Verdict::Reduced(inst) => solver.decide(inst),
        }
    }
}

/// Saturates the reduction rules; answers yes outright when the reduced
/// digraph still has more than `1540 k^3` vertices.
pub fn kernelize_rooted(inst: &RootedInstance) -> KernelOutcome {
    let bound = size_bound(inst.k());
    let (reduction, trace) = reduce_to_fixpoint(inst);
    let verdict = match reduction {
        Reduction::No => Verdict::No,
        Reduction::Reduced(reduced) if reduced.digraph().vertex_count() as u128 > bound => {
            Verdict::Yes
        }
        Reduction::Reduced(reduced) => Verdict::Reduced(reduced),
    };
    KernelOutcome {
        verdict,
        trace,
        size_bound_used: bound,
    }
}

/// One rooted kernel per vertex of `d`, in increasing root order.
pub fn turing_kernelize(
    d: &Digraph,
    k: usize,
    variant: Variant,
) -> Result<Vec<(Vertex, KernelOutcome)>> {
    let roots: Vec<Vertex> = d.vertices().collect();
    roots
        .into_par_iter()
        .map(|root| {
            let inst = RootedInstance::new(d.clone(), root, k, variant)?;
            Ok((root, kernelize_rooted(&inst)))
        })
        .collect()
}

/// The unrooted instance is a yes-instance iff some rooted kernel is.
pub fn decide_unrooted_via_kernels(
    d: &Digraph,
    k: usize,
    variant: Variant,
    solver: &Solver,
) -> Result<bool> {
    let outcomes = turing_kernelize(d, k, variant)?;
    for (_, outcome) in &outcomes {
        if outcome.decide(solver)? {
            return Ok(true);
        }
    }
    Ok(false)
}
