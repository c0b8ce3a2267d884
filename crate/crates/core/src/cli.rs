//! Command-line front end. [`run_command`] returns the exit code and the
//! complete output so it can be tested without a process boundary.

use crate::digraph::{Digraph, RootedInstance, Variant, Vertex};
use crate::format::{self, ParsedGraph};
use crate::gadgets::{normalize_and_chain, set_cover_to_willow};
use crate::harness::{verify, Mutation, SafenessConfig};
use crate::kernel::{kernelize_rooted, turing_kernelize, Verdict};
use crate::solver::Solver;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "kleaf",
    version,
    about = "k-leaf out-branching kernelization toolkit"
)]
struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Branching,
    Tree,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Branching => Variant::Branching,
            VariantArg::Tree => Variant::Tree,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a rooted instance and apply the size verdict.
    Kernelize {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        root: Option<Vertex>,
        #[arg(short)]
        k: Option<usize>,
        file: PathBuf,
    },
    /// Solve exactly by enumeration (rooted if a root is known, else over all roots).
    Solve {
        #[arg(long)]
        root: Option<Vertex>,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "branching")]
        variant: VariantArg,
        file: PathBuf,
    },
    /// Kernelize once per root and decide the unrooted problem.
    Turing {
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value = "branching")]
        variant: VariantArg,
        file: PathBuf,
    },
    /// Build lower-bound gadgets.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Check rule safeness against the exact solver on random instances.
    Verify {
        #[arg(long)]
        trials: usize,
        #[arg(long = "max-n")]
        max_n: usize,
        #[arg(long)]
        seed: u64,
        /// Run with an unsound Rule 4 to confirm violations are caught.
        #[arg(long)]
        mutate: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GadgetCommand {
    /// Set Cover file to a nice willow with its leaf target.
    SetCover { file: PathBuf },
    /// Set Cover files to willows, padded and chained into one instance.
    Chain {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(i32, String), Failure>;

/// Parses `argv` (program name first) and runs the command. Exit codes: 0
/// success, 1 bad input or failed verification, 2 usage error.
pub fn run_command<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let result = match cli.command {
        Command::Kernelize {
            variant,
            root,
            k,
            file,
        } => kernelize(&file, variant.into(), root, k, cli.json),
        Command::Solve {
            root,
            k,
            variant,
            file,
        } => solve(&file, variant.into(), root, k, cli.json),
        Command::Turing { k, variant, file } => turing(&file, k, variant.into(), cli.json),
        Command::Gadget { which } => match which {
            GadgetCommand::SetCover { file } => gadget_set_cover(&file, cli.json),
            GadgetCommand::Chain { files } => gadget_chain(&files, cli.json),
        },
        Command::Verify {
            trials,
            max_n,
            seed,
            mutate,
        } => run_verify(trials, max_n, seed, mutate, cli.json),
    };
    match result {
        Ok(done) => done,
        Err(Failure::Usage(msg)) => (2, format!("error: {msg}\n")),
        Err(Failure::Input(msg)) => (1, format!("error: {msg}\n")),
    }
}

fn read_graph(path: &Path) -> Result<ParsedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    format::parse_digraph(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn rooted(
    path: &Path,
    variant: Variant,
    root: Option<Vertex>,
    k: Option<usize>,
) -> Result<RootedInstance, Failure> {
    let parsed = read_graph(path)?;
    let root = root
        .or(parsed.root)
        .ok_or_else(|| Failure::Usage("no root given (--root or an `r` line)".into()))?;
    let k = k
        .or(parsed.k)
        .ok_or_else(|| Failure::Usage("no k given (-k or a `k` line)".into()))?;
    Ok(RootedInstance::new(parsed.digraph, root, k, variant)?)
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Yes => "YES",
        Verdict::No => "NO",
        Verdict::Reduced(_) => "REDUCED",
    }
}

fn kernelize(
    path: &Path,
    variant: Variant,
    root: Option<Vertex>,
    k: Option<usize>,
    json: bool,
) -> Outcome {
    let inst = rooted(path, variant, root, k)?;
    let outcome = kernelize_rooted(&inst);
    let kernel_text = outcome
        .kernel()
        .map(|kern| format::serialize(kern.digraph(), Some(kern.root()), Some(kern.k())));
    if json {
        let doc = json!({
            "verdict": verdict_name(&outcome.verdict),
            "size_bound": outcome.size_bound_used.to_string(),
            "input": {"vertices": inst.digraph().vertex_count(), "arcs": inst.digraph().arc_count()},
            "trace": outcome.trace.events,
            "kernel": outcome.kernel().map(|kern| json!({
                "vertices": kern.digraph().vertex_count(),
                "arcs": kern.digraph().arc_count(),
                "text": kernel_text,
            })),
        });
        return Ok((0, format!("{doc}\n")));
    }
    let mut out = String::new();
    writeln!(out, "verdict {}", verdict_name(&outcome.verdict)).unwrap();
    writeln!(out, "size-bound {}", outcome.size_bound_used).unwrap();
    writeln!(out, "events {}", outcome.trace.len()).unwrap();
    for e in &outcome.trace.events {
        writeln!(out, "event {e}").unwrap();
    }
    if let (Some(kern), Some(text)) = (outcome.kernel(), kernel_text) {
        writeln!(
            out,
            "kernel {} vertices {} arcs",
            kern.digraph().vertex_count(),
            kern.digraph().arc_count()
        )
        .unwrap();
        out.push_str(&text);
    }
    Ok((0, out))
}

fn solve(
    path: &Path,
    variant: Variant,
    root: Option<Vertex>,
    k: Option<usize>,
    json: bool,
) -> Outcome {
    let parsed = read_graph(path)?;
    let d = parsed.digraph;
    let k = k.or(parsed.k);
    let solver = Solver::default();
    let (best, best_root) = match root.or(parsed.root) {
        Some(r) => (solver.max_leaf(&d, r, variant)?, Some(r)),
        None => best_over_roots(&d, variant, &solver)?,
    };
    let answer = k.map(|k| best.is_some_and(|b| b >= k));
    if json {
        let doc = json!({"max_leaves": best, "root": best_root, "k": k, "answer": answer});
        return Ok((0, format!("{doc}\n")));
    }
    let mut out = String::new();
    match (best, best_root) {
        (Some(b), Some(r)) => writeln!(out, "max-leaves {b} root {r}").unwrap(),
        _ => writeln!(out, "max-leaves none").unwrap(),
    }
    if let (Some(r), Some(_)) = (best_root, best) {
        let tree = match variant {
            Variant::Branching => solver.max_leaf_out_branching(&d, r)?.map(|(_, t)| t),
            Variant::Tree => Some(solver.max_leaf_out_tree(&d, r)?.1),
        };
        for (u, v) in tree.iter().flat_map(|t| t.arcs()) {
            writeln!(out, "tree-arc {u} {v}").unwrap();
        }
    }
    if let Some(a) = answer {
        writeln!(out, "answer {}", if a { "YES" } else { "NO" }).unwrap();
    }
    Ok((0, out))
}

fn best_over_roots(
    d: &Digraph,
    variant: Variant,
    solver: &Solver,
) -> Result<(Option<usize>, Option<Vertex>), Failure> {
    let mut best = (None, None);
    for r in d.vertices() {
        let v = solver.max_leaf(d, r, variant)?;
        if v > best.0 {
            best = (v, Some(r));
        }
    }
    Ok(best)
}

fn turing(path: &Path, k: usize, variant: Variant, json: bool) -> Outcome {
    if k == 0 {
        return Err(Failure::Usage("k must be at least 1".into()));
    }
    let d = read_graph(path)?.digraph;
    let outcomes = turing_kernelize(&d, k, variant)?;
    let solver = Solver::default();
    let mut rows = Vec::new();
    let mut any_yes = false;
    let mut unknown = false;
    for (root, outcome) in &outcomes {
        let decision = outcome.decide(&solver).ok();
        any_yes |= decision == Some(true);
        unknown |= decision.is_none();
        rows.push((root, outcome, decision));
    }
    let answer = if any_yes {
        "YES"
    } else if unknown {
        "UNKNOWN"
    } else {
        "NO"
    };
    if json {
        let per_root: Vec<_> = rows
            .iter()
            .map(|(root, o, decision)| {
                json!({
                    "root": root,
                    "verdict": verdict_name(&o.verdict),
                    "kernel_vertices": o.kernel().map(|k| k.digraph().vertex_count()),
                    "kernel_arcs": o.kernel().map(|k| k.digraph().arc_count()),
                    "events": o.trace.len(),
                    "decision": decision,
                })
            })
            .collect();
        let doc = json!({"k": k, "roots": per_root, "answer": answer});
        return Ok((0, format!("{doc}\n")));
    }
    let mut out = String::new();
    for (root, o, decision) in rows {
        let size = o
            .kernel()
            .map(|k| {
                format!(
                    " kernel {}v {}a",
                    k.digraph().vertex_count(),
                    k.digraph().arc_count()
                )
            })
            .unwrap_or_default();
        let dec = match decision {
            Some(true) => "yes",
            Some(false) => "no",
            None => "unknown",
        };
        writeln!(
            out,
            "root {root} {}{size} events {} decision {dec}",
            verdict_name(&o.verdict),
            o.trace.len()
        )
        .unwrap();
    }
    writeln!(out, "answer {answer}").unwrap();
    Ok((0, out))
}

fn read_set_cover(path: &Path) -> Result<crate::gadgets::SetCoverInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    format::parse_set_cover(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn gadget_set_cover(path: &Path, json: bool) -> Outcome {
    let sc = read_set_cover(path)?;
    let (w, target) = set_cover_to_willow(&sc)?;
    let text = format::serialize(w.digraph(), Some(w.top()), Some(target));
    if json {
        let doc = json!({"target": target, "stem": w.stem(), "text": text});
        return Ok((0, format!("{doc}\n")));
    }
    let stem: Vec<String> = w.stem().iter().map(|v| v.to_string()).collect();
    Ok((0, format!("c stem {}\n{text}", stem.join(" "))))
}

fn gadget_chain(paths: &[PathBuf], json: bool) -> Outcome {
    let willows = paths
        .iter()
        .map(|p| Ok(set_cover_to_willow(&read_set_cover(p)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let (d, k) = normalize_and_chain(&willows)?;
    let text = format::serialize(&d, None, Some(k));
    if json {
        let doc =
            json!({"k": k, "vertices": d.vertex_count(), "arcs": d.arc_count(), "text": text});
        return Ok((0, format!("{doc}\n")));
    }
    Ok((0, text))
}

fn run_verify(trials: usize, max_n: usize, seed: u64, mutate: bool, json: bool) -> Outcome {
    let solver = Solver::default();
    if max_n > solver.max_vertices {
        return Err(Failure::Usage(format!(
            "--max-n {max_n} exceeds the solver bound {}",
            solver.max_vertices
        )));
    }
    let config = SafenessConfig {
        mutation: if mutate {
            Mutation::Rule4TargetInSeparator
        } else {
            Mutation::None
        },
        ..SafenessConfig::new(trials, max_n, seed)
    };
    let report = verify(&config);
    let code = if report.is_clean() { 0 } else { 1 };
    if json {
        let doc = serde_json::to_string(&report)?;
        return Ok((code, format!("{doc}\n")));
    }
    Ok((code, format!("{report}\n")))
}
