//! Instance generators and the rule-safeness battery.
//!
//! Every rule application found on a generated instance is checked against
//! the brute-force solver: the maximum leaf count rooted at `r` must be the
//! same before and after, for both the branching and the tree variant.

use crate::connectivity::reachable_from;
use crate::digraph::{Digraph, RootedInstance, Variant, Vertex};
use crate::format;
use crate::gadgets::WillowGraph;
use crate::rules::{
    apply_rule1, apply_rule2, apply_rule3, apply_rule5, find_avoidable_arc, reduce_to_fixpoint,
    Rule1Outcome, RuleEvent, RuleId,
};
use crate::solver::Solver;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Structure {
    /// Every ordered pair is an arc independently.
    Random,
    /// As `Random`, then arcs are added until vertex 1 reaches everything.
    RandomReachable,
    /// A two-directional path of 7 or 8 vertices with random attachments.
    BidirPath,
    /// A random nice willow.
    Willow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub n: usize,
    pub arc_probability: f64,
    pub seed: u64,
    pub structure: Structure,
}

impl GenSpec {
    pub fn new(n: usize, arc_probability: f64, seed: u64, structure: Structure) -> Self {
        Self {
            n,
            arc_probability,
            seed,
            structure,
        }
    }
}

/// Builds the digraph described by `spec` on vertices `1..`, with its
/// designated root. Identical specs give identical graphs.
pub fn generate(spec: &GenSpec) -> (Digraph, Vertex) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n.max(1);
    let p = spec.arc_probability.clamp(0.0, 1.0);
    match spec.structure {
        Structure::Random => (random_digraph(n, p, &mut rng), 1),
        Structure::RandomReachable => {
            let mut d = random_digraph(n, p, &mut rng);
            make_reachable(&mut d, 1, &mut rng);
            (d, 1)
        }
        Structure::BidirPath => bidir_path(n, p, &mut rng),
        Structure::Willow => {
            let w = random_nice_willow(n, p, &mut rng);
            let top = w.top();
            (w.digraph().clone(), top)
        }
    }
}

/// Random nice willow on `max(n, 3)` stem vertices `1..`, bottom first.
pub fn generate_willow(spec: &GenSpec) -> WillowGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    random_nice_willow(spec.n, spec.arc_probability.clamp(0.0, 1.0), &mut rng)
}

fn random_digraph(n: usize, p: f64, rng: &mut impl Rng) -> Digraph {
    let mut d = Digraph::new();
    for v in 1..=n {
        d.add_vertex(v);
    }
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.gen_bool(p) {
                d.add_arc(u, v).unwrap();
            }
        }
    }
    d
}

fn make_reachable(d: &mut Digraph, root: Vertex, rng: &mut impl Rng) {
    loop {
        let reach = reachable_from(d, root).unwrap();
        let Some(missing) = d.vertices().find(|v| !reach.contains(v)) else {
            return;
        };
        let from: Vec<Vertex> = reach.into_iter().collect();
        let tail = *from.choose(rng).unwrap();
        d.add_arc(tail, missing).unwrap();
    }
}

fn random_nice_willow(n: usize, p: f64, rng: &mut impl Rng) -> WillowGraph {
    let n = n.max(3);
    let mut d = Digraph::new();
    for v in 1..=n {
        d.add_vertex(v);
    }
    for v in 1..n {
        d.add_arc(v, v + 1).unwrap();
    }
    d.add_arc(n, n - 1).unwrap();
    d.add_arc(n, n - 2).unwrap();
    for head in 1..=n.saturating_sub(3) {
        let tails: Vec<Vertex> = (head + 1..=n - 3).chain([n]).collect();
        let forced = *tails.choose(rng).unwrap();
        for &t in &tails {
            if (t == forced || rng.gen_bool(p)) && !d.has_arc(t, head) {
                d.add_arc(t, head).unwrap();
            }
        }
    }
    WillowGraph::new(d, (1..=n).collect()).expect("construction yields a willow")
}

fn bidir_path(n: usize, p: f64, rng: &mut impl Rng) -> (Digraph, Vertex) {
    let len = if rng.gen_bool(0.5) { 7 } else { 8 };
    let root = 1;
    let path: Vec<Vertex> = (2..len + 2).collect();
    let extra = n.saturating_sub(len + 1).max(1);
    let outside: Vec<Vertex> = (len + 2..len + 2 + extra).collect();
    let mut d = Digraph::new();
    for v in 1..len + 2 + extra {
        d.add_vertex(v);
    }
    for w in path.windows(2) {
        d.add_arc(w[0], w[1]).unwrap();
        if !rng.gen_bool(0.05) {
            d.add_arc(w[1], w[0]).unwrap();
        }
    }
    let (first, last) = (path[0], path[len - 1]);
    d.add_arc(root, first).unwrap();
    // second entry point: usually the far end, sometimes the one before it
    let entry = if rng.gen_bool(0.85) {
        last
    } else {
        path[len - 2]
    };
    if rng.gen_bool(0.7) {
        let from = if rng.gen_bool(0.6) {
            root
        } else {
            *outside.choose(rng).unwrap()
        };
        d.add_arc(from, entry).unwrap();
    }
    let exit = if rng.gen_bool(0.5) { first } else { path[1] };
    d.add_arc(exit, *outside.choose(rng).unwrap()).unwrap();
    d.add_arc(last, *outside.choose(rng).unwrap()).unwrap();
    let others: Vec<Vertex> = std::iter::once(root)
        .chain(outside.iter().copied())
        .collect();
    for &a in &others {
        for &b in &others {
            if a != b && !d.has_arc(a, b) && rng.gen_bool(p) {
                d.add_arc(a, b).unwrap();
            }
        }
        if a != root && !d.has_arc(a, first) && rng.gen_bool(p / 2.0) {
            d.add_arc(a, first).unwrap();
        }
    }
    if rng.gen_bool(0.1) {
        // a side arc that usually spoils the match
        let inner = path[rng.gen_range(2..len - 2)];
        let o = *others.choose(rng).unwrap();
        if rng.gen_bool(0.5) {
            d.add_arc(o, inner).unwrap();
        } else {
            d.add_arc(inner, o).unwrap();
        }
    }
    make_reachable(&mut d, root, rng);
    (d, root)
}

/// Deliberately unsound rule variants used to show the battery detects
/// broken rules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Mutation {
    #[default]
    None,
    /// Rule 4 also accepts separators containing the arc's tail.
    Rule4TargetInSeparator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub instance: String,
    pub rule: RuleId,
    pub variant: Variant,
    pub before: Option<usize>,
    pub after: Option<usize>,
    pub event: RuleEvent,
    /// The offending instance in the text format.
    pub digraph: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SafenessReport {
    pub instances: usize,
    pub applications: BTreeMap<RuleId, usize>,
    pub violations: Vec<Violation>,
}

impl SafenessReport {
    /// Associative, commutative up to violation order.
    pub fn merge(mut self, other: SafenessReport) -> SafenessReport {
        self.instances += other.instances;
        for (rule, n) in other.applications {
            *self.applications.entry(rule).or_default() += n;
        }
        self.violations.extend(other.violations);
        self
    }

    pub fn applications_of(&self, rule: RuleId) -> usize {
        self.applications.get(&rule).copied().unwrap_or(0)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, rule: RuleId) {
        *self.applications.entry(rule).or_default() += 1;
    }
}

impl fmt::Display for SafenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances {}", self.instances)?;
        for rule in RuleId::ALL {
            writeln!(f, "{rule} applications {}", self.applications_of(rule))?;
        }
        for v in &self.violations {
            writeln!(
                f,
                "VIOLATION {} {} {:?}: before {:?} after {:?} ({})",
                v.instance, v.rule, v.variant, v.before, v.after, v.event
            )?;
        }
        write!(f, "violations {}", self.violations.len())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SafenessConfig {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    pub mutation: Mutation,
    pub solver: Solver,
}

impl SafenessConfig {
    pub fn new(trials: usize, max_n: usize, seed: u64) -> Self {
        Self {
            trials,
            max_n,
            seed,
            mutation: Mutation::None,
            solver: Solver::default(),
        }
    }
}

/// Random trials plus the fixture corpus (hand-built rule examples and one
/// two-directional path fixture per 20 trials). With zero trials the report
/// is empty.
pub fn verify_rule_safeness(trials: usize, max_n: usize, seed: u64) -> SafenessReport {
    verify(&SafenessConfig::new(trials, max_n, seed))
}

pub fn verify(config: &SafenessConfig) -> SafenessReport {
    if config.trials == 0 {
        return SafenessReport::default();
    }
    let random = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let spec = random_trial_spec(config, i);
            let (d, root) = generate(&spec);
            check_instance(&format!("trial-{i}"), &d, root, config)
        })
        .collect::<Vec<_>>();
    let fixtures = fixture_corpus(config.seed, config.trials.div_ceil(20))
        .into_par_iter()
        .map(|(name, d, root)| check_instance(&name, &d, root, config))
        .collect::<Vec<_>>();
    random
        .into_iter()
        .chain(fixtures)
        .fold(SafenessReport::default(), SafenessReport::merge)
}

/// The fixture corpus alone.
pub fn verify_fixtures(seed: u64, bidir_count: usize, mutation: Mutation) -> SafenessReport {
    let config = SafenessConfig {
        mutation,
        ..SafenessConfig::new(1, 0, seed)
    };
    fixture_corpus(seed, bidir_count)
        .into_par_iter()
        .map(|(name, d, root)| check_instance(&name, &d, root, &config))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(SafenessReport::default(), SafenessReport::merge)
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn random_trial_spec(config: &SafenessConfig, i: usize) -> GenSpec {
    let s = trial_seed(config.seed, i);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let n = rng.gen_range(1..=config.max_n.max(1));
    let p = [0.15, 0.25, 0.35, 0.5][rng.gen_range(0..4)];
    let structure = if rng.gen_bool(0.3) {
        Structure::Random
    } else {
        Structure::RandomReachable
    };
    GenSpec::new(n, p, rng.gen(), structure)
}

/// Named instances on which each rule is known to fire, plus randomized
/// two-directional path fixtures.
pub fn fixture_corpus(seed: u64, bidir_count: usize) -> Vec<(String, Digraph, Vertex)> {
    let hand: [(&str, &[(Vertex, Vertex)]); 8] = [
        ("rule1-stray", &[(1, 2), (3, 2)]),
        ("rule2-dominated", &[(1, 2), (2, 3), (3, 2)]),
        ("rule2-into-root", &[(1, 2), (2, 1)]),
        ("rule3-chain", &[(1, 2), (2, 3), (3, 4)]),
        ("rule4-single", &[(1, 2), (2, 3), (2, 4), (3, 4)]),
        (
            "rule4-pair",
            &[(1, 2), (1, 3), (2, 4), (3, 4), (2, 5), (3, 5), (4, 5)],
        ),
        (
            "rule5-bidir7",
            &[
                (2, 3),
                (3, 2),
                (3, 4),
                (4, 3),
                (4, 5),
                (5, 4),
                (5, 6),
                (6, 5),
                (6, 7),
                (7, 6),
                (7, 8),
                (8, 7),
                (1, 2),
                (1, 8),
                (2, 9),
                (8, 9),
            ],
        ),
        (
            "rule5-bidir8-root-start",
            &[
                (1, 2),
                (2, 1),
                (2, 3),
                (3, 2),
                (3, 4),
                (4, 3),
                (4, 5),
                (5, 4),
                (5, 6),
                (6, 5),
                (6, 7),
                (7, 6),
                (7, 8),
                (8, 7),
                (8, 9),
                (1, 9),
            ],
        ),
    ];
    let mut corpus: Vec<(String, Digraph, Vertex)> = hand
        .iter()
        .map(|(name, arcs)| {
            let d = Digraph::from_arcs(arcs.iter().copied()).expect("fixture is simple");
            (name.to_string(), d, 1)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB1D1);
    for i in 0..bidir_count {
        let spec = GenSpec::new(
            rng.gen_range(9..=12),
            [0.1, 0.2, 0.3][rng.gen_range(0..3)],
            rng.gen(),
            Structure::BidirPath,
        );
        let (d, root) = generate(&spec);
        corpus.push((format!("bidir-{i}"), d, root));
    }
    corpus
}

type Detector<'a> = dyn Fn(&RootedInstance) -> Option<(Digraph, RuleEvent)> + 'a;

struct Checker<'a> {
    name: &'a str,
    solver: Solver,
    report: SafenessReport,
}

impl Checker<'_> {
    fn value(&self, d: &Digraph, r: Vertex, variant: Variant) -> Option<usize> {
        self.solver
            .max_leaf(d, r, variant)
            .expect("harness instances fit the solver bound")
    }

    fn compare(&mut self, before: &Digraph, after: &Digraph, r: Vertex, event: &RuleEvent) {
        self.report.record(event.rule());
        for variant in [Variant::Branching, Variant::Tree] {
            let b = self.value(before, r, variant);
            let a = self.value(after, r, variant);
            if a != b {
                self.report.violations.push(Violation {
                    instance: self.name.to_string(),
                    rule: event.rule(),
                    variant,
                    before: b,
                    after: a,
                    event: event.clone(),
                    digraph: format::serialize(before, Some(r), None),
                });
            }
        }
    }
}

/// Runs every rule once on the instance, then walks the fixpoint trace,
/// checking each application.
pub fn check_instance(
    name: &str,
    d: &Digraph,
    root: Vertex,
    config: &SafenessConfig,
) -> SafenessReport {
    let mut ck = Checker {
        name,
        solver: config.solver,
        report: SafenessReport {
            instances: 1,
            ..Default::default()
        },
    };
    let branching = RootedInstance::new(d.clone(), root, 1, Variant::Branching).unwrap();
    let tree = RootedInstance::new(d.clone(), root, 1, Variant::Tree).unwrap();

    // rule 1 in both variants
    let reachable = match (apply_rule1(&branching), apply_rule1(&tree)) {
        (Rule1Outcome::NoVerdict(unreachable), Rule1Outcome::RemovedVertices(reduced, _)) => {
            let event = RuleEvent::Reachability { unreachable };
            ck.report.record(RuleId::Reachability);
            let b = ck.value(d, root, Variant::Branching);
            if b.is_some() {
                ck.report.violations.push(Violation {
                    instance: name.to_string(),
                    rule: RuleId::Reachability,
                    variant: Variant::Branching,
                    before: b,
                    after: None,
                    event: event.clone(),
                    digraph: format::serialize(d, Some(root), None),
                });
            }
            let b = ck.value(d, root, Variant::Tree);
            let a = ck.value(&reduced, root, Variant::Tree);
            if a != b {
                ck.report.violations.push(Violation {
                    instance: name.to_string(),
                    rule: RuleId::Reachability,
                    variant: Variant::Tree,
                    before: b,
                    after: a,
                    event,
                    digraph: format::serialize(d, Some(root), None),
                });
            }
            reduced
        }
        _ => d.clone(),
    };

    // rules 2-5 individually, on the reachable part
    let inst = RootedInstance::new(reachable.clone(), root, 1, Variant::Tree).unwrap();
    let rule4 = |i: &RootedInstance| {
        find_avoidable_arc(i, config.mutation == Mutation::Rule4TargetInSeparator)
    };
    let detectors: [&Detector<'_>; 4] = [&apply_rule2, &apply_rule3, &rule4, &apply_rule5];
    for detect in detectors {
        if let Some((after, event)) = detect(&inst) {
            ck.compare(&reachable, &after, root, &event);
        }
    }

    // every step of the fixpoint run
    let (_, trace) = reduce_to_fixpoint(&inst);
    let steps = trace.replay_steps(&reachable).expect("trace replays");
    for (pair, event) in steps.windows(2).zip(&trace.events) {
        ck.compare(&pair[0], &pair[1], root, event);
    }
    ck.report
}
