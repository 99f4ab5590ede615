//! Runs a protocol on a fresh network and measures it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lptype::{Basis, ElementId, FValue, LpType};
use crate::problems::HittingSetProblem;
use crate::sim::{Protocol, SimRun, TraceEntry};

use super::highload::{HighLoad, HighLoadNode};
use super::hitting::HittingStep;
use super::lowload::{LowLoad, LpStep, SamplingNode};
use super::{
    hitting_sample_size, keep_probability, lowload_sample_size, ConfigError, Item, NodeView, ProtocolConfig,
    ProtocolError, ProtocolKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop after the first round in which some node holds the solution.
    FirstSolution,
    /// Stop once every node has produced an output.
    Termination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub stop: StopRule,
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            stop: StopRule::FirstSolution,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub kind: ProtocolKind,
    pub n: usize,
    pub elements: usize,
    pub stop: StopRule,
    /// Rounds executed.
    pub rounds: u64,
    /// Round in which some node first held the solution.
    pub rounds_to_solution: Option<u64>,
    /// Per round, the largest work of any node.
    pub max_work: Vec<u32>,
    /// Per round, `|H(V)|` after the round.
    pub global_multiset: Vec<u64>,
    /// Per round, the total number of originals after the round.
    pub global_originals: Vec<u64>,
    pub total_messages: u64,
    /// Per node, the value it output, if any.
    pub outputs: Vec<Option<FValue>>,
    /// First-solution runs: a solution was found. Termination runs: every
    /// node output a correct value.
    pub correct: bool,
    /// Hitting runs: the reported hitting set, with multiplicity.
    pub hitting_set: Option<Vec<ElementId>>,
    pub sampling_attempts: u64,
    pub sampling_failures: u64,
    /// Round by which every node had left the pull phase.
    pub pull_phase_done: Option<u64>,
    pub trace: Option<Vec<TraceEntry>>,
}

impl RunReport {
    pub fn max_work_overall(&self) -> u32 {
        self.max_work.iter().copied().max().unwrap_or(0)
    }

    pub fn max_global_multiset(&self) -> u64 {
        self.global_multiset.iter().copied().max().unwrap_or(0)
    }

    /// Largest ratio `|H(V)| / |H₀|` over all rounds.
    pub fn max_blowup(&self) -> f64 {
        self.global_multiset
            .iter()
            .zip(&self.global_originals)
            .map(|(&m, &o)| m as f64 / o.max(1) as f64)
            .fold(0.0, f64::max)
    }

    pub fn wrong_outputs(&self, target: &FValue) -> usize {
        self.outputs.iter().flatten().filter(|v| *v != target).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("protocol {0:?} does not apply to this problem")]
    WrongProblem(ProtocolKind),
    #[error("the instance has no elements")]
    EmptyInstance,
    #[error("no nodes")]
    NoNodes,
    #[error("round cap of {cap} exceeded")]
    RoundCapExceeded { cap: u64, report: Box<RunReport> },
    #[error("element {element} lost from all originals in round {round}")]
    SafetyViolated { round: u64, element: ElementId },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Mixes a run seed with a purpose tag (splitmix64 finalizer).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const PLACEMENT_SALT: u64 = 1;
const SIM_SALT: u64 = 2;

/// Assigns each element to a uniformly random node, with fresh copy tags.
pub fn distribute(elements: usize, n: usize, seed: u64) -> Vec<Vec<Item>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, PLACEMENT_SALT));
    let mut nodes = vec![Vec::new(); n];
    for e in 0..elements {
        let v = rng.gen_range(0..n);
        nodes[v].push(Item {
            id: ElementId(e as u32),
            tag: rng.gen(),
        });
    }
    nodes
}

/// Runs one of the LP protocols on `n` nodes. `target` is `f(H)`, used by
/// the first-solution probe and by the output check.
pub fn run_lp<P: LpType + ?Sized>(
    problem: &P,
    target: &FValue,
    cfg: &ProtocolConfig,
    n: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let elements = problem.num_elements();
    if elements == 0 {
        return Err(RunError::EmptyInstance);
    }
    if n == 0 {
        return Err(RunError::NoNodes);
    }
    let placement = distribute(elements, n, seed);
    let sim_seed = derive_seed(seed, SIM_SALT);
    let check = |b: &Basis| b.fvalue() == target;
    match cfg.kind {
        ProtocolKind::LowLoad | ProtocolKind::LowLoadExtended => {
            let extended = cfg.kind == ProtocolKind::LowLoadExtended;
            let protocol = LowLoad {
                step: LpStep {
                    problem,
                    target: Some(target.clone()),
                },
                pulls: cfg.sample_pulls(lowload_sample_size(problem.dim()), n),
                window: cfg.maturity_window(n),
                keep: keep_probability(problem.dim()),
            };
            let nodes = placement
                .into_iter()
                .map(|items| {
                    let pull = extended && items.is_empty();
                    SamplingNode::new(items, pull)
                })
                .collect();
            drive_with(&mut SimRun::new(protocol, nodes, sim_seed), cfg, elements, opts, check, false, |_, _| {})
        }
        ProtocolKind::HighLoad => {
            let log_n = cfg.log_n(n);
            let protocol = HighLoad {
                problem,
                target: Some(target.clone()),
                accel: cfg.accel,
                basis_cap: HighLoad::<P>::cap_for(elements, n, log_n),
                window: cfg.maturity_window(n),
            };
            let nodes = placement
                .into_iter()
                .map(|items| HighLoadNode::new(items.into_iter().map(|it| it.id).collect()))
                .collect();
            let mut sim = SimRun::new(protocol, nodes, sim_seed);
            let hook = move |sim: &mut SimRun<HighLoad<'_, P>>, m: u64| {
                sim.protocol_mut().basis_cap = HighLoad::<P>::cap_for(m as usize, n, log_n);
            };
            drive_with(&mut sim, cfg, elements, opts, check, false, hook)
        }
        ProtocolKind::Hitting => Err(RunError::WrongProblem(cfg.kind)),
    }
}

/// Runs the hitting protocol with one node per ground element, or `n`
/// nodes when given.
pub fn run_hitting(
    problem: &HittingSetProblem,
    cfg: &ProtocolConfig,
    n: Option<usize>,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunReport, RunError> {
    cfg.validate()?;
    if cfg.kind != ProtocolKind::Hitting {
        return Err(RunError::WrongProblem(cfg.kind));
    }
    let sys = problem.system();
    let elements = sys.universe_size();
    if elements == 0 {
        return Err(RunError::EmptyInstance);
    }
    let n = n.unwrap_or(elements);
    if n == 0 {
        return Err(RunError::NoNodes);
    }
    let r = hitting_sample_size(cfg.d, sys.num_sets());
    let protocol = LowLoad {
        step: HittingStep {
            problem,
            d: cfg.d,
            r,
            push_cap: cfg.c_push as usize * cfg.d * cfg.log_n(n) as usize,
        },
        pulls: cfg.sample_pulls(r, n),
        window: cfg.maturity_window(n),
        keep: keep_probability(cfg.d),
    };
    let nodes = distribute(elements, n, seed)
        .into_iter()
        .map(|items| SamplingNode::new(items, false))
        .collect();
    let check = |b: &Basis| {
        let u: Vec<usize> = b.elements().iter().map(|id| id.index()).collect();
        sys.is_hitting_set(&u)
    };
    let mut sim = SimRun::new(protocol, nodes, derive_seed(seed, SIM_SALT));
    drive_with(&mut sim, cfg, elements, opts, check, true, |_, _| {})
}

/// Steps `sim` until the stop rule fires. `after_round` sees the global
/// multiset size after every round.
fn drive_with<Pr>(
    sim: &mut SimRun<Pr>,
    cfg: &ProtocolConfig,
    elements: usize,
    opts: &RunOptions,
    check: impl Fn(&Basis) -> bool,
    hitting: bool,
    mut after_round: impl FnMut(&mut SimRun<Pr>, u64),
) -> Result<RunReport, RunError>
where
    Pr: Protocol<Error = ProtocolError>,
    Pr::Node: NodeView + HittingView,
{
    let n = sim.n();
    if opts.trace {
        sim.enable_trace();
    }
    let cap = cfg.round_cap(n);
    let mut report = RunReport {
        kind: cfg.kind,
        n,
        elements,
        stop: opts.stop,
        rounds: 0,
        rounds_to_solution: None,
        max_work: Vec::new(),
        global_multiset: Vec::new(),
        global_originals: Vec::new(),
        total_messages: 0,
        outputs: vec![None; n],
        correct: false,
        hitting_set: None,
        sampling_attempts: 0,
        sampling_failures: 0,
        pull_phase_done: None,
        trace: None,
    };
    let mut present = vec![false; elements];

    loop {
        if sim.round() >= cap {
            finish(sim, &mut report, &check, hitting);
            return Err(RunError::RoundCapExceeded {
                cap,
                report: Box::new(report),
            });
        }
        let stats = sim.step()?;
        report.rounds = sim.round();
        report.max_work.push(stats.max_work());

        present.iter_mut().for_each(|p| *p = false);
        let (mut local, mut originals) = (0u64, 0u64);
        let mut pulling = false;
        for node in sim.nodes() {
            local += node.local_size() as u64;
            originals += node.original_count() as u64;
            pulling |= node.in_pull_phase();
            for id in node.originals() {
                present[id.index()] = true;
            }
        }
        report.global_multiset.push(local);
        after_round(sim, local);
        report.global_originals.push(originals);
        if let Some(lost) = present.iter().position(|p| !p) {
            return Err(RunError::SafetyViolated {
                round: stats.round,
                element: ElementId(lost as u32),
            });
        }
        if !pulling && report.pull_phase_done.is_none() {
            report.pull_phase_done = Some(stats.round);
        }

        let done = match opts.stop {
            StopRule::FirstSolution => sim.nodes().iter().any(|v| v.solved_round().is_some()),
            StopRule::Termination => sim.nodes().iter().all(|v| v.output().is_some()),
        };
        if done {
            finish(sim, &mut report, &check, hitting);
            return Ok(report);
        }
    }
}

fn finish<Pr>(sim: &SimRun<Pr>, report: &mut RunReport, check: &impl Fn(&Basis) -> bool, hitting: bool)
where
    Pr: Protocol,
    Pr::Node: NodeView + HittingView,
{
    let nodes = sim.nodes();
    report.total_messages = sim.sent_total();
    report.rounds_to_solution = nodes.iter().filter_map(|v| v.solved_round()).min();
    report.outputs = nodes.iter().map(|v| v.output().map(|r| r.basis.fvalue().clone())).collect();
    for v in nodes {
        let (a, f) = v.sampling_stats();
        report.sampling_attempts += a;
        report.sampling_failures += f;
    }
    report.correct = match report.stop {
        StopRule::FirstSolution => report.rounds_to_solution.is_some(),
        StopRule::Termination => nodes.iter().all(|v| v.output().is_some_and(|r| check(&r.basis))),
    };
    if hitting {
        let from_output = nodes.iter().find_map(|v| v.output()).map(|r| r.basis.elements().to_vec());
        let from_probe = nodes
            .iter()
            .filter(|v| v.solved_round().is_some())
            .min_by_key(|v| v.solved_round())
            .and_then(|v| v.solution())
            .map(|b| b.elements().to_vec());
        report.hitting_set = match report.stop {
            StopRule::Termination => from_output.or(from_probe),
            StopRule::FirstSolution => from_probe.or(from_output),
        };
    }
    report.trace = sim.trace().map(<[TraceEntry]>::to_vec);
}

/// Access to a node's first solving sample, where the protocol keeps one.
pub trait HittingView {
    fn solution(&self) -> Option<&std::sync::Arc<Basis>> {
        None
    }
}

impl HittingView for SamplingNode {
    fn solution(&self) -> Option<&std::sync::Arc<Basis>> {
        SamplingNode::solution(self)
    }
}

impl HittingView for HighLoadNode {}
