//! Sampling rounds with violator spreading and filtering.
//!
//! Each round a node forms a sample `R` from the pull replies of the
//! previous round, pushes the local elements that `R` fails to explain,
//! asks for the next sample, ingests deliveries and thins out its
//! non-original copies. What "fails to explain" means is supplied by a
//! [`SampleStep`]: LP-type violation here, an unhit set in
//! [`super::hitting`].

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lptype::{support_of, Basis, ElementId, FValue, LpType};
use crate::sim::{pick_index, EnvelopeKind, Inbox, Protocol, RoundCtx};

use super::{select_sample, termination::TerminationTable, Item, NodeView, ProtocolError, TerminationRecord};

#[derive(Clone, Debug)]
pub enum Msg {
    Element(ElementId),
    /// Element that the recipient stores as an original.
    Rooted(ElementId),
    Termination(TerminationRecord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    /// A random original of the target (pull phase).
    Original,
    /// A random local copy of the target (sampling).
    Sample,
}

/// Result of processing one successful sample.
#[derive(Debug, Default)]
pub struct StepOutcome {
    /// Elements to push, one push each.
    pub push: Vec<ElementId>,
    /// Candidate to inject into termination detection.
    pub inject: Option<Arc<Basis>>,
    /// Harness probe: whether this sample already solves the instance.
    pub solved: bool,
}

pub trait SampleStep {
    fn sample_size(&self) -> usize;
    /// Element capacity of a basis message.
    fn dim(&self) -> usize;
    fn iterate(&self, sample: &[ElementId], local: &[ElementId], rng: &mut ChaCha8Rng) -> Result<StepOutcome, ProtocolError>;
    /// Whether local data shows that a gossiped candidate is not optimal.
    fn invalidates(&self, basis: &Basis, local_support: &[ElementId]) -> Result<bool, ProtocolError>;
}

/// The LP-type round: violators of the sample's optimal basis.
pub struct LpStep<'a, P: ?Sized> {
    pub problem: &'a P,
    /// `f(H)`, only used by the harness probe.
    pub target: Option<FValue>,
}

impl<P: LpType + ?Sized> SampleStep for LpStep<'_, P> {
    fn sample_size(&self) -> usize {
        super::lowload_sample_size(self.problem.dim())
    }

    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn iterate(&self, sample: &[ElementId], local: &[ElementId], _rng: &mut ChaCha8Rng) -> Result<StepOutcome, ProtocolError> {
        let basis = self.problem.optimal_basis(&support_of(sample))?;
        let support = support_of(local);
        let mask = self.problem.violation_mask(&basis, &support)?;
        let violators: Vec<ElementId> = support.iter().zip(mask).filter(|(_, v)| *v).map(|(&id, _)| id).collect();
        let push: Vec<ElementId> = local
            .iter()
            .copied()
            .filter(|id| violators.binary_search(id).is_ok())
            .collect();
        let solved = self.target.as_ref() == Some(basis.fvalue());
        let inject = push.is_empty().then(|| Arc::new(basis));
        Ok(StepOutcome { push, inject, solved })
    }

    fn invalidates(&self, basis: &Basis, local_support: &[ElementId]) -> Result<bool, ProtocolError> {
        Ok(self.problem.any_violator(basis, local_support)?)
    }
}

/// Node state shared by the low-load and hitting protocols.
#[derive(Clone, Debug, Default)]
pub struct SamplingNode {
    originals: Vec<Item>,
    copies: Vec<Item>,
    pull_active: bool,
    awaiting_sample: bool,
    table: TerminationTable,
    output: Option<TerminationRecord>,
    solved_round: Option<u64>,
    solution: Option<Arc<Basis>>,
    attempts: u64,
    failures: u64,
    pull_phase_end: Option<u64>,
}

impl SamplingNode {
    /// `pull_phase` starts the node in the pull phase; callers pass
    /// `originals.is_empty()` for the extended variant.
    pub fn new(originals: Vec<Item>, pull_phase: bool) -> Self {
        Self {
            originals,
            pull_active: pull_phase,
            ..Default::default()
        }
    }

    pub fn copies(&self) -> usize {
        self.copies.len()
    }

    pub fn table(&self) -> &TerminationTable {
        &self.table
    }

    /// First sample that solved the instance at this node.
    pub fn solution(&self) -> Option<&Arc<Basis>> {
        self.solution.as_ref()
    }

    /// Round in which this node left the pull phase.
    pub fn pull_phase_end(&self) -> Option<u64> {
        self.pull_phase_end
    }

    fn local_ids(&self) -> Vec<ElementId> {
        self.originals.iter().chain(&self.copies).map(|it| it.id).collect()
    }
}

impl NodeView for SamplingNode {
    fn originals(&self) -> Box<dyn Iterator<Item = ElementId> + '_> {
        Box::new(self.originals.iter().map(|it| it.id))
    }

    fn original_count(&self) -> usize {
        self.originals.len()
    }

    fn local_size(&self) -> usize {
        self.originals.len() + self.copies.len()
    }

    fn solved_round(&self) -> Option<u64> {
        self.solved_round
    }

    fn output(&self) -> Option<&TerminationRecord> {
        self.output.as_ref()
    }

    fn in_pull_phase(&self) -> bool {
        self.pull_active
    }

    fn sampling_stats(&self) -> (u64, u64) {
        (self.attempts, self.failures)
    }
}

pub struct LowLoad<S> {
    pub step: S,
    pub pulls: usize,
    pub window: u64,
    pub keep: f64,
}

impl<S: SampleStep> LowLoad<S> {
    fn ingest(node: &mut SamplingNode, messages: Vec<Msg>, ctx: &mut RoundCtx<'_, Msg, Query>, only_rooted: bool) {
        for msg in messages {
            match msg {
                Msg::Rooted(id) => node.originals.push(Item { id, tag: ctx.rng().gen() }),
                Msg::Element(id) if !only_rooted => node.copies.push(Item { id, tag: ctx.rng().gen() }),
                _ => {}
            }
        }
    }
}

impl<S: SampleStep> Protocol for LowLoad<S> {
    type Node = SamplingNode;
    type Msg = Msg;
    type Query = Query;
    type Reply = Item;
    type Error = ProtocolError;

    fn on_round(
        &self,
        node: &mut SamplingNode,
        inbox: Inbox<Msg, Query, Item>,
        ctx: &mut RoundCtx<'_, Msg, Query>,
    ) -> Result<(), ProtocolError> {
        let now = ctx.round();
        let mut messages = Vec::with_capacity(inbox.messages.len());
        for msg in inbox.messages {
            match msg {
                Msg::Termination(rec) if node.output.is_none() => node.table.merge(rec),
                Msg::Termination(_) => {}
                other => messages.push(other),
            }
        }
        if node.output.is_some() {
            // a stopped node stays passive but keeps the originals it is handed
            Self::ingest(node, messages, ctx, true);
            return Ok(());
        }

        let local = node.local_ids();
        let local_support = support_of(&local);
        let (out, live) = node
            .table
            .sweep(now, self.window, |b| self.step.invalidates(b, &local_support))?;
        if let Some(rec) = out {
            node.output = Some(rec);
            Self::ingest(node, messages, ctx, true);
            return Ok(());
        }
        for rec in live {
            ctx.push(Msg::Termination(rec));
        }

        let mut original = None;
        let mut replies = Vec::new();
        for (query, reply) in inbox.replies {
            match (query, reply) {
                (Query::Original, Some(item)) => {
                    original.get_or_insert(item.id);
                }
                (Query::Sample, Some(item)) => replies.push(item),
                (_, None) => {}
            }
        }

        if node.pull_active {
            match original {
                Some(h) => {
                    ctx.push(Msg::Rooted(h));
                    node.pull_active = false;
                    node.pull_phase_end = Some(now);
                    for _ in 0..self.pulls {
                        ctx.pull(Query::Sample);
                    }
                    node.awaiting_sample = true;
                }
                None => ctx.pull(Query::Original),
            }
        } else {
            if node.awaiting_sample {
                node.attempts += 1;
                match select_sample(&replies, self.step.sample_size(), ctx.rng()) {
                    None => node.failures += 1,
                    Some(sample) => {
                        let outcome = self.step.iterate(&sample, &local, ctx.rng())?;
                        for id in outcome.push {
                            ctx.push(Msg::Element(id));
                        }
                        if let Some(basis) = outcome.inject.clone() {
                            let rec = TerminationRecord { t: now, basis, valid: true };
                            node.table.merge(rec.clone());
                            ctx.push(Msg::Termination(rec));
                        }
                        if outcome.solved && node.solved_round.is_none() {
                            node.solved_round = Some(now);
                            node.solution = outcome.inject;
                        }
                    }
                }
            }
            for _ in 0..self.pulls {
                ctx.pull(Query::Sample);
            }
            node.awaiting_sample = true;
        }

        Self::ingest(node, messages, ctx, false);
        let keep = self.keep;
        let rng = ctx.rng();
        node.copies.retain(|_| rng.gen_bool(keep));
        Ok(())
    }

    fn on_pull(&self, node: &SamplingNode, query: Query, selector: u64) -> Option<Item> {
        match query {
            Query::Original => {
                let n = node.originals.len();
                (n > 0).then(|| node.originals[pick_index(selector, n)])
            }
            Query::Sample => {
                let n = node.local_size();
                (n > 0).then(|| {
                    let i = pick_index(selector, n);
                    node.originals.get(i).copied().unwrap_or_else(|| node.copies[i - node.originals.len()])
                })
            }
        }
    }

    fn describe(&self, msg: &Msg) -> (EnvelopeKind, u32) {
        match msg {
            Msg::Element(_) => (EnvelopeKind::ElementPush, 1),
            Msg::Rooted(_) => (EnvelopeKind::RootedElementPush, 1),
            Msg::Termination(rec) => (
                EnvelopeKind::TerminationPush,
                (self.step.dim().max(rec.basis.len()) + 2) as u32,
            ),
        }
    }
}
