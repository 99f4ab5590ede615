//! Synchronous uniform gossip rounds.
//!
//! Every node runs its handler once per round. A handler may push messages
//! and issue pulls; targets are drawn uniformly from all `n` nodes (itself
//! included) by the engine, so handlers never see node indices. Everything
//! sent in round `t` arrives at the start of round `t + 1`: pushes land in
//! the target's inbox, and pulls are answered from the target's state at
//! that moment, before any handler of round `t + 1` runs.

use std::fmt;
use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

mod rng;

pub use rng::node_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvelopeKind {
    ElementPush,
    RootedElementPush,
    BasisPush,
    TerminationPush,
    PullRequest,
    PullReply,
}

impl EnvelopeKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::ElementPush => "element",
            EnvelopeKind::RootedElementPush => "rooted",
            EnvelopeKind::BasisPush => "basis",
            EnvelopeKind::TerminationPush => "termination",
            EnvelopeKind::PullRequest => "pull-request",
            EnvelopeKind::PullReply => "pull-reply",
        }
    }
}

impl fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps a pre-drawn selector onto `0..len` (multiply-shift); `len > 0`.
pub fn pick_index(selector: u64, len: usize) -> usize {
    ((selector as u128 * len as u128) >> 64) as usize
}

/// Node behaviour run by [`SimRun`].
pub trait Protocol {
    type Node;
    type Msg;
    type Query: Copy;
    type Reply;
    type Error;

    fn on_round(
        &self,
        node: &mut Self::Node,
        inbox: Inbox<Self::Msg, Self::Query, Self::Reply>,
        ctx: &mut RoundCtx<'_, Self::Msg, Self::Query>,
    ) -> Result<(), Self::Error>;

    /// Answer to a pull; `None` is the empty reply. `selector` is uniform
    /// and drawn by the requester, for picking a random local item.
    fn on_pull(&self, node: &Self::Node, query: Self::Query, selector: u64) -> Option<Self::Reply>;

    /// Envelope kind and size in units of a pushed message.
    fn describe(&self, msg: &Self::Msg) -> (EnvelopeKind, u32);
}

/// Everything delivered to one node at the start of a round.
#[derive(Debug)]
pub struct Inbox<M, Q, R> {
    pub messages: Vec<M>,
    /// Answers to the pulls this node issued last round, in issue order.
    pub replies: Vec<(Q, Option<R>)>,
}

impl<M, Q, R> Default for Inbox<M, Q, R> {
    fn default() -> Self {
        Self {
            messages: Vec::new(),
            replies: Vec::new(),
        }
    }
}

/// Per-node handle for one round: the node's random stream and its outbox.
pub struct RoundCtx<'a, M, Q> {
    round: u64,
    n: usize,
    rng: &'a mut ChaCha8Rng,
    pushes: Vec<(usize, M)>,
    pulls: Vec<(usize, Q, u64)>,
}

impl<'a, M, Q> RoundCtx<'a, M, Q> {
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }

    /// Sends `msg` to a uniformly random node.
    pub fn push(&mut self, msg: M) {
        let target = self.rng.gen_range(0..self.n);
        self.pushes.push((target, msg));
    }

    /// Asks a uniformly random node; the reply arrives next round.
    pub fn pull(&mut self, query: Q) {
        let target = self.rng.gen_range(0..self.n);
        let selector = self.rng.gen();
        self.pulls.push((target, query, selector));
    }

    /// Operations issued so far this round.
    pub fn work(&self) -> usize {
        self.pushes.len() + self.pulls.len()
    }
}

/// Counters for one completed round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundStats {
    pub round: u64,
    /// Per node, pushes plus pulls issued.
    pub work: Vec<u32>,
    /// Envelopes delivered at the start of this round.
    pub delivered: u64,
    /// Envelopes sent during this round (pushes, pull requests, and the
    /// replies those pulls will produce).
    pub sent: u64,
    pub sent_units: u64,
}

impl RoundStats {
    pub fn max_work(&self) -> u32 {
        self.work.iter().copied().max().unwrap_or(0)
    }
}

/// One delivered envelope, for trace dumps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: u64,
    pub kind: EnvelopeKind,
    pub size_units: u32,
}

pub fn write_trace<W: Write>(out: &mut W, entries: &[TraceEntry]) -> io::Result<()> {
    for e in entries {
        writeln!(out, "{} {} {}", e.round, e.kind, e.size_units)?;
    }
    Ok(())
}

struct PendingPull<Q> {
    requester: usize,
    target: usize,
    query: Q,
    selector: u64,
}

struct Pushed<M> {
    target: usize,
    msg: M,
    kind: EnvelopeKind,
    units: u32,
}

pub struct SimRun<P: Protocol> {
    protocol: P,
    nodes: Vec<P::Node>,
    seed: u64,
    round: u64,
    pushes: Vec<Pushed<P::Msg>>,
    pulls: Vec<PendingPull<P::Query>>,
    sent_total: u64,
    delivered_total: u64,
    trace: Option<Vec<TraceEntry>>,
}

impl<P: Protocol> SimRun<P> {
    /// `nodes` must be nonempty.
    pub fn new(protocol: P, nodes: Vec<P::Node>, seed: u64) -> Self {
        assert!(!nodes.is_empty(), "a gossip network needs at least one node");
        Self {
            protocol,
            nodes,
            seed,
            round: 0,
            pushes: Vec::new(),
            pulls: Vec::new(),
            sent_total: 0,
            delivered_total: 0,
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.enable_trace();
        self
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Index of the next round to run.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn protocol(&self) -> &P {
        &self.protocol
    }

    /// Harness-side adjustment of protocol parameters between rounds.
    pub fn protocol_mut(&mut self) -> &mut P {
        &mut self.protocol
    }

    /// Read access for harness-side measurement; not available to handlers.
    pub fn nodes(&self) -> &[P::Node] {
        &self.nodes
    }

    pub fn sent_total(&self) -> u64 {
        self.sent_total
    }

    pub fn delivered_total(&self) -> u64 {
        self.delivered_total
    }

    /// Envelopes sent but not yet delivered.
    pub fn in_flight(&self) -> u64 {
        self.pushes.len() as u64 + 2 * self.pulls.len() as u64
    }

    pub fn trace(&self) -> Option<&[TraceEntry]> {
        self.trace.as_deref()
    }

    /// Delivers last round's traffic, runs every handler once, and buffers
    /// the new traffic for the next round.
    pub fn step(&mut self) -> Result<RoundStats, P::Error> {
        let n = self.nodes.len();
        let round = self.round;
        let mut inboxes: Vec<Inbox<P::Msg, P::Query, P::Reply>> = (0..n).map(|_| Inbox::default()).collect();
        let mut delivered = 0u64;

        for pull in std::mem::take(&mut self.pulls) {
            let reply = self.protocol.on_pull(&self.nodes[pull.target], pull.query, pull.selector);
            inboxes[pull.requester].replies.push((pull.query, reply));
            delivered += 2;
            if let Some(trace) = &mut self.trace {
                trace.push(TraceEntry { round, kind: EnvelopeKind::PullRequest, size_units: 1 });
                trace.push(TraceEntry { round, kind: EnvelopeKind::PullReply, size_units: 1 });
            }
        }
        for p in std::mem::take(&mut self.pushes) {
            if let Some(trace) = &mut self.trace {
                trace.push(TraceEntry { round, kind: p.kind, size_units: p.units });
            }
            inboxes[p.target].messages.push(p.msg);
            delivered += 1;
        }
        self.delivered_total += delivered;

        let mut stats = RoundStats {
            round,
            work: Vec::with_capacity(n),
            delivered,
            sent: 0,
            sent_units: 0,
        };
        for (i, inbox) in inboxes.into_iter().enumerate() {
            let mut rng = node_rng(self.seed, i as u64, round);
            let mut ctx = RoundCtx {
                round,
                n,
                rng: &mut rng,
                pushes: Vec::new(),
                pulls: Vec::new(),
            };
            self.protocol.on_round(&mut self.nodes[i], inbox, &mut ctx)?;
            stats.work.push(ctx.work() as u32);
            for (target, msg) in ctx.pushes {
                let (kind, units) = self.protocol.describe(&msg);
                stats.sent += 1;
                stats.sent_units += units as u64;
                self.pushes.push(Pushed { target, msg, kind, units });
            }
            for (target, query, selector) in ctx.pulls {
                stats.sent += 2;
                stats.sent_units += 2;
                self.pulls.push(PendingPull { requester: i, target, query, selector });
            }
        }
        self.sent_total += stats.sent;
        self.round += 1;
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    /// Each node pushes its own counter once per round and remembers what
    /// it received; odd nodes also pull.
    struct Echo;

    #[derive(Default, Debug, PartialEq)]
    struct EchoNode {
        value: u32,
        seen: Vec<u32>,
        replies: Vec<Option<u32>>,
        rounds: Vec<u64>,
    }

    impl Protocol for Echo {
        type Node = EchoNode;
        type Msg = u32;
        type Query = ();
        type Reply = u32;
        type Error = Infallible;

        fn on_round(&self, node: &mut EchoNode, inbox: Inbox<u32, (), u32>, ctx: &mut RoundCtx<'_, u32, ()>) -> Result<(), Infallible> {
            node.seen.extend(inbox.messages);
            node.replies.extend(inbox.replies.into_iter().map(|(_, r)| r));
            node.rounds.push(ctx.round());
            ctx.push(node.value);
            if node.value % 2 == 1 {
                ctx.pull(());
            }
            Ok(())
        }

        fn on_pull(&self, node: &EchoNode, _: (), _: u64) -> Option<u32> {
            (node.value != 0).then_some(node.value)
        }

        fn describe(&self, _: &u32) -> (EnvelopeKind, u32) {
            (EnvelopeKind::ElementPush, 1)
        }
    }

    fn echo_nodes(n: u32) -> Vec<EchoNode> {
        (0..n).map(|value| EchoNode { value, ..Default::default() }).collect()
    }

    #[test]
    fn single_node_talks_to_itself() {
        let mut sim = SimRun::new(Echo, echo_nodes(1), 7);
        sim.step().unwrap();
        assert!(sim.nodes()[0].seen.is_empty());
        sim.step().unwrap();
        assert_eq!(sim.nodes()[0].seen, vec![0]);
    }

    #[test]
    fn messages_arrive_exactly_one_round_later() {
        let mut sim = SimRun::new(Echo, echo_nodes(5), 1);
        for _ in 0..6 {
            sim.step().unwrap();
        }
        let total_seen: usize = sim.nodes().iter().map(|s| s.seen.len()).sum();
        // 5 pushes per round, rounds 0..=4 delivered by round 5
        assert_eq!(total_seen, 25);
        assert_eq!(sim.round(), 6);
    }

    #[test]
    fn null_reply_and_value_reply() {
        let mut nodes = echo_nodes(2);
        nodes[0].value = 0;
        nodes[1].value = 3;
        let mut sim = SimRun::new(Echo, nodes, 11);
        for _ in 0..40 {
            sim.step().unwrap();
        }
        let replies = &sim.nodes()[1].replies;
        assert!(replies.contains(&None));
        assert!(replies.contains(&Some(3)));
    }

    #[test]
    fn work_counts_pushes_and_pulls() {
        let mut sim = SimRun::new(Echo, echo_nodes(4), 3);
        let stats = sim.step().unwrap();
        assert_eq!(stats.work, vec![1, 2, 1, 2]);
        assert_eq!(stats.max_work(), 2);
    }

    #[test]
    fn conservation_of_envelopes() {
        let mut sim = SimRun::new(Echo, echo_nodes(9), 5);
        for _ in 0..10 {
            sim.step().unwrap();
            assert_eq!(sim.sent_total(), sim.delivered_total() + sim.in_flight());
        }
    }

    #[test]
    fn same_seed_same_run() {
        let run = |seed| {
            let mut sim = SimRun::new(Echo, echo_nodes(8), seed);
            let stats: Vec<RoundStats> = (0..5).map(|_| sim.step().unwrap()).collect();
            (stats, sim.nodes().iter().map(|s| s.seen.clone()).collect::<Vec<_>>())
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42).1, run(43).1);
    }

    #[test]
    fn trace_lines() {
        let mut sim = SimRun::new(Echo, echo_nodes(2), 5).with_trace();
        sim.step().unwrap();
        sim.step().unwrap();
        let mut out = Vec::new();
        write_trace(&mut out, sim.trace().unwrap()).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().all(|l| l.starts_with("1 ")));
        assert!(text.contains("1 element 1"));
        assert!(text.contains("1 pull-request 1"));
    }

    #[test]
    fn pick_index_stays_in_range() {
        assert_eq!(pick_index(0, 10), 0);
        assert_eq!(pick_index(u64::MAX, 10), 9);
        assert_eq!(pick_index(u64::MAX / 2, 2), 0);
    }
}
