//! Basis gossip: every node pushes its local optimal basis, and recipients
//! answer with the local elements that violate it. Nothing is ever deleted.

use std::sync::Arc;

use crate::lptype::{support_of, Basis, ElementId, FValue, LpType};
use crate::sim::{EnvelopeKind, Inbox, Protocol, RoundCtx};

use super::{termination::TerminationTable, NodeView, ProtocolError, TerminationRecord};

#[derive(Clone, Debug)]
pub enum Msg {
    Element(ElementId),
    Basis(Arc<Basis>),
    Termination(TerminationRecord),
}

#[derive(Clone, Debug, Default)]
pub struct HighLoadNode {
    initial: usize,
    /// `H(v)` with multiplicity; the first `initial` entries are originals.
    items: Vec<ElementId>,
    table: TerminationTable,
    output: Option<TerminationRecord>,
    solved_round: Option<u64>,
}

impl HighLoadNode {
    pub fn new(originals: Vec<ElementId>) -> Self {
        Self {
            initial: originals.len(),
            items: originals,
            ..Default::default()
        }
    }

    pub fn items(&self) -> &[ElementId] {
        &self.items
    }
}

impl NodeView for HighLoadNode {
    fn originals(&self) -> Box<dyn Iterator<Item = ElementId> + '_> {
        Box::new(self.items[..self.initial].iter().copied())
    }

    fn original_count(&self) -> usize {
        self.initial
    }

    fn local_size(&self) -> usize {
        self.items.len()
    }

    fn solved_round(&self) -> Option<u64> {
        self.solved_round
    }

    fn output(&self) -> Option<&TerminationRecord> {
        self.output.as_ref()
    }
}

pub struct HighLoad<'a, P: ?Sized> {
    pub problem: &'a P,
    pub target: Option<FValue>,
    /// Basis copies pushed per round.
    pub accel: u32,
    /// Largest local support handed to basis computation.
    pub basis_cap: usize,
    pub window: u64,
}

impl<P: ?Sized> HighLoad<'_, P> {
    /// Cap `4·(⌈m/n⌉ + log₂ n)` for a global multiset of size `m`.
    pub fn cap_for(m: usize, n: usize, log_n: u32) -> usize {
        4 * (m.div_ceil(n) + log_n as usize)
    }
}

impl<P: LpType + ?Sized> Protocol for HighLoad<'_, P> {
    type Node = HighLoadNode;
    type Msg = Msg;
    type Query = ();
    type Reply = ();
    type Error = ProtocolError;

    fn on_round(&self, node: &mut HighLoadNode, inbox: Inbox<Msg, (), ()>, ctx: &mut RoundCtx<'_, Msg, ()>) -> Result<(), ProtocolError> {
        if node.output.is_some() {
            return Ok(());
        }
        let now = ctx.round();
        let mut bases = Vec::new();
        let mut arrived = Vec::new();
        for msg in inbox.messages {
            match msg {
                Msg::Termination(rec) => node.table.merge(rec),
                Msg::Basis(b) => bases.push(b),
                Msg::Element(id) => arrived.push(id),
            }
        }

        let support = support_of(&node.items);
        let (out, live) = node
            .table
            .sweep(now, self.window, |b| self.problem.any_violator(b, &support))?;
        if let Some(rec) = out {
            node.output = Some(rec);
            return Ok(());
        }
        for rec in live {
            ctx.push(Msg::Termination(rec));
        }

        let own = if support.is_empty() {
            None
        } else {
            if support.len() > self.basis_cap {
                return Err(ProtocolError::LocalBasisTooLarge {
                    size: support.len(),
                    cap: self.basis_cap,
                });
            }
            let basis = Arc::new(self.problem.optimal_basis(&support)?);
            // the basis describes the local set after the previous round;
            // the repeat-until loop runs at least once
            if node.solved_round.is_none() && self.target.as_ref() == Some(basis.fvalue()) {
                node.solved_round = Some(now.max(1));
            }
            for _ in 0..self.accel {
                ctx.push(Msg::Basis(basis.clone()));
            }
            Some(basis)
        };

        for b in &bases {
            let mask = self.problem.violation_mask(b, &support)?;
            let violators: Vec<ElementId> = support.iter().zip(mask).filter(|(_, v)| *v).map(|(&id, _)| id).collect();
            if violators.is_empty() {
                continue;
            }
            for &id in &node.items {
                if violators.binary_search(&id).is_ok() {
                    ctx.push(Msg::Element(id));
                }
            }
        }

        let fresh = support_of(&arrived);
        node.items.extend(arrived);
        if let Some(basis) = own {
            if !self.problem.any_violator(&basis, &fresh)? {
                let rec = TerminationRecord { t: now, basis, valid: true };
                node.table.merge(rec.clone());
                ctx.push(Msg::Termination(rec));
            }
        }
        Ok(())
    }

    fn on_pull(&self, _: &HighLoadNode, _: (), _: u64) -> Option<()> {
        None
    }

    fn describe(&self, msg: &Msg) -> (EnvelopeKind, u32) {
        let d = self.problem.dim() as u32;
        match msg {
            Msg::Element(_) => (EnvelopeKind::ElementPush, 1),
            Msg::Basis(_) => (EnvelopeKind::BasisPush, d),
            Msg::Termination(_) => (EnvelopeKind::TerminationPush, d + 2),
        }
    }
}
