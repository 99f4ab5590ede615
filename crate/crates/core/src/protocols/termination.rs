//! Termination detection: gossiped candidate bases with validity bits.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::lptype::Basis;

#[derive(Clone, Debug, PartialEq)]
pub struct TerminationRecord {
    /// Injection round.
    pub t: u64,
    pub basis: Arc<Basis>,
    pub valid: bool,
}

/// At most one record per injection round.
#[derive(Clone, Debug, Default)]
pub struct TerminationTable {
    records: BTreeMap<u64, (Arc<Basis>, bool)>,
}

impl TerminationTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, t: u64) -> Option<TerminationRecord> {
        self.records.get(&t).map(|(basis, valid)| TerminationRecord {
            t,
            basis: basis.clone(),
            valid: *valid,
        })
    }

    /// Keeps the record with the larger `f(B)` for its round, and the
    /// smaller validity bit when both carry the same basis value.
    pub fn merge(&mut self, rec: TerminationRecord) {
        match self.records.get_mut(&rec.t) {
            None => {
                self.records.insert(rec.t, (rec.basis, rec.valid));
            }
            Some((basis, valid)) => match rec.basis.fvalue().cmp(basis.fvalue()) {
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Greater => {
                    *basis = rec.basis;
                    *valid = rec.valid;
                }
                std::cmp::Ordering::Equal => *valid &= rec.valid,
            },
        }
    }

    /// One pass over the table at round `now`: records whose basis is
    /// `violated` by local data lose their validity, records injected before
    /// `now − window` are removed, and the first valid one among those is
    /// returned as the output. Live records are returned for re-pushing.
    pub fn sweep<E>(
        &mut self,
        now: u64,
        window: u64,
        mut violated: impl FnMut(&Basis) -> Result<bool, E>,
    ) -> Result<(Option<TerminationRecord>, Vec<TerminationRecord>), E> {
        let mut output = None;
        let mut live = Vec::with_capacity(self.records.len());
        let mut mature = Vec::new();
        for (&t, (basis, valid)) in self.records.iter_mut() {
            if *valid && violated(basis)? {
                *valid = false;
            }
            let rec = TerminationRecord {
                t,
                basis: basis.clone(),
                valid: *valid,
            };
            if t + window < now {
                mature.push(t);
                if rec.valid && output.is_none() {
                    output = Some(rec);
                }
            } else {
                live.push(rec);
            }
        }
        for t in mature {
            self.records.remove(&t);
        }
        Ok((output, live))
    }
}
