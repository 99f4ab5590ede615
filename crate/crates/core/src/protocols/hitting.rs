//! Sampling rounds for hitting sets: a sample that misses some set makes
//! each node spread its local elements of one missed set.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lptype::{support_of, Basis, ElementId, FValue};
use crate::problems::HittingSetProblem;

use super::lowload::{SampleStep, StepOutcome};
use super::ProtocolError;

pub struct HittingStep<'a> {
    pub problem: &'a HittingSetProblem,
    /// Target hitting-set size parameter.
    pub d: usize,
    pub r: usize,
    /// Largest local share of a missed set that is still pushed.
    pub push_cap: usize,
}

impl SampleStep for HittingStep<'_> {
    fn sample_size(&self) -> usize {
        self.r
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn iterate(&self, sample: &[ElementId], local: &[ElementId], rng: &mut ChaCha8Rng) -> Result<StepOutcome, ProtocolError> {
        let unhit = self.problem.unhit_sets(&support_of(sample))?;
        if unhit.is_empty() {
            let s = self.problem.system().num_sets() as f64;
            // the candidate is the sample itself, copies included
            let candidate = Basis::new(sample.to_vec(), FValue::new(s, sample.to_vec()));
            return Ok(StepOutcome {
                push: Vec::new(),
                inject: Some(Arc::new(candidate)),
                solved: true,
            });
        }
        let set = self.problem.system().set(unhit[rng.gen_range(0..unhit.len())]);
        let w: Vec<ElementId> = local
            .iter()
            .copied()
            .filter(|id| set.binary_search(&id.index()).is_ok())
            .collect();
        let push = if w.len() <= self.push_cap { w } else { Vec::new() };
        Ok(StepOutcome {
            push,
            inject: None,
            solved: false,
        })
    }

    fn invalidates(&self, basis: &Basis, local_support: &[ElementId]) -> Result<bool, ProtocolError> {
        let mut joined = basis.elements().to_vec();
        joined.extend_from_slice(local_support);
        let joined = support_of(&joined);
        Ok(self.problem.hit_count(&joined)? as f64 > basis.fvalue().value())
    }
}
