//! Hitting set as an LP-type problem, and the set-cover reduction.
//!
//! Elements are ground-set indices; `f(U)` counts the sets that `U` hits.

use itertools::Itertools;

use crate::lptype::{Basis, ElementId, FValue, LpError, LpType};

use super::ProblemError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
}

impl SetSystem {
    /// Each set is sorted and deduplicated. Sets must be nonempty and only
    /// contain indices below `universe_size`.
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self, ProblemError> {
        let mut clean = Vec::with_capacity(sets.len());
        for (j, mut set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(ProblemError::EmptySet(j));
            }
            if let Some(&index) = set.iter().find(|&&i| i >= universe_size) {
                return Err(ProblemError::IndexOutOfRange { set: j, index });
            }
            set.sort_unstable();
            set.dedup();
            clean.push(set);
        }
        Ok(Self {
            universe_size,
            sets: clean,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    /// Whether `u` intersects every set.
    pub fn is_hitting_set(&self, u: &[usize]) -> bool {
        let mut present = vec![false; self.universe_size];
        for &i in u {
            if i < self.universe_size {
                present[i] = true;
            }
        }
        self.sets.iter().all(|s| s.iter().any(|&i| present[i]))
    }

    /// Whether the chosen sets cover the universe.
    pub fn is_set_cover(&self, chosen: &[usize]) -> bool {
        let mut covered = vec![false; self.universe_size];
        for &j in chosen {
            for &i in &self.sets[j] {
                covered[i] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// Dual system: one set `M_i = { j | i ∈ S_j }` per original element.
pub fn setcover_to_hitting(sys: &SetSystem) -> Result<SetSystem, ProblemError> {
    let mut members = vec![Vec::new(); sys.universe_size];
    for (j, set) in sys.sets.iter().enumerate() {
        for &i in set {
            members[i].push(j);
        }
    }
    if let Some(i) = members.iter().position(Vec::is_empty) {
        return Err(ProblemError::UncoveredElement(i));
    }
    SetSystem::new(sys.num_sets(), members)
}

type Bits = Vec<u64>;

fn or_into(acc: &mut Bits, other: &Bits) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a |= b;
    }
}

fn popcount(bits: &Bits) -> u32 {
    bits.iter().map(|w| w.count_ones()).sum()
}

/// Support sets above this size are refused by basis search.
pub const HITTING_ENUMERATION_CAP: usize = 256;

#[derive(Clone, Debug)]
pub struct HittingSetProblem {
    system: SetSystem,
    /// Per ground element, the bitset of sets containing it.
    hits: Vec<Bits>,
}

impl HittingSetProblem {
    pub fn new(system: SetSystem) -> Self {
        let words = system.num_sets().div_ceil(64).max(1);
        let mut hits = vec![vec![0u64; words]; system.universe_size()];
        for (j, set) in system.sets().iter().enumerate() {
            for &i in set {
                hits[i][j / 64] |= 1 << (j % 64);
            }
        }
        Self { system, hits }
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    fn hit_bits(&self, support: &[ElementId]) -> Result<Bits, LpError> {
        let mut acc = vec![0u64; self.hits.first().map_or(1, Vec::len)];
        for &id in support {
            let bits = self.hits.get(id.index()).ok_or(LpError::UnknownElement(id))?;
            or_into(&mut acc, bits);
        }
        Ok(acc)
    }

    /// Number of sets hit by `support`.
    pub fn hit_count(&self, support: &[ElementId]) -> Result<usize, LpError> {
        Ok(popcount(&self.hit_bits(support)?) as usize)
    }

    /// Indices of the sets not hit by `support`.
    pub fn unhit_sets(&self, support: &[ElementId]) -> Result<Vec<usize>, LpError> {
        let bits = self.hit_bits(support)?;
        Ok((0..self.system.num_sets())
            .filter(|&j| bits[j / 64] & (1 << (j % 64)) == 0)
            .collect())
    }
}

impl LpType for HittingSetProblem {
    /// Upper bound on the size of any basis: a minimal subset never holds
    /// more elements than the sets it must hit.
    fn dim(&self) -> usize {
        self.system.universe_size().min(self.system.num_sets()).max(1)
    }

    fn num_elements(&self) -> usize {
        self.system.universe_size()
    }

    fn enumeration_cap(&self) -> usize {
        HITTING_ENUMERATION_CAP
    }

    fn value(&self, support: &[ElementId]) -> Result<f64, LpError> {
        Ok(self.hit_count(support)? as f64)
    }

    fn optimal_basis(&self, support: &[ElementId]) -> Result<Basis, LpError> {
        if support.len() > HITTING_ENUMERATION_CAP {
            return Err(LpError::SmallSetTooLarge {
                size: support.len(),
                cap: HITTING_ENUMERATION_CAP,
            });
        }
        let target = self.hit_bits(support)?;
        let count = popcount(&target) as f64;
        // elements that hit nothing can never appear in a minimal subset
        let useful: Vec<ElementId> = support
            .iter()
            .copied()
            .filter(|id| self.hits[id.index()].iter().any(|&w| w != 0))
            .collect();
        for k in 0..=useful.len() {
            for combo in useful.iter().copied().combinations(k) {
                let mut acc = vec![0u64; target.len()];
                for id in &combo {
                    or_into(&mut acc, &self.hits[id.index()]);
                }
                if acc == target {
                    return Ok(Basis::new(combo.clone(), FValue::new(count, combo)));
                }
            }
        }
        unreachable!("the useful part of the support hits every set the support hits")
    }
}

/// `f(U)`: the number of sets hit, with the shortlex-first minimal subset of
/// `U` hitting the same sets as tiebreak. Exponential in that subset's size.
pub fn hitting_f(sys: &SetSystem, u: &[usize]) -> FValue {
    let problem = HittingSetProblem::new(sys.clone());
    let mut support: Vec<ElementId> = u
        .iter()
        .filter(|&&i| i < sys.universe_size())
        .map(|&i| ElementId(i as u32))
        .collect();
    support.sort_unstable();
    support.dedup();
    let target = problem.hit_bits(&support).expect("indices were filtered");
    let count = popcount(&target) as f64;
    let useful: Vec<ElementId> = support
        .into_iter()
        .filter(|id| problem.hits[id.index()].iter().any(|&w| w != 0))
        .collect();
    for k in 0..=useful.len() {
        for combo in useful.iter().copied().combinations(k) {
            if problem.hit_bits(&combo).expect("indices were filtered") == target {
                return FValue::new(count, combo);
            }
        }
    }
    unreachable!("the useful part of U hits every set U hits")
}

/// Exhaustive ground truth for small systems.
pub mod oracle {
    use super::*;

    /// Size of a minimum hitting set, or `None` if no hitting set exists.
    pub fn min_hitting_set_size(sys: &SetSystem) -> Option<usize> {
        (0..=sys.universe_size()).find(|&k| {
            (0..sys.universe_size())
                .combinations(k)
                .any(|u| sys.is_hitting_set(&u))
        })
    }

    /// Size of a minimum set cover, or `None` if the sets do not cover.
    pub fn min_set_cover_size(sys: &SetSystem) -> Option<usize> {
        (0..=sys.num_sets()).find(|&k| {
            (0..sys.num_sets())
                .combinations(k)
                .any(|c| sys.is_set_cover(&c))
        })
    }
}
