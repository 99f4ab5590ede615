//! The LP-type problem contract.
//!
//! An LP-type problem is a finite element universe `H` together with an
//! objective `f` on subsets that is monotone and local. Everything in this
//! crate talks to problems through [`LpType`]: concrete instances live in
//! [`crate::problems`], the sequential Clarkson solver lives in
//! [`clarkson`], and brute-force ground truth lives in [`oracle`].

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

pub mod clarkson;
mod fvalue;
pub mod oracle;

pub use clarkson::{
    multiplicity_growth_check, sequential_clarkson, sequential_clarkson_traced, ClarksonConfig,
    ClarksonOutcome, ClarksonTrace, TraceStep,
};
pub use fvalue::{compare, compare_tiebreak, compare_values, values_equal, FValue, VALUE_TOLERANCE};

/// Canonical ordinal of an element within a problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Default cap on the support size accepted by exhaustive basis enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("support of {size} elements exceeds the enumeration cap of {cap}")]
    SmallSetTooLarge { size: usize, cap: usize },
    #[error("sequential Clarkson exceeded its cap of {cap} iterations")]
    IterationCapExceeded { cap: u64 },
    #[error("total multiplicity overflowed")]
    MultiplicityOverflow,
    #[error("element {0} is not part of the instance")]
    UnknownElement(ElementId),
}

/// Multiset of elements: element id to strictly positive multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiset {
    entries: BTreeMap<ElementId, u64>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: ElementId) {
        self.insert_n(id, 1);
    }

    pub fn insert_n(&mut self, id: ElementId, count: u64) {
        if count > 0 {
            *self.entries.entry(id).or_insert(0) += count;
        }
    }

    /// Removes one copy of `id`, returning whether a copy was present.
    pub fn remove_one(&mut self, id: ElementId) -> bool {
        match self.entries.get_mut(&id) {
            Some(m) if *m > 1 => {
                *m -= 1;
                true
            }
            Some(_) => {
                self.entries.remove(&id);
                true
            }
            None => false,
        }
    }

    pub fn multiplicity(&self, id: ElementId) -> u64 {
        self.entries.get(&id).copied().unwrap_or(0)
    }

    /// Total size, i.e. the sum of all multiplicities.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted distinct element ids.
    pub fn support(&self) -> Vec<ElementId> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementId, u64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

impl FromIterator<ElementId> for Multiset {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for id in iter {
            m.insert(id);
        }
        m
    }
}

/// A minimal subset together with its objective value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    elements: Vec<ElementId>,
    fvalue: FValue,
}

impl Basis {
    /// `elements` are sorted; the caller guarantees `f(elements) = fvalue`.
    pub fn new(mut elements: Vec<ElementId>, fvalue: FValue) -> Self {
        elements.sort_unstable();
        Self { elements, fvalue }
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn fvalue(&self) -> &FValue {
        &self.fvalue
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.binary_search(&id).is_ok()
    }
}

/// Sorts and deduplicates a list of ids into a support set.
pub fn support_of(ids: &[ElementId]) -> Vec<ElementId> {
    let mut s = ids.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// An LP-type problem `(H, f)` over elements `0..num_elements()`.
///
/// Implementors provide the raw objective on support sets; the order-aware
/// [`FValue`] of a set is the value together with its shortlex-first basis.
/// Every `support` argument is sorted and duplicate free.
pub trait LpType {
    /// Combinatorial dimension `d`.
    fn dim(&self) -> usize;

    fn num_elements(&self) -> usize;

    /// Largest support accepted by [`LpType::optimal_basis`].
    fn enumeration_cap(&self) -> usize {
        DEFAULT_ENUMERATION_CAP
    }

    /// Objective value of a support set, without tiebreak.
    fn value(&self, support: &[ElementId]) -> Result<f64, LpError>;

    /// Shortlex-first subset of `support` whose value equals the value of `support`.
    fn optimal_basis(&self, support: &[ElementId]) -> Result<Basis, LpError> {
        let cap = self.enumeration_cap();
        if support.len() > cap {
            return Err(LpError::SmallSetTooLarge {
                size: support.len(),
                cap,
            });
        }
        first_basis(self, support)
    }

    fn eval(&self, support: &[ElementId]) -> Result<FValue, LpError> {
        Ok(self.optimal_basis(support)?.fvalue)
    }

    /// Whether `f(B ∪ {h}) > f(B)` for a basis `B`.
    fn violates(&self, basis: &Basis, h: ElementId) -> Result<bool, LpError> {
        if basis.contains(h) {
            return Ok(false);
        }
        let mut joined = basis.elements().to_vec();
        joined.push(h);
        joined.sort_unstable();
        Ok(self.eval(&joined)? > *basis.fvalue())
    }

    /// Violation flags for a batch of candidates against one basis.
    fn violation_mask(&self, basis: &Basis, candidates: &[ElementId]) -> Result<Vec<bool>, LpError> {
        candidates.iter().map(|&h| self.violates(basis, h)).collect()
    }

    fn any_violator(&self, basis: &Basis, candidates: &[ElementId]) -> Result<bool, LpError> {
        Ok(self.violation_mask(basis, candidates)?.into_iter().any(|v| v))
    }

    /// Non-violating candidates that may still form a tied basis of equal
    /// value together with other candidates. Problems whose values are
    /// compared exactly have none.
    fn tight_mask(&self, _basis: &Basis, candidates: &[ElementId]) -> Result<Vec<bool>, LpError> {
        Ok(vec![false; candidates.len()])
    }
}

/// Exhaustive shortlex search for the first subset whose value matches the
/// value of the whole support.
pub fn first_basis<P: LpType + ?Sized>(problem: &P, support: &[ElementId]) -> Result<Basis, LpError> {
    let target = problem.value(support)?;
    for k in 0..=support.len() {
        for combo in support.iter().copied().combinations(k) {
            if values_equal(problem.value(&combo)?, target) {
                let fvalue = FValue::new(target, combo.clone());
                return Ok(Basis::new(combo, fvalue));
            }
        }
    }
    unreachable!("the full support always matches its own value")
}

/// Optimal basis of a multiset (by its support).
pub fn optimal_basis<P: LpType + ?Sized>(problem: &P, set: &Multiset) -> Result<Basis, LpError> {
    problem.optimal_basis(&set.support())
}

/// `f` of a multiset.
pub fn fvalue<P: LpType + ?Sized>(problem: &P, set: &Multiset) -> Result<FValue, LpError> {
    problem.eval(&set.support())
}

/// Whether `f(R ∪ {h}) > f(R)`, evaluated on the full supports.
pub fn violates<P: LpType + ?Sized>(problem: &P, set: &Multiset, h: ElementId) -> Result<bool, LpError> {
    let support = set.support();
    if support.binary_search(&h).is_ok() {
        return Ok(false);
    }
    let base = problem.eval(&support)?;
    let mut joined = support;
    let pos = joined.binary_search(&h).unwrap_err();
    joined.insert(pos, h);
    Ok(problem.eval(&joined)? > base)
}
