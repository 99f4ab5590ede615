use std::cmp::Ordering;
use std::fmt;

use super::ElementId;

/// Absolute-then-relative tolerance used when comparing objective values.
pub const VALUE_TOLERANCE: f64 = 1e-9;

/// Compares two objective values, treating values within [`VALUE_TOLERANCE`]
/// (absolute, or relative to the larger magnitude) as equal.
pub fn compare_values(a: f64, b: f64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    if a.is_finite() && b.is_finite() {
        let diff = (a - b).abs();
        if diff <= VALUE_TOLERANCE || diff <= VALUE_TOLERANCE * a.abs().max(b.abs()) {
            return Ordering::Equal;
        }
    }
    a.total_cmp(&b)
}

pub fn values_equal(a: f64, b: f64) -> bool {
    compare_values(a, b) == Ordering::Equal
}

/// Order on defining-basis id sequences used when two values tie.
///
/// Bases are selected as the first subset in shortlex order (fewer elements
/// first, then lexicographic). A superset with the same value can only select
/// an earlier basis, so the tiebreak ranks earlier bases *higher*: this keeps
/// `f` monotone under insertion. The empty basis only arises when a set ties
/// with the empty set and is ranked lowest.
pub fn compare_tiebreak(a: &[ElementId], b: &[ElementId]) -> Ordering {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => b.len().cmp(&a.len()).then_with(|| b.cmp(a)),
    }
}

/// Totally ordered objective value: compared by value first, then by the
/// ids of the defining basis.
#[derive(Clone, Debug)]
pub struct FValue {
    value: f64,
    tiebreak: Vec<ElementId>,
}

impl FValue {
    pub fn new(value: f64, mut tiebreak: Vec<ElementId>) -> Self {
        tiebreak.sort_unstable();
        Self { value, tiebreak }
    }

    /// Value with an empty defining basis, i.e. `f(∅)` of a problem whose
    /// empty-set objective is `value`.
    pub fn empty(value: f64) -> Self {
        Self {
            value,
            tiebreak: Vec::new(),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn tiebreak(&self) -> &[ElementId] {
        &self.tiebreak
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Total order on [`FValue`]s.
pub fn compare(a: &FValue, b: &FValue) -> Ordering {
    compare_values(a.value, b.value).then_with(|| compare_tiebreak(&a.tiebreak, &b.tiebreak))
}

impl PartialEq for FValue {
    fn eq(&self, other: &Self) -> bool {
        compare(self, other) == Ordering::Equal
    }
}

impl Eq for FValue {}

impl PartialOrd for FValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FValue {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl fmt::Display for FValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.value)?;
        for (i, id) in self.tiebreak.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", id.0)?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ElementId> {
        v.iter().copied().map(ElementId).collect()
    }

    #[test]
    fn value_order_dominates() {
        let a = FValue::new(0.0, vec![]);
        let b = FValue::new(1.0, ids(&[5]));
        assert_eq!(compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn identical_values_are_equal() {
        let a = FValue::new(1.0, ids(&[2, 7]));
        let b = FValue::new(1.0, ids(&[7, 2]));
        assert_eq!(compare(&a, &b), Ordering::Equal);
    }

    #[test]
    fn tiebreak_on_equal_values() {
        let a = FValue::new(1.0, ids(&[2, 7]));
        let b = FValue::new(1.0, ids(&[3]));
        assert_eq!(compare(&a, &b), Ordering::Less);
        assert_eq!(compare(&b, &a), Ordering::Greater);
    }

    #[test]
    fn same_length_tiebreak_prefers_lexicographically_first_basis() {
        let early = FValue::new(1.0, ids(&[0, 1]));
        let late = FValue::new(1.0, ids(&[3, 4]));
        assert!(late < early);
    }

    #[test]
    fn empty_basis_is_lowest_at_equal_value() {
        let empty = FValue::empty(0.0);
        let single = FValue::new(0.0, ids(&[9]));
        assert!(empty < single);
    }

    #[test]
    fn values_within_tolerance_tie() {
        assert!(values_equal(1.0, 1.0 + 1e-12));
        assert!(values_equal(1e6, 1e6 * (1.0 + 5e-10)));
        assert!(!values_equal(1.0, 1.0 + 1e-6));
        assert!(values_equal(f64::INFINITY, f64::INFINITY));
        assert_eq!(compare_values(f64::NEG_INFINITY, -1e300), Ordering::Less);
    }
}
