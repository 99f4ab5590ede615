//! Problem-agnostic brute-force ground truth.

use itertools::Itertools;

use super::{support_of, values_equal, Basis, ElementId, FValue, LpError, LpType};

/// `f` over `ground` by direct shortlex enumeration, with no size cap and
/// no problem-specific shortcuts. Exponential; meant for small instances.
pub fn brute_force_basis<P: LpType + ?Sized>(problem: &P, ground: &[ElementId]) -> Result<Basis, LpError> {
    let support = support_of(ground);
    let target = problem.value(&support)?;
    for k in 0..=support.len() {
        for combo in support.iter().copied().combinations(k) {
            if values_equal(problem.value(&combo)?, target) {
                return Ok(Basis::new(combo.clone(), FValue::new(target, combo)));
            }
        }
    }
    unreachable!("the full support always matches its own value")
}

pub fn brute_force_fvalue<P: LpType + ?Sized>(problem: &P, ground: &[ElementId]) -> Result<FValue, LpError> {
    Ok(brute_force_basis(problem, ground)?.fvalue().clone())
}

/// Checks monotonicity and locality of `f` on one chain `F ⊆ G` and an
/// element `h`. Returns `(monotone, local)`.
pub fn lp_type_conditions<P: LpType + ?Sized>(
    problem: &P,
    f_set: &[ElementId],
    g_set: &[ElementId],
    h: ElementId,
) -> Result<(bool, bool), LpError> {
    let f = problem.eval(&support_of(f_set))?;
    let g = problem.eval(&support_of(g_set))?;
    let monotone = f <= g;
    let local = if f == g {
        let mut gh = g_set.to_vec();
        gh.push(h);
        let mut fh = f_set.to_vec();
        fh.push(h);
        let g_up = problem.eval(&support_of(&gh))? > g;
        let f_up = problem.eval(&support_of(&fh))? > f;
        !g_up || f_up
    } else {
        true
    };
    Ok((monotone, local))
}
