//! Sequential Clarkson algorithm with multiplicity doubling.

use rand::seq::index;
use rand::Rng;

use super::{support_of, Basis, ElementId, LpError, LpType};

#[derive(Clone, Debug, Default)]
pub struct ClarksonConfig {
    /// Iteration cap; `None` uses `64·d·⌈log₂|H|⌉ + 64`.
    pub iteration_cap: Option<u64>,
}

/// State after one iteration of the repeat loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub iteration: u64,
    /// Successful iterations so far, including this one.
    pub successful: u64,
    /// `|H(μ)|` after this iteration's doubling.
    pub total_multiplicity: u64,
    /// `|V|` counted with multiplicity.
    pub violators: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClarksonTrace {
    pub ground_size: usize,
    pub dim: usize,
    pub steps: Vec<TraceStep>,
}

#[derive(Clone, Debug)]
pub struct ClarksonOutcome {
    pub basis: Basis,
    pub iterations: u64,
    pub successful: u64,
    pub trace: ClarksonTrace,
}

pub fn default_iteration_cap(dim: usize, ground: usize) -> u64 {
    let log = (ground.max(2) as f64).log2().ceil() as u64;
    64 * dim as u64 * log + 64
}

/// Solves `problem` over all of its elements.
pub fn sequential_clarkson<P, R>(problem: &P, rng: &mut R) -> Result<Basis, LpError>
where
    P: LpType + ?Sized,
    R: Rng + ?Sized,
{
    let ground: Vec<ElementId> = (0..problem.num_elements() as u32).map(ElementId).collect();
    sequential_clarkson_traced(problem, &ground, &ClarksonConfig::default(), rng).map(|o| o.basis)
}

/// Solves `problem` restricted to `ground` (sorted, distinct) and records
/// the multiplicity trace.
pub fn sequential_clarkson_traced<P, R>(
    problem: &P,
    ground: &[ElementId],
    config: &ClarksonConfig,
    rng: &mut R,
) -> Result<ClarksonOutcome, LpError>
where
    P: LpType + ?Sized,
    R: Rng + ?Sized,
{
    let d = problem.dim().max(1);
    let r = 6 * d * d;
    let mut trace = ClarksonTrace {
        ground_size: ground.len(),
        dim: d,
        steps: Vec::new(),
    };
    if ground.len() <= r {
        let basis = problem.optimal_basis(ground)?;
        return Ok(ClarksonOutcome {
            basis,
            iterations: 0,
            successful: 0,
            trace,
        });
    }

    let cap = config
        .iteration_cap
        .unwrap_or_else(|| default_iteration_cap(d, ground.len()));
    let mut mu = vec![1u64; ground.len()];
    let mut total = ground.len() as u64;
    let mut successful = 0u64;
    let mut iteration = 0u64;
    let mut violating = vec![false; ground.len()];

    loop {
        iteration += 1;
        if iteration > cap {
            return Err(LpError::IterationCapExceeded { cap });
        }

        let sample = sample_weighted(&mu, total, r, rng)?;
        let support: Vec<ElementId> = sample.iter().map(|&j| ground[j]).collect();
        let basis = problem.optimal_basis(&support)?;

        let mask = problem.violation_mask(&basis, ground)?;
        let mut violators = 0u64;
        for (j, v) in mask.into_iter().enumerate() {
            violating[j] = v;
            if v {
                violators += mu[j];
            }
        }

        if violators == 0 {
            trace.steps.push(TraceStep {
                iteration,
                successful,
                total_multiplicity: total,
                violators,
            });
            return Ok(ClarksonOutcome {
                basis: canonical(problem, basis, ground)?,
                iterations: iteration,
                successful,
                trace,
            });
        }

        // successful iff |V| ≤ |H(μ)| / (3d)
        if violators.saturating_mul(3 * d as u64) <= total {
            successful += 1;
            for (j, &v) in violating.iter().enumerate() {
                if v {
                    mu[j] = mu[j].checked_mul(2).ok_or(LpError::MultiplicityOverflow)?;
                }
            }
            total = total.checked_add(violators).ok_or(LpError::MultiplicityOverflow)?;
        }
        trace.steps.push(TraceStep {
            iteration,
            successful,
            total_multiplicity: total,
            violators,
        });
    }
}

/// Re-solves over the basis and the tight elements of `ground`, so that a
/// tie within tolerance resolves to the same basis as a direct solve.
fn canonical<P: LpType + ?Sized>(problem: &P, basis: Basis, ground: &[ElementId]) -> Result<Basis, LpError> {
    let mask = problem.tight_mask(&basis, ground)?;
    let mut pool: Vec<ElementId> = ground.iter().zip(mask).filter(|(_, t)| *t).map(|(&id, _)| id).collect();
    if pool.is_empty() {
        return Ok(basis);
    }
    pool.extend_from_slice(basis.elements());
    match problem.optimal_basis(&support_of(&pool)) {
        Ok(b) if !problem.any_violator(&b, ground)? => Ok(b),
        Ok(_) | Err(LpError::SmallSetTooLarge { .. }) => Ok(basis),
        Err(e) => Err(e),
    }
}

/// Draws `r` distinct copies out of the `total` copies described by `mu`
/// and returns the sorted distinct ground indices they belong to.
fn sample_weighted<R: Rng + ?Sized>(
    mu: &[u64],
    total: u64,
    r: usize,
    rng: &mut R,
) -> Result<Vec<usize>, LpError> {
    let total = usize::try_from(total).map_err(|_| LpError::MultiplicityOverflow)?;
    let mut picks = index::sample(rng, total, r).into_vec();
    picks.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(r);
    let mut j = 0usize;
    let mut upper = mu[0] as usize;
    for p in picks {
        while p >= upper {
            j += 1;
            upper += mu[j] as usize;
        }
        if out.last() != Some(&j) {
            out.push(j);
        }
    }
    Ok(out)
}

/// Checks the deterministic half of the multiplicity growth bound:
/// `μ(H) ≤ |H|·(1 + 1/(3d))^k` after `k` successful iterations, at every step.
pub fn multiplicity_growth_check(trace: &ClarksonTrace) -> bool {
    let base = 1.0 + 1.0 / (3.0 * trace.dim.max(1) as f64);
    let n = trace.ground_size as f64;
    trace.steps.iter().all(|s| {
        let bound = n * base.powf(s.successful as f64);
        (s.total_multiplicity as f64) <= bound * (1.0 + 1e-12)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weighted_sampling_maps_copies_to_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mu = [1, 4, 1];
        for _ in 0..50 {
            let s = sample_weighted(&mu, 6, 6, &mut rng).unwrap();
            assert_eq!(s, vec![0, 1, 2]);
        }
        let s = sample_weighted(&[0, 0, 5], 5, 2, &mut rng).unwrap();
        assert_eq!(s, vec![2]);
    }

    #[test]
    fn growth_check_without_success_requires_exact_size() {
        let ok = ClarksonTrace {
            ground_size: 100,
            dim: 3,
            steps: vec![TraceStep { iteration: 1, successful: 0, total_multiplicity: 100, violators: 40 }],
        };
        assert!(multiplicity_growth_check(&ok));
        let bad = ClarksonTrace {
            steps: vec![TraceStep { iteration: 1, successful: 0, total_multiplicity: 101, violators: 1 }],
            ..ok.clone()
        };
        assert!(!multiplicity_growth_check(&bad));
    }

    #[test]
    fn growth_check_one_success_bound() {
        // d = 3: one success allows at most |H|·(1 + 1/9)
        let at_bound = ClarksonTrace {
            ground_size: 90,
            dim: 3,
            steps: vec![TraceStep { iteration: 1, successful: 1, total_multiplicity: 100, violators: 10 }],
        };
        assert!(multiplicity_growth_check(&at_bound));
        let over = ClarksonTrace {
            steps: vec![TraceStep { iteration: 1, successful: 1, total_multiplicity: 101, violators: 11 }],
            ..at_bound.clone()
        };
        assert!(!multiplicity_growth_check(&over));
    }

    #[test]
    fn default_cap_formula() {
        assert_eq!(default_iteration_cap(3, 1024), 64 * 3 * 10 + 64);
        assert_eq!(default_iteration_cap(2, 1000), 64 * 2 * 10 + 64);
    }
}
