use lpgossip::lptype::oracle::{brute_force_fvalue, lp_type_conditions};
use lpgossip::lptype::{
    multiplicity_growth_check, sequential_clarkson, sequential_clarkson_traced, support_of, ClarksonConfig, ElementId,
    LpType,
};
use lpgossip::problems::{
    format_points, format_set_system, med, parse_points, parse_set_system, HittingSetProblem, MedProblem, Point2D,
    SetSystem,
};
use proptest::prelude::*;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(n: usize) -> Vec<ElementId> {
    (0..n as u32).map(ElementId).collect()
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point2D> {
    (0..n).map(|_| Point2D::new(rng.gen(), rng.gen())).collect()
}

fn random_system(rng: &mut ChaCha8Rng, universe: usize, sets: usize) -> SetSystem {
    let mut family: Vec<Vec<usize>> = (0..sets)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(universe));
            index::sample(rng, universe, k).into_vec()
        })
        .collect();
    // every element must be covered
    for i in 0..universe {
        if !family.iter().any(|s| s.contains(&i)) {
            let j = rng.gen_range(0..family.len());
            family[j].push(i);
        }
    }
    SetSystem::new(universe, family).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[ElementId]) -> Vec<ElementId> {
    from.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random chain `F ⊆ G` plus an element `h`; half the time `F` contains
/// the basis of `G`, so that `f(F) = f(G)` and locality is exercised.
fn chain<P: LpType>(p: &P, rng: &mut ChaCha8Rng) -> (Vec<ElementId>, Vec<ElementId>, ElementId) {
    let all = ids(p.num_elements());
    let g = support_of(&random_subset(rng, &all));
    let mut f = random_subset(rng, &g);
    if rng.gen_bool(0.5) {
        f.extend_from_slice(p.optimal_basis(&g).unwrap().elements());
    }
    let h = all[rng.gen_range(0..all.len())];
    (support_of(&f), g, h)
}

#[test]
fn med_monotone_and_local_on_1000_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut equal_chains = 0;
    for _ in 0..1000 {
        let p = MedProblem::new(random_points(&mut rng, 12)).unwrap();
        let (f, g, h) = chain(&p, &mut rng);
        let (monotone, local) = lp_type_conditions(&p, &f, &g, h).unwrap();
        assert!(monotone, "monotonicity: F={f:?} G={g:?}");
        assert!(local, "locality: F={f:?} G={g:?} h={h:?}");
        if p.eval(&f).unwrap() == p.eval(&g).unwrap() {
            equal_chains += 1;
        }
    }
    assert!(equal_chains > 300);
}

#[test]
fn hitting_monotone_on_1000_chains_and_value_local() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let p = HittingSetProblem::new(random_system(&mut rng, 10, 8));
        let (f, g, h) = chain(&p, &mut rng);
        let (monotone, _) = lp_type_conditions(&p, &f, &g, h).unwrap();
        assert!(monotone);
        // locality holds for the hit count itself
        let val = |s: &[ElementId]| p.value(&support_of(s)).unwrap();
        if val(&f) == val(&g) {
            let with = |s: &[ElementId]| {
                let mut s = s.to_vec();
                s.push(h);
                val(&s)
            };
            if with(&g) > val(&g) {
                assert!(with(&f) > val(&f));
            }
        }
    }
}

#[test]
fn bases_are_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let p = MedProblem::new(random_points(&mut rng, 20)).unwrap();
        let b = p.optimal_basis(&ids(20)).unwrap();
        for skip in 0..b.len() {
            let rest: Vec<ElementId> = b.elements().iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &e)| e).collect();
            assert!(p.eval(&rest).unwrap() < *b.fvalue());
        }
        let h = HittingSetProblem::new(random_system(&mut rng, 10, 8));
        let b = h.optimal_basis(&ids(10)).unwrap();
        for skip in 0..b.len() {
            let rest: Vec<ElementId> = b.elements().iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &e)| e).collect();
            assert!(h.eval(&rest).unwrap() < *b.fvalue());
        }
    }
}

#[test]
fn clarkson_matches_oracles_and_growth_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in 0..40 {
        let n = 10 + 6 * k;
        let pts = random_points(&mut rng, n);
        let p = MedProblem::new(pts.clone()).unwrap();
        let out = sequential_clarkson_traced(&p, &ids(n), &ClarksonConfig::default(), &mut rng).unwrap();
        assert_eq!(*out.basis.fvalue(), med::oracle::brute_force_fvalue(&pts));
        assert!(multiplicity_growth_check(&out.trace));
    }
    for _ in 0..40 {
        let h = HittingSetProblem::new(random_system(&mut rng, 9, 9));
        let b = sequential_clarkson(&h, &mut rng).unwrap();
        assert_eq!(*b.fvalue(), brute_force_fvalue(&h, &ids(9)).unwrap());
    }
}

#[test]
fn clarkson_on_100_points_seed_1() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts = random_points(&mut rng, 100);
    let p = MedProblem::new(pts.clone()).unwrap();
    let b = sequential_clarkson(&p, &mut rng).unwrap();
    assert_eq!(*b.fvalue(), med::oracle::brute_force_fvalue(&pts));
}

#[test]
fn zero_successful_iterations_keep_unit_multiplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = MedProblem::new(random_points(&mut rng, 20)).unwrap();
    // at most 6d² elements: a single direct call, no sampling
    let out = sequential_clarkson_traced(&p, &ids(20), &ClarksonConfig::default(), &mut rng).unwrap();
    assert!(out.trace.steps.iter().all(|s| s.successful > 0 || s.total_multiplicity == 20));
    assert!(multiplicity_growth_check(&out.trace));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn point_files_round_trip(coords in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
        let pts: Vec<Point2D> = coords.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
        prop_assert_eq!(parse_points(&format_points(&pts)).unwrap(), pts);
    }

    #[test]
    fn set_files_round_trip(seed in any::<u64>(), universe in 1usize..12, sets in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, universe, sets);
        prop_assert_eq!(parse_set_system(&format_set_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn disk_contains_every_point(coords in prop::collection::vec((-10f64..10.0, -10f64..10.0), 1..60)) {
        let pts: Vec<Point2D> = coords.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
        let p = MedProblem::new(pts.clone()).unwrap();
        let all = ids(pts.len());
        let disk = p.disk(&all).unwrap();
        prop_assert!(pts.iter().all(|&q| disk.contains(q)));
        let b = p.optimal_basis(&all).unwrap();
        prop_assert!(!p.any_violator(&b, &all).unwrap());
        prop_assert!((b.fvalue().value() - med::oracle::brute_force_radius(&pts)).abs() < 1e-9 * disk.radius.max(1.0));
    }
}
