use lpgossip::experiment::DatasetSpec;
use lpgossip::experiment::DatasetKind;
use lpgossip::lptype::{sequential_clarkson, ElementId, FValue};
use lpgossip::problems::{HittingSetProblem, MedProblem, Point2D, SetSystem};
use lpgossip::protocols::lowload::{LowLoad, LpStep, SamplingNode};
use lpgossip::protocols::runner::{distribute, RunOptions};
use lpgossip::protocols::{
    hitting_sample_size, keep_probability, run_hitting, run_lp, NodeView, ProtocolConfig, ProtocolKind, RunError,
    StopRule,
};
use lpgossip::sim::{EnvelopeKind, SimRun};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(kind: DatasetKind, n: usize, seed: u64) -> (MedProblem, FValue) {
    let pts = DatasetSpec { kind, n_points: n, seed, perturbation: 0.01 }.generate().unwrap();
    let p = MedProblem::new(pts).unwrap();
    let target = sequential_clarkson(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().fvalue().clone();
    (p, target)
}

fn until_termination() -> RunOptions {
    RunOptions { stop: StopRule::Termination, trace: false }
}

#[test]
fn single_node_solves_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<Point2D> = (0..200).map(|_| Point2D::new(rng.gen(), rng.gen())).collect();
    let p = MedProblem::new(pts).unwrap();
    let target = sequential_clarkson(&p, &mut rng).unwrap().fvalue().clone();
    for kind in [ProtocolKind::LowLoad, ProtocolKind::HighLoad] {
        let report = run_lp(&p, &target, &ProtocolConfig::new(kind, 3), 1, 4, &until_termination()).unwrap();
        assert!(report.correct, "{kind:?}");
        assert_eq!(report.outputs, vec![Some(target.clone())]);
        assert!(report.rounds_to_solution.unwrap() >= 1);
    }
}

#[test]
fn pull_phase_spreads_a_single_element() {
    let p = MedProblem::new(vec![Point2D::new(0.5, 0.5)]).unwrap();
    let n = 1024;
    let bound = 4 * 10;
    let mut within = 0;
    for seed in 0..100 {
        let protocol = LowLoad {
            step: LpStep { problem: &p, target: None },
            // sampling is irrelevant here
            pulls: 0,
            window: 40,
            keep: keep_probability(3),
        };
        let nodes = distribute(1, n, seed)
            .into_iter()
            .map(|items| {
                let pull = items.is_empty();
                SamplingNode::new(items, pull)
            })
            .collect();
        let mut sim = SimRun::new(protocol, nodes, seed);
        while sim.round() < 200 && sim.nodes().iter().any(|v| v.in_pull_phase()) {
            sim.step().unwrap();
        }
        let done = sim.nodes().iter().filter_map(|v| v.pull_phase_end()).max().unwrap();
        // the last rooted pushes land one round later
        sim.step().unwrap();
        let originals: usize = sim.nodes().iter().map(|v| v.original_count()).sum();
        assert_eq!(originals, n);
        if done <= bound {
            within += 1;
        }
    }
    assert!(within >= 99, "{within}/100 runs finished the pull phase in {bound} rounds");
}

#[test]
fn extended_low_load_terminates_with_the_optimum() {
    for seed in 0..5 {
        let (p, target) = instance(DatasetKind::Triangle, 64, seed);
        let cfg = ProtocolConfig::new(ProtocolKind::LowLoadExtended, 3);
        let report = run_lp(&p, &target, &cfg, 64, seed, &until_termination()).unwrap();
        assert!(report.correct);
        assert_eq!(report.wrong_outputs(&target), 0);
        assert!(report.outputs.iter().all(Option::is_some));
        assert!(report.pull_phase_done.is_some());
        // originals are never filtered away
        assert!(report.global_originals.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn high_load_terminates_with_the_optimum() {
    for seed in 0..5 {
        let (p, target) = instance(DatasetKind::TripleDisk, 64, seed);
        let cfg = ProtocolConfig::new(ProtocolKind::HighLoad, 3);
        let report = run_lp(&p, &target, &cfg, 64, seed, &until_termination()).unwrap();
        assert!(report.correct);
        assert_eq!(report.wrong_outputs(&target), 0);
        // nothing is ever deleted
        assert!(report.global_multiset.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn acceleration_multiplies_basis_pushes() {
    let (p, target) = instance(DatasetKind::DuoDisk, 64, 9);
    let holders = distribute(64, 64, 9).iter().filter(|v| !v.is_empty()).count();
    for accel in [1, 3] {
        let mut cfg = ProtocolConfig::new(ProtocolKind::HighLoad, 3);
        cfg.accel = accel;
        let report = run_lp(&p, &target, &cfg, 64, 9, &RunOptions { stop: StopRule::FirstSolution, trace: true }).unwrap();
        let trace = report.trace.unwrap();
        let first = trace.iter().filter(|e| e.round == 1 && e.kind == EnvelopeKind::BasisPush).count();
        assert_eq!(first, holders * accel as usize);
        assert!(trace.iter().filter(|e| e.kind == EnvelopeKind::BasisPush).all(|e| e.size_units == 3));
    }
}

#[test]
fn identical_seeds_identical_reports() {
    let (p, target) = instance(DatasetKind::Hull, 128, 2);
    for kind in [ProtocolKind::LowLoad, ProtocolKind::LowLoadExtended, ProtocolKind::HighLoad] {
        let cfg = ProtocolConfig::new(kind, 3);
        let opts = RunOptions { stop: StopRule::Termination, trace: true };
        let a = run_lp(&p, &target, &cfg, 128, 5, &opts).unwrap();
        let b = run_lp(&p, &target, &cfg, 128, 5, &opts).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn round_cap_returns_the_partial_report() {
    let (p, target) = instance(DatasetKind::Triangle, 8, 1);
    let mut cfg = ProtocolConfig::new(ProtocolKind::LowLoad, 3);
    cfg.round_cap = Some(5);
    match run_lp(&p, &target, &cfg, 8, 1, &until_termination()) {
        Err(RunError::RoundCapExceeded { cap, report }) => {
            assert_eq!(cap, 5);
            assert_eq!(report.rounds, 5);
            assert_eq!(report.global_multiset.len(), 5);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let (p, target) = instance(DatasetKind::DuoDisk, 8, 1);
    let opts = RunOptions::default();
    let hitting = ProtocolConfig::new(ProtocolKind::Hitting, 2);
    assert!(matches!(run_lp(&p, &target, &hitting, 8, 1, &opts), Err(RunError::WrongProblem(_))));
    let lp = ProtocolConfig::new(ProtocolKind::LowLoad, 3);
    assert!(matches!(run_lp(&p, &target, &lp, 0, 1, &opts), Err(RunError::NoNodes)));
    let mut zero = lp.clone();
    zero.c_sample = 0;
    assert!(matches!(run_lp(&p, &target, &zero, 8, 1, &opts), Err(RunError::Config(_))));
    let empty = MedProblem::new(Vec::new()).unwrap();
    assert!(matches!(run_lp(&empty, &target, &lp, 8, 1, &opts), Err(RunError::EmptyInstance)));
}

/// `universe` elements; `sets` sets of `width` random members, each also
/// containing one element of a planted hitting set of size `d`.
fn planted(rng: &mut ChaCha8Rng, universe: usize, sets: usize, width: usize, d: usize) -> (SetSystem, Vec<usize>) {
    let plant = index::sample(rng, universe, d).into_vec();
    let mut family: Vec<Vec<usize>> = (0..sets)
        .map(|_| {
            let mut s = index::sample(rng, universe, width).into_vec();
            s.push(plant[rng.gen_range(0..d)]);
            s
        })
        .collect();
    for i in 0..universe {
        if !family.iter().any(|s| s.contains(&i)) {
            let j = rng.gen_range(0..sets);
            family[j].push(i);
        }
    }
    (SetSystem::new(universe, family).unwrap(), plant)
}

#[test]
fn hitting_protocol_returns_a_sample_sized_hitting_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (sys, plant) = planted(&mut rng, 256, 24, 2, 2);
    assert!(sys.is_hitting_set(&plant));
    let r = hitting_sample_size(2, 24);
    let problem = HittingSetProblem::new(sys.clone());
    let cfg = ProtocolConfig::new(ProtocolKind::Hitting, 2);
    for stop in [StopRule::FirstSolution, StopRule::Termination] {
        let report = run_hitting(&problem, &cfg, None, 3, &RunOptions { stop, trace: false }).unwrap();
        assert!(report.correct);
        let set = report.hitting_set.unwrap();
        assert_eq!(set.len(), r);
        let members: Vec<usize> = set.iter().map(|id: &ElementId| id.index()).collect();
        assert!(sys.is_hitting_set(&members));
    }
}

#[test]
fn hitting_protocol_needs_the_hitting_config() {
    let sys = SetSystem::new(3, vec![vec![0, 1], vec![2]]).unwrap();
    let problem = HittingSetProblem::new(sys);
    let cfg = ProtocolConfig::new(ProtocolKind::LowLoad, 2);
    assert!(matches!(
        run_hitting(&problem, &cfg, None, 1, &RunOptions::default()),
        Err(RunError::WrongProblem(ProtocolKind::LowLoad))
    ));
}
