mod common;

use std::sync::atomic::{AtomicU64, Ordering};

use pyramid_ga::engine::{mall_topology, nurse_topology, run, Engine, EngineConfig, Layout, Node, PyramidTopology};
use pyramid_ga::mall::MallProblem;
use pyramid_ga::nurse::{Nurse, NurseInstance, NurseInstanceParts, NurseProblem, ShiftPattern};
use pyramid_ga::{Direction, Evaluation, Gene, Measure, PartSet, Problem, StrategyKind};

const ALL: [StrategyKind; 7] = [
    StrategyKind::S,
    StrategyKind::R,
    StrategyKind::B,
    StrategyKind::D,
    StrategyKind::J,
    StrategyKind::A,
    StrategyKind::C,
];

fn small_config(seed: u64) -> EngineConfig {
    EngineConfig {
        subpop_size: 30,
        main_size: 60,
        seed,
        ..EngineConfig::nurse()
    }
}

fn nurse_problem(seed: u64) -> NurseProblem {
    let params = pyramid_ga::nurse::NurseGenParams::new(12, 40, 8, 0.9);
    NurseProblem::new(pyramid_ga::nurse::generate_nurse_instance(params, seed).instance)
}

fn mall_problem(seed: u64) -> MallProblem {
    let params = pyramid_ga::mall::MallGenParams::layout(20, 4, 6, 0.8);
    MallProblem::new(pyramid_ga::mall::generate_mall_instance(params, seed).instance)
}

fn lex_key(direction: Direction, e: &Evaluation) -> (u64, f64) {
    (e.violation, direction.to_cost(e.raw))
}

fn lex_best(direction: Direction, agents: &[pyramid_ga::engine::Agent]) -> (u64, f64) {
    agents
        .iter()
        .map(|a| lex_key(direction, &a.evaluation))
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)))
        .unwrap()
}

/// Steps an engine and checks per-node invariants after every generation.
fn check_invariants<P: Problem>(problem: &P, topology: &PyramidTopology, strategy: StrategyKind, seed: u64) {
    let config = small_config(seed);
    let mut engine = Engine::new(problem, topology, &config, strategy).unwrap();
    let direction = problem.direction();
    let sizes: Vec<usize> = engine.subpopulations().iter().map(|s| s.len()).collect();
    for _ in 0..25 {
        let before: Vec<(u64, f64)> = engine.subpopulations().iter().map(|s| lex_best(direction, &s.agents)).collect();
        engine.step().unwrap();
        for (id, sp) in engine.subpopulations().iter().enumerate() {
            assert_eq!(sp.len(), sizes[id], "{strategy}: node {id} size changed");
            let want = problem.positions_of(engine.topology().node(id).parts).len();
            for a in &sp.agents {
                assert_eq!(a.genome.len(), want);
                let again = problem.evaluate(engine.topology().node(id).measure, engine.layout().positions(id), &a.genome);
                assert_eq!(again, a.evaluation);
            }
            let now = lex_best(direction, &sp.agents);
            let old = before[id];
            assert!(
                now.0 < old.0 || (now.0 == old.0 && now.1 <= old.1),
                "{strategy}: node {id} best went from {old:?} to {now:?}"
            );
            assert!(sp.penalty.weight >= sp.penalty.floor);
        }
    }
}

#[test]
fn nurse_populations_are_conserved_and_elitist() {
    let p = nurse_problem(3);
    for s in ALL {
        check_invariants(&p, &nurse_topology(30, 60), s, 7);
    }
}

#[test]
fn mall_populations_are_conserved_and_elitist() {
    let p = mall_problem(5);
    for s in ALL {
        check_invariants(&p, &mall_topology(4, 30, 60), s, 8);
    }
}

#[test]
fn same_seed_gives_identical_runs() {
    let p = nurse_problem(4);
    let topo = nurse_topology(30, 60);
    for s in ALL {
        let config = EngineConfig { max_generations: 40, ..small_config(99) };
        let a = run(&p, &topo, &config, s).unwrap();
        let b = run(&p, &topo, &config, s).unwrap();
        assert_eq!(a, b, "{s}");
    }
}

#[test]
fn without_assembly_the_strategy_is_irrelevant() {
    let p = mall_problem(6);
    let topo = mall_topology(4, 30, 60);
    let config = EngineConfig {
        assembly_share: 0.0,
        max_generations: 30,
        ..small_config(5)
    };
    let base = run(&p, &topo, &config, StrategyKind::S).unwrap();
    for s in [StrategyKind::R, StrategyKind::B, StrategyKind::D, StrategyKind::A, StrategyKind::C] {
        assert_eq!(run(&p, &topo, &config, s).unwrap(), base, "{s}");
    }
}

#[test]
fn stop_counter_restarts_on_each_improvement() {
    let p = nurse_problem(9);
    let topo = nurse_topology(30, 60);
    for s in [StrategyKind::S, StrategyKind::C] {
        let config = EngineConfig {
            stop_patience: 15,
            ..small_config(2)
        };
        let result = run(&p, &topo, &config, s).unwrap();
        let marks: Vec<(u64, f64)> = result
            .history
            .iter()
            .map(|h| (h.top_violation, h.top_raw))
            .collect();
        let mut last = 0;
        for g in 1..marks.len() {
            let (v, r) = marks[g];
            let (bv, br) = marks[last];
            if v < bv || (v == bv && r < br) {
                last = g;
            }
        }
        assert!(result.generations < config.max_generations);
        assert_eq!(result.generations, last + config.stop_patience, "{s}");
    }
}

/// Wraps a problem and counts evaluations under substitute measures.
struct Counting<P> {
    inner: P,
    substitute_calls: AtomicU64,
    full_calls: AtomicU64,
}

impl<P: Problem> Problem for Counting<P> {
    fn direction(&self) -> Direction {
        self.inner.direction()
    }
    fn part_count(&self) -> usize {
        self.inner.part_count()
    }
    fn position_count(&self) -> usize {
        self.inner.position_count()
    }
    fn part_of(&self, position: usize) -> usize {
        self.inner.part_of(position)
    }
    fn domain(&self, position: usize) -> &[Gene] {
        self.inner.domain(position)
    }
    fn evaluate(&self, measure: Measure, positions: &[usize], genes: &[Gene]) -> Evaluation {
        if measure.full {
            self.full_calls.fetch_add(1, Ordering::Relaxed);
        } else {
            self.substitute_calls.fetch_add(1, Ordering::Relaxed);
        }
        self.inner.evaluate(measure, positions, genes)
    }
}

fn counting<P>(inner: P) -> Counting<P> {
    Counting {
        inner,
        substitute_calls: AtomicU64::new(0),
        full_calls: AtomicU64::new(0),
    }
}

#[test]
fn joined_runs_never_use_a_substitute_measure() {
    let nurse = counting(nurse_problem(1));
    let config = EngineConfig { max_generations: 20, ..small_config(1) };
    run(&nurse, &nurse_topology(30, 60), &config, StrategyKind::J).unwrap();
    assert_eq!(nurse.substitute_calls.load(Ordering::Relaxed), 0);
    assert!(nurse.full_calls.load(Ordering::Relaxed) > 0);

    let mall = counting(mall_problem(1));
    run(&mall, &mall_topology(4, 30, 60), &config, StrategyKind::J).unwrap();
    assert_eq!(mall.substitute_calls.load(Ordering::Relaxed), 0);

    // The pyramid proper does use them.
    let plain = counting(nurse_problem(1));
    run(&plain, &nurse_topology(30, 60), &config, StrategyKind::S).unwrap();
    assert!(plain.substitute_calls.load(Ordering::Relaxed) > 0);
}

/// One grade-1 nurse with `costs.len()` patterns and no demand.
fn single_nurse(costs: &[u32]) -> NurseInstance {
    let patterns: Vec<ShiftPattern> = (0..costs.len())
        .map(|i| ShiftPattern::from_mask(1 << (i % 7)).unwrap())
        .collect();
    NurseInstance::from_parts(NurseInstanceParts {
        patterns,
        nurses: vec![Nurse {
            grade: 1,
            admissible: (0..costs.len() as Gene).collect(),
        }],
        costs: costs.iter().enumerate().map(|(p, &c)| (0, p, c)).collect(),
        ..Default::default()
    })
    .unwrap()
}

#[test]
fn unconstrained_single_nurse_reaches_the_optimum_quickly() {
    let costs = [40, 17, 93, 5, 60, 5, 71, 88, 12, 30];
    let problem = NurseProblem::new(single_nurse(&costs));
    let optimum = common::nurse_optimum(problem.instance()).unwrap();
    assert_eq!(optimum, 5.0);
    for seed in 0..5 {
        let result = run(&problem, &nurse_topology(100, 300), &EngineConfig { seed, ..EngineConfig::nurse() }, StrategyKind::S)
            .unwrap();
        let best = result.best.unwrap();
        assert_eq!(best.raw, optimum);
        assert!(best.generation < 50, "found at {}", best.generation);
    }
}

#[test]
fn joined_single_nurse_matches_a_single_population_ga() {
    let costs = [40, 17, 93, 8, 60, 11, 71, 88, 12, 30, 9, 64];
    let problem = NurseProblem::new(single_nurse(&costs));
    let flat = PyramidTopology::new(
        vec![Node {
            label: "all".to_string(),
            parts: PartSet::all(3),
            measure: Measure::original(PartSet::all(3)),
            population_size: 300,
        }],
        vec![vec![]],
        0,
    )
    .unwrap();
    assert_eq!(Layout::new(&problem, &flat).genome_len(0), 1);
    for seed in 0..5 {
        let config = EngineConfig { seed, ..EngineConfig::nurse() };
        let joined = run(&problem, &nurse_topology(100, 300), &config, StrategyKind::J).unwrap();
        let single = run(&problem, &flat, &config, StrategyKind::S).unwrap();
        assert_eq!(joined.best_value(), single.best_value());
        assert_eq!(joined.best_value(), Some(8.0));
    }
}
