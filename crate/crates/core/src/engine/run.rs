use std::cell::Cell;
use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::partnering::{place_child_d, select_partner, PartnerContext, StrategyKind, TargetPopulation};
use crate::problem::{Direction, Evaluation, Gene, Problem};

use super::layout::Layout;
use super::operators::{mutate, pick_decomposition, uniform_crossover, RankWheel};
use super::penalty::PenaltyState;
use super::topology::{NodeId, PyramidTopology};
use super::EngineConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    /// Genes over the node's positions, in ascending position order.
    pub genome: Vec<Gene>,
    pub evaluation: Evaluation,
    pub penalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubPopulation {
    pub node: NodeId,
    pub agents: Vec<Agent>,
    pub penalty: PenaltyState,
}

impl SubPopulation {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.penalized).collect()
    }

    /// Index of the best agent by penalized value, violation, then index.
    pub fn best_penalized(&self, direction: Direction) -> usize {
        (0..self.agents.len())
            .min_by(|&i, &j| penalized_order(direction, &self.agents, i, j))
            .expect("sub-population is non-empty")
    }

    /// Index of the best agent by violation first, then raw value.
    pub fn best_lexicographic(&self, direction: Direction) -> usize {
        (0..self.agents.len())
            .min_by(|&i, &j| lexicographic_order(direction, &self.agents, i, j))
            .expect("sub-population is non-empty")
    }

    pub fn best_feasible(&self, direction: Direction) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, a) in self.agents.iter().enumerate() {
            if a.evaluation.is_feasible()
                && best.map_or(true, |b| direction.better(a.evaluation.raw, self.agents[b].evaluation.raw))
            {
                best = Some(i);
            }
        }
        best
    }

    pub fn feasible_count(&self) -> usize {
        self.agents.iter().filter(|a| a.evaluation.is_feasible()).count()
    }
}

fn penalized_order(direction: Direction, agents: &[Agent], i: usize, j: usize) -> Ordering {
    let (a, b) = (&agents[i], &agents[j]);
    direction
        .to_cost(a.penalized)
        .total_cmp(&direction.to_cost(b.penalized))
        .then(a.evaluation.violation.cmp(&b.evaluation.violation))
        .then(i.cmp(&j))
}

fn lexicographic_order(direction: Direction, agents: &[Agent], i: usize, j: usize) -> Ordering {
    let (a, b) = (&agents[i], &agents[j]);
    a.evaluation
        .violation
        .cmp(&b.evaluation.violation)
        .then(direction.to_cost(a.evaluation.raw).total_cmp(&direction.to_cost(b.evaluation.raw)))
        .then(i.cmp(&j))
}

/// Best feasible full assignment seen during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSolution {
    /// Gene per string position.
    pub genes: Vec<Gene>,
    pub raw: f64,
    pub node: NodeId,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    /// Lexicographic best of the top node.
    pub top_raw: f64,
    pub top_violation: u64,
    pub top_feasible: usize,
    pub top_weight: f64,
    pub best_feasible: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Option<BestSolution>,
    pub generations: usize,
    pub evaluations: u64,
    pub history: Vec<GenerationStats>,
}

impl RunResult {
    pub fn feasible(&self) -> bool {
        self.best.is_some()
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.raw)
    }
}

/// Per-generation read-only view of one node.
struct Snapshot {
    values: Vec<f64>,
    wheel: RankWheel,
    best: f64,
    lowest: f64,
}

/// A child before placement; `cell` is set for strategy D assemblies.
struct Child {
    genome: Vec<Gene>,
    cell: Option<usize>,
}

pub struct Engine<'p, P: Problem + ?Sized> {
    problem: &'p P,
    topology: PyramidTopology,
    config: EngineConfig,
    strategy: StrategyKind,
    layout: Layout,
    domains: Vec<Vec<&'p [Gene]>>,
    rng: ChaCha8Rng,
    subpops: Vec<SubPopulation>,
    generation: usize,
    evaluations: Cell<u64>,
    best: Option<BestSolution>,
    top_mark: Option<(u64, f64)>,
    stall: usize,
    history: Vec<GenerationStats>,
}

impl<'p, P: Problem + ?Sized> Engine<'p, P> {
    /// Builds and randomly initializes every sub-population. Strategy `J`
    /// runs on the joined form of `topology`.
    pub fn new(problem: &'p P, topology: &PyramidTopology, config: &EngineConfig, strategy: StrategyKind) -> Result<Self> {
        config.validate()?;
        let topology = if strategy == StrategyKind::J && !topology.is_joined() {
            topology.joined()
        } else {
            topology.clone()
        };
        let layout = Layout::new(problem, &topology);
        let domains: Vec<Vec<&'p [Gene]>> = (0..topology.len())
            .map(|id| layout.positions(id).iter().map(|&p| problem.domain(p)).collect())
            .collect();
        let mut engine = Engine {
            problem,
            topology,
            config: config.clone(),
            strategy,
            layout,
            domains,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            subpops: Vec::new(),
            generation: 0,
            evaluations: Cell::new(0),
            best: None,
            top_mark: None,
            stall: 0,
            history: Vec::new(),
        };
        let mut rng = engine.rng.clone();
        let direction = problem.direction();
        for id in 0..engine.topology.len() {
            let penalty = PenaltyState::with_ceiling(config.penalty_floor, config.penalty_growth, config.penalty_ceiling);
            let size = engine.topology.node(id).population_size;
            let agents = (0..size)
                .map(|_| {
                    let genome: Vec<Gene> = engine.domains[id]
                        .iter()
                        .map(|d| d[rng.gen_range(0..d.len())])
                        .collect();
                    let evaluation = engine.evaluate(id, &genome);
                    Agent {
                        penalized: penalty.penalize(direction, &evaluation),
                        genome,
                        evaluation,
                    }
                })
                .collect();
            engine.subpops.push(SubPopulation {
                node: id,
                agents,
                penalty,
            });
        }
        engine.rng = rng;
        engine.observe();
        Ok(engine)
    }

    pub fn topology(&self) -> &PyramidTopology {
        &self.topology
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn subpopulations(&self) -> &[SubPopulation] {
        &self.subpops
    }

    pub fn subpopulation(&self, id: NodeId) -> &SubPopulation {
        &self.subpops[id]
    }

    pub fn best(&self) -> Option<&BestSolution> {
        self.best.as_ref()
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    /// Generations since the top node last improved.
    pub fn stall(&self) -> usize {
        self.stall
    }

    pub fn is_finished(&self) -> bool {
        self.stall >= self.config.stop_patience || self.generation >= self.config.max_generations
    }

    fn evaluate(&self, node: NodeId, genome: &[Gene]) -> Evaluation {
        self.evaluations.set(self.evaluations.get() + 1);
        self.problem
            .evaluate(self.topology.node(node).measure, self.layout.positions(node), genome)
    }

    /// One generation over every node.
    pub fn step(&mut self) -> Result<()> {
        let direction = self.problem.direction();
        let snapshots: Vec<Snapshot> = self
            .subpops
            .iter()
            .map(|sp| {
                let values = sp.values();
                let wheel = RankWheel::new(&values, direction);
                let best = values[wheel.order()[0]];
                let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
                Snapshot {
                    values,
                    wheel,
                    best,
                    lowest,
                }
            })
            .collect();
        let mut rng = self.rng.clone();
        let mut next = Vec::with_capacity(self.subpops.len());
        for id in 0..self.topology.len() {
            let children = self.breed(id, &snapshots, &mut rng)?;
            next.push(self.replace(id, children));
        }
        self.rng = rng;
        for (sp, agents) in self.subpops.iter_mut().zip(next) {
            sp.agents = agents;
            let evaluations: Vec<Evaluation> = sp.agents.iter().map(|a| a.evaluation).collect();
            sp.penalty.update(direction, &evaluations);
            for a in &mut sp.agents {
                a.penalized = sp.penalty.penalize(direction, &a.evaluation);
            }
        }
        self.generation += 1;
        self.observe();
        Ok(())
    }

    pub fn run(mut self) -> Result<RunResult> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.into_result())
    }

    pub fn into_result(self) -> RunResult {
        RunResult {
            best: self.best,
            generations: self.generation,
            evaluations: self.evaluations.get(),
            history: self.history,
        }
    }

    fn breed(&self, id: NodeId, snaps: &[Snapshot], rng: &mut ChaCha8Rng) -> Result<Vec<Child>> {
        let size = self.subpops[id].len();
        let count = self.config.children_per_generation(size);
        let joins = self.strategy == StrategyKind::J && !self.topology.partners(id).is_empty();
        let assembles = !self.topology.is_leaf(id) || joins;
        let mut best_known = Some(snaps[id].best);
        let mut pending: Option<Vec<Gene>> = None;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut child = if assembles && rng.gen_bool(self.config.assembly_share) {
                if joins {
                    Child {
                        genome: self.cross_node(id, snaps, rng)?,
                        cell: None,
                    }
                } else {
                    self.assemble_child(id, snaps, &mut best_known, rng)?
                }
            } else if let Some(genome) = pending.take() {
                Child { genome, cell: None }
            } else {
                let agents = &self.subpops[id].agents;
                let a = snaps[id].wheel.spin(rng);
                let b = snaps[id].wheel.spin(rng);
                let (c1, c2) =
                    uniform_crossover(&agents[a].genome, &agents[b].genome, self.config.uniform_bias, rng)?;
                pending = Some(c2);
                Child { genome: c1, cell: None }
            };
            mutate(&mut child.genome, self.config.mutation_rate, &self.domains[id], rng);
            out.push(child);
        }
        Ok(out)
    }

    /// Joined-mode pairing: one parent here, one from a former partner node.
    fn cross_node(&self, id: NodeId, snaps: &[Snapshot], rng: &mut ChaCha8Rng) -> Result<Vec<Gene>> {
        let partners = self.topology.partners(id);
        let a = snaps[id].wheel.spin(rng);
        let other = partners[rng.gen_range(0..partners.len())];
        let b = snaps[other].wheel.spin(rng);
        let (c1, _) = uniform_crossover(
            &self.subpops[id].agents[a].genome,
            &self.subpops[other].agents[b].genome,
            self.config.uniform_bias,
            rng,
        )?;
        Ok(c1)
    }

    fn assemble_child(
        &self,
        id: NodeId,
        snaps: &[Snapshot],
        best_known: &mut Option<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Child> {
        let decs = self.topology.decompositions(id);
        let picked = pick_decomposition(&self.topology, id, rng)?;
        let dec = decs
            .iter()
            .position(|d| std::ptr::eq(d, picked))
            .expect("picked from this node");
        let slots = picked;
        let torus = self.config.torus;
        let direction = self.problem.direction();

        let first = snaps[slots[0]].wheel.spin(rng);
        let first_cell = torus.cell_of(first);
        let mut chosen = vec![first; slots.len()];
        let evaluates = self.strategy.evaluates_children();
        if evaluates {
            for i in 1..slots.len() {
                chosen[i] = snaps[slots[i]].wheel.spin(rng);
            }
        }
        let weight = self.subpops[id].penalty;
        for i in 1..slots.len() {
            let target = TargetPopulation {
                values: &snaps[slots[i]].values,
                wheel: &snaps[slots[i]].wheel,
                direction,
            };
            let mut ctx = PartnerContext {
                target,
                first_cell,
                torus,
                best_known: &mut *best_known,
                observed_floor: snaps[id].lowest,
                candidate_count: self.config.candidate_count,
                max_attempts: self.config.acceptance_attempts,
            };
            let partial = &chosen;
            let combined = |candidate: usize| {
                let genes: Vec<&[Gene]> = slots
                    .iter()
                    .enumerate()
                    .map(|(s, &node)| {
                        let agent = if s == i { candidate } else { partial[s] };
                        self.subpops[node].agents[agent].genome.as_slice()
                    })
                    .collect();
                let genome = self.layout.assemble_decomposition(id, dec, &genes);
                weight.penalize(direction, &self.evaluate(id, &genome))
            };
            chosen[i] = select_partner(self.strategy, &mut ctx, rng, combined);
        }
        let genes: Vec<&[Gene]> = slots
            .iter()
            .zip(&chosen)
            .map(|(&node, &agent)| self.subpops[node].agents[agent].genome.as_slice())
            .collect();
        let genome = self.layout.assemble_decomposition(id, dec, &genes);
        let cell = (self.strategy == StrategyKind::D).then(|| place_child_d(torus, first_cell, rng));
        Ok(Child { genome, cell })
    }

    /// Keeps the elite in place and fills every other slot with a child.
    fn replace(&self, id: NodeId, children: Vec<Child>) -> Vec<Agent> {
        let direction = self.problem.direction();
        let old = &self.subpops[id].agents;
        let n = old.len();
        let elite_count = n - children.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| penalized_order(direction, old, i, j));
        let mut elite: Vec<usize> = order[..elite_count].to_vec();
        let lex = self.subpops[id].best_lexicographic(direction);
        if elite_count > 0 && !elite.contains(&lex) {
            elite[elite_count - 1] = lex;
        }
        let mut free = vec![true; n];
        for &e in &elite {
            free[e] = false;
        }
        let mut slot_of = vec![usize::MAX; children.len()];
        let torus = self.config.torus;
        // Worst free slot in a cell, judged by the outgoing agent.
        let worst_in = |cell: usize, free: &[bool]| {
            (cell..n)
                .step_by(torus.cells())
                .filter(|&s| free[s])
                .max_by(|&i, &j| penalized_order(direction, old, i, j))
        };
        for (c, child) in children.iter().enumerate() {
            let Some(cell) = child.cell else { continue };
            let slot = worst_in(cell, &free)
                .or_else(|| torus.neighbors(cell).into_iter().find_map(|nb| worst_in(nb, &free)))
                .or_else(|| free.iter().position(|&f| f));
            if let Some(s) = slot {
                free[s] = false;
                slot_of[c] = s;
            }
        }
        let mut remaining = (0..n).filter(|&s| free[s]);
        for slot in slot_of.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = remaining.next().expect("one free slot per child");
        }

        let mut next: Vec<Option<Agent>> = vec![None; n];
        for &e in &elite {
            next[e] = Some(old[e].clone());
        }
        let penalty = self.subpops[id].penalty;
        for (child, slot) in children.into_iter().zip(slot_of) {
            let evaluation = self.evaluate(id, &child.genome);
            next[slot] = Some(Agent {
                penalized: penalty.penalize(direction, &evaluation),
                genome: child.genome,
                evaluation,
            });
        }
        next.into_iter().map(|a| a.expect("every slot filled")).collect()
    }

    /// Updates the run-level best, the stopping counter and the history.
    fn observe(&mut self) {
        let direction = self.problem.direction();
        for (id, sp) in self.subpops.iter().enumerate() {
            if !self.topology.node(id).measure.full {
                continue;
            }
            if let Some(i) = sp.best_feasible(direction) {
                let a = &sp.agents[i];
                if self.best.as_ref().map_or(true, |b| direction.better(a.evaluation.raw, b.raw)) {
                    let mut genes = vec![0; self.problem.position_count()];
                    for (&p, &g) in self.layout.positions(id).iter().zip(&a.genome) {
                        genes[p] = g;
                    }
                    self.best = Some(BestSolution {
                        genes,
                        raw: a.evaluation.raw,
                        node: id,
                        generation: self.generation,
                    });
                }
            }
        }

        let top = &self.subpops[self.topology.top()];
        let mark = match top.best_feasible(direction) {
            Some(i) => (0, top.agents[i].evaluation.raw),
            None => {
                let e = &top.agents[top.best_lexicographic(direction)].evaluation;
                (e.violation, e.raw)
            }
        };
        // Penalized values are rescaled whenever the weight moves, so progress
        // is judged on (violation, raw) instead.
        let improved = match self.top_mark {
            None => true,
            Some((v, raw)) => mark.0 < v || (mark.0 == v && direction.better(mark.1, raw)),
        };
        if improved {
            self.top_mark = Some(mark);
            if self.generation > 0 {
                self.stall = 0;
            }
        } else {
            self.stall += 1;
        }

        let lex = &top.agents[top.best_lexicographic(direction)];
        self.history.push(GenerationStats {
            generation: self.generation,
            top_raw: lex.evaluation.raw,
            top_violation: lex.evaluation.violation,
            top_feasible: top.feasible_count(),
            top_weight: top.penalty.weight,
            best_feasible: self.best.as_ref().map(|b| b.raw),
        });
    }
}

/// Runs one seeded GA to completion.
pub fn run<P: Problem + ?Sized>(
    problem: &P,
    topology: &PyramidTopology,
    config: &EngineConfig,
    strategy: StrategyKind,
) -> Result<RunResult> {
    Engine::new(problem, topology, config, strategy)?.run()
}
