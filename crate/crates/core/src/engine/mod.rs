//! The hierarchical distributed GA.
//!
//! Each node of a [`PyramidTopology`] holds a fixed-size sub-population of
//! partial genomes. Every generation, each node keeps its best agents and
//! replaces the rest with children made either by uniform crossover inside
//! the node or, for non-leaf nodes, by assembling parents drawn from the
//! nodes of one of its decompositions.

mod layout;
mod operators;
mod penalty;
mod run;
mod topology;

pub use layout::Layout;
pub use operators::{mutate, pick_decomposition, rank_roulette, uniform_crossover, RankWheel};
pub use penalty::PenaltyState;
pub use run::{run, Agent, BestSolution, Engine, GenerationStats, RunResult, SubPopulation};
pub use topology::{
    build_mall_topology, build_nurse_topology, mall_topology, nurse_topology, Decomposition, Node, NodeId,
    PyramidTopology, DEFAULT_SUBPOP_SIZE, MALL_MAIN_SIZE, NURSE_MAIN_SIZE,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::partnering::{Torus, ACCEPTANCE_ATTEMPTS, CANDIDATE_COUNT};

/// Engine parameters. The defaults reproduce the published setup.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub subpop_size: usize,
    pub main_size: usize,
    /// Probability that a uniform-crossover gene comes from the first parent.
    pub uniform_bias: f64,
    /// Share of children at non-leaf nodes made by assembly.
    pub assembly_share: f64,
    pub mutation_rate: f64,
    /// Fraction of each sub-population replaced per generation.
    pub replacement_fraction: f64,
    /// Generations without top-node improvement before stopping.
    pub stop_patience: usize,
    pub max_generations: usize,
    pub seed: u64,
    pub penalty_floor: f64,
    pub penalty_growth: f64,
    pub penalty_ceiling: f64,
    pub candidate_count: usize,
    pub acceptance_attempts: usize,
    pub torus: Torus,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            subpop_size: DEFAULT_SUBPOP_SIZE,
            main_size: NURSE_MAIN_SIZE,
            uniform_bias: 0.66,
            assembly_share: 0.5,
            mutation_rate: 0.01,
            replacement_fraction: 0.9,
            stop_patience: 50,
            max_generations: 2000,
            seed: 0,
            penalty_floor: 1.0,
            penalty_growth: 2.0,
            penalty_ceiling: 1e6,
            candidate_count: CANDIDATE_COUNT,
            acceptance_attempts: ACCEPTANCE_ATTEMPTS,
            torus: Torus::default(),
        }
    }
}

impl EngineConfig {
    pub fn nurse() -> Self {
        EngineConfig::default()
    }

    pub fn mall() -> Self {
        EngineConfig {
            main_size: MALL_MAIN_SIZE,
            ..EngineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must lie in [0, 1]")))
            }
        };
        prob("uniform_bias", self.uniform_bias)?;
        prob("assembly_share", self.assembly_share)?;
        prob("mutation_rate", self.mutation_rate)?;
        if !(self.replacement_fraction > 0.0 && self.replacement_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "replacement_fraction = {} must lie in (0, 1]",
                self.replacement_fraction
            )));
        }
        if self.subpop_size == 0 || self.main_size == 0 {
            return Err(Error::Config("population sizes must be positive".to_string()));
        }
        if self.stop_patience == 0 || self.max_generations == 0 {
            return Err(Error::Config("stop_patience and max_generations must be positive".to_string()));
        }
        if !(self.penalty_floor > 0.0) || !(self.penalty_growth > 1.0) {
            return Err(Error::Config("penalty_floor must be > 0 and penalty_growth > 1".to_string()));
        }
        if !(self.penalty_ceiling >= self.penalty_floor) {
            return Err(Error::Config("penalty_ceiling must be at least penalty_floor".to_string()));
        }
        if self.candidate_count == 0 || self.acceptance_attempts == 0 {
            return Err(Error::Config("candidate_count and acceptance_attempts must be positive".to_string()));
        }
        if self.torus.cells() == 0 {
            return Err(Error::Config("torus must have at least one cell".to_string()));
        }
        Ok(())
    }

    /// Children created per generation in a sub-population of `n`.
    pub fn children_per_generation(&self, n: usize) -> usize {
        ((self.replacement_fraction * n as f64 + 1e-9).floor() as usize).min(n)
    }

    /// `key = value` dump of the configuration and the population split.
    /// The seed is left out: experiments derive one per run.
    pub fn echo(&self, topology: &PyramidTopology) -> String {
        let mut out = String::new();
        let split: Vec<String> = topology
            .nodes()
            .iter()
            .map(|n| format!("{}:{}", n.label, n.population_size))
            .collect();
        let lower: Vec<usize> = topology
            .nodes()
            .iter()
            .enumerate()
            .filter(|(id, _)| *id != topology.top())
            .map(|(_, n)| n.population_size)
            .collect();
        let uniform_lower = lower.windows(2).all(|w| w[0] == w[1]);
        let _ = writeln!(out, "total_population = {}", topology.total_population());
        if uniform_lower && !lower.is_empty() {
            let _ = writeln!(
                out,
                "population_split = {}x{}+{}",
                lower.len(),
                lower[0],
                topology.node(topology.top()).population_size
            );
        }
        let _ = writeln!(out, "sub_populations = {}", split.join(" "));
        let _ = writeln!(out, "subpop_size = {}", self.subpop_size);
        let _ = writeln!(out, "main_size = {}", self.main_size);
        let _ = writeln!(out, "uniform_bias = {}", self.uniform_bias);
        let _ = writeln!(out, "assembly_share = {}", self.assembly_share);
        let _ = writeln!(out, "mutation_rate = {}", self.mutation_rate);
        let _ = writeln!(out, "replacement_fraction = {}", self.replacement_fraction);
        let _ = writeln!(out, "stop_patience = {}", self.stop_patience);
        let _ = writeln!(out, "max_generations = {}", self.max_generations);
        let _ = writeln!(out, "penalty_floor = {}", self.penalty_floor);
        let _ = writeln!(out, "penalty_growth = {}", self.penalty_growth);
        let _ = writeln!(out, "penalty_ceiling = {}", self.penalty_ceiling);
        let _ = writeln!(out, "candidate_count = {}", self.candidate_count);
        let _ = writeln!(out, "acceptance_attempts = {}", self.acceptance_attempts);
        let _ = writeln!(out, "torus = {}x{}", self.torus.width, self.torus.height);
        out
    }
}
