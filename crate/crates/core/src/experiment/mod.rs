//! Seeded batch experiments, run records and censored aggregation.

mod config;
mod records;
mod report;

pub use config::{
    desk_mall_params, desk_nurse_params, parse_seeds, parse_strategies, ExperimentConfig, InstanceSource,
    ProblemKind, ReportFormat, DEFAULT_INSTANCE_COUNT, DEFAULT_SEEDS,
};
pub use records::{parse_records, render_records, RunRecord, RECORD_HEADER};
pub use report::{aggregate, render_report, InstanceSummary, Report, StrategyRow, REPORT_CSV_HEADER};

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;

use crate::engine::{build_mall_topology, build_nurse_topology, run, EngineConfig, PyramidTopology};
use crate::error::{Error, Result};
use crate::mall::{generate_mall_instance, parse_mall_instance, MallProblem};
use crate::nurse::{generate_nurse_instance, parse_nurse_instance, NurseProblem};
use crate::partnering::StrategyKind;
use crate::problem::Problem;

/// Environment variable capping run-level parallelism; `0` or `1` runs
/// sequentially. When unset, one worker per available core is used.
pub const THREADS_ENV: &str = "PYRAMID_GA_THREADS";

pub enum LoadedProblem {
    Nurse(NurseProblem),
    Mall(MallProblem),
}

impl LoadedProblem {
    pub fn as_problem(&self) -> &dyn Problem {
        match self {
            LoadedProblem::Nurse(p) => p,
            LoadedProblem::Mall(p) => p,
        }
    }
}

pub struct LoadedInstance {
    pub id: String,
    pub problem: LoadedProblem,
}

/// Topology for a problem with the configured sub-population sizes.
pub fn topology_for(problem: &LoadedProblem, engine: &EngineConfig) -> PyramidTopology {
    match problem {
        LoadedProblem::Nurse(_) => crate::engine::nurse_topology(engine.subpop_size, engine.main_size),
        LoadedProblem::Mall(p) => {
            crate::engine::mall_topology(p.instance().area_count(), engine.subpop_size, engine.main_size)
        }
    }
}

/// Published topology for a problem kind.
pub fn default_topology(kind: ProblemKind) -> PyramidTopology {
    match kind {
        ProblemKind::Nurse => build_nurse_topology(crate::engine::NURSE_MAIN_SIZE),
        ProblemKind::Mall => build_mall_topology(crate::engine::MALL_MAIN_SIZE),
    }
}

pub fn generated_id(kind: ProblemKind, seed: u64) -> String {
    format!("{kind}-{seed:03}")
}

pub fn load_instances(cfg: &ExperimentConfig) -> Result<Vec<LoadedInstance>> {
    match &cfg.instances {
        InstanceSource::Generated {
            count,
            first_seed,
            nurse,
            mall,
        } => Ok((0..*count as u64)
            .map(|i| {
                let seed = first_seed + i;
                let problem = match cfg.problem {
                    ProblemKind::Nurse => {
                        LoadedProblem::Nurse(NurseProblem::new(generate_nurse_instance(*nurse, seed).instance))
                    }
                    ProblemKind::Mall => {
                        LoadedProblem::Mall(MallProblem::new(generate_mall_instance(*mall, seed).instance))
                    }
                };
                LoadedInstance {
                    id: generated_id(cfg.problem, seed),
                    problem,
                }
            })
            .collect()),
        InstanceSource::Files(paths) => {
            let mut out: Vec<LoadedInstance> = Vec::new();
            for path in paths {
                let name = path.display().to_string();
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("instance {name}: {e}")))?;
                let named = |e: Error| Error::Validation(format!("instance {name}: {e}"));
                let problem = match cfg.problem {
                    ProblemKind::Nurse => LoadedProblem::Nurse(NurseProblem::new(parse_nurse_instance(&text).map_err(named)?)),
                    ProblemKind::Mall => LoadedProblem::Mall(MallProblem::new(parse_mall_instance(&text).map_err(named)?)),
                };
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| name.clone());
                if id.contains(',') {
                    return Err(Error::Config(format!("instance id `{id}` contains a comma")));
                }
                if out.iter().any(|o| o.id == id) {
                    return Err(Error::Config(format!("duplicate instance id `{id}`")));
                }
                out.push(LoadedInstance { id, problem });
            }
            Ok(out)
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Engine seed for a run. Depends on the base seed and the instance only, so
/// every strategy starts from the same initial populations.
pub fn derive_seed(base: u64, instance: &str) -> u64 {
    let mut z = base ^ fnv1a(instance.as_bytes());
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Worker count from [`THREADS_ENV`]; `None` means use the default pool.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| Some(n.max(1)))
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
    }
}

/// Runs one seeded GA and turns the outcome into a record. Panics and
/// engine errors become failed records.
pub fn run_one(
    instance: &LoadedInstance,
    topology: &PyramidTopology,
    engine: &EngineConfig,
    strategy: StrategyKind,
    base_seed: u64,
) -> RunRecord {
    let start = Instant::now();
    let config = EngineConfig {
        seed: derive_seed(base_seed, &instance.id),
        ..engine.clone()
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        run(instance.problem.as_problem(), topology, &config, strategy)
    }));
    let (value, generations, failed) = match outcome {
        Ok(Ok(result)) => (result.best_value(), result.generations, false),
        Ok(Err(_)) | Err(_) => (None, 0, true),
    };
    RunRecord {
        instance: instance.id.clone(),
        strategy,
        seed: base_seed,
        value,
        generations,
        failed,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// One record per (instance, strategy, seed), in that order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let instances = load_instances(cfg)?;
    let topologies: Vec<PyramidTopology> = instances
        .iter()
        .map(|i| topology_for(&i.problem, &cfg.engine))
        .collect();
    let jobs: Vec<(usize, StrategyKind, u64)> = (0..instances.len())
        .flat_map(|i| {
            cfg.strategies
                .iter()
                .flat_map(move |&s| cfg.seeds.iter().map(move |&seed| (i, s, seed)))
        })
        .collect();
    let work = |&(i, s, seed): &(usize, StrategyKind, u64)| run_one(&instances[i], &topologies[i], &cfg.engine, s, seed);
    match thread_cap()? {
        Some(1) => Ok(jobs.iter().map(work).collect()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(|| jobs.par_iter().map(work).collect()))
        }
        None => Ok(jobs.par_iter().map(work).collect()),
    }
}
