use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::engine::EngineConfig;
use crate::error::{parse_err, Error, Result};
use crate::mall::MallGenParams;
use crate::nurse::NurseGenParams;
use crate::partnering::{StrategyKind, Torus};

/// Default seed list: one base seed per run, shared by every strategy.
pub const DEFAULT_SEEDS: std::ops::RangeInclusive<u64> = 1..=20;
pub const DEFAULT_INSTANCE_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Nurse,
    Mall,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Nurse => "nurse",
            ProblemKind::Mall => "mall",
        }
    }

    /// Objective recorded for an instance without any feasible run.
    pub fn censored_value(self) -> f64 {
        match self {
            ProblemKind::Nurse => 100.0,
            ProblemKind::Mall => 0.0,
        }
    }

    pub fn objective_label(self) -> &'static str {
        match self {
            ProblemKind::Nurse => "Cost",
            ProblemKind::Mall => "Rent",
        }
    }

    pub fn default_engine(self) -> EngineConfig {
        match self {
            ProblemKind::Nurse => EngineConfig::nurse(),
            ProblemKind::Mall => EngineConfig::mall(),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nurse" => Ok(ProblemKind::Nurse),
            "mall" => Ok(ProblemKind::Mall),
            other => Err(Error::Config(format!("unknown problem `{other}`, expected nurse or mall"))),
        }
    }
}

/// Desk-scale nurse generator settings: 20 nurses with 10 admissible
/// patterns each out of a pool of 120, demand equal to the planted cover.
pub fn desk_nurse_params() -> NurseGenParams {
    NurseGenParams::new(20, 120, 10, 1.0)
}

/// Desk-scale mall generator settings: 30 locations in five areas, ten
/// shop types.
pub fn desk_mall_params() -> MallGenParams {
    MallGenParams::layout(30, 5, 10, 0.8)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    Generated {
        count: usize,
        first_seed: u64,
        nurse: NurseGenParams,
        mall: MallGenParams,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub strategies: Vec<StrategyKind>,
    /// Base seeds; one run per seed per instance and strategy.
    pub seeds: Vec<u64>,
    pub instances: InstanceSource,
    pub engine: EngineConfig,
    pub records: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub report_format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" | "table" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`, expected text or csv"))),
        }
    }
}

impl ExperimentConfig {
    /// The default protocol for a problem: generated desk-scale instances,
    /// strategies S, R, A and C, seeds 1 to 20.
    pub fn new(problem: ProblemKind) -> Self {
        ExperimentConfig {
            problem,
            strategies: vec![StrategyKind::S, StrategyKind::R, StrategyKind::A, StrategyKind::C],
            seeds: DEFAULT_SEEDS.collect(),
            instances: InstanceSource::Generated {
                count: DEFAULT_INSTANCE_COUNT,
                first_seed: 1,
                nurse: desk_nurse_params(),
                mall: desk_mall_params(),
            },
            engine: problem.default_engine(),
            records: None,
            report: None,
            report_format: ReportFormat::Text,
        }
    }

    pub fn runs_per_instance(&self) -> usize {
        self.seeds.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".to_string()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".to_string()));
        }
        match &self.instances {
            InstanceSource::Files(f) if f.is_empty() => {
                return Err(Error::Config("instance list is empty".to_string()))
            }
            InstanceSource::Generated { count: 0, .. } => {
                return Err(Error::Config("instance_count must be positive".to_string()))
            }
            _ => {}
        }
        self.engine.validate()
    }

    /// Parses `key = value` lines. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().to_ascii_lowercase();
            if entries.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
                return Err(parse_err(line_no, format!("duplicate key `{key}`")));
            }
        }
        let (problem_line, problem) = entries
            .remove("problem")
            .ok_or_else(|| Error::Config("missing `problem = nurse|mall`".to_string()))?;
        let problem: ProblemKind = problem.parse().map_err(|e: Error| parse_err(problem_line, e.to_string()))?;
        let mut cfg = ExperimentConfig::new(problem);
        let mut files: Option<Vec<PathBuf>> = None;
        let (mut count, mut first_seed) = (DEFAULT_INSTANCE_COUNT, 1u64);
        let (mut nurse, mut mall) = (desk_nurse_params(), desk_mall_params());

        for (key, (line, value)) in entries {
            let at = |e: Error| match e {
                Error::Parse { .. } => e,
                other => parse_err(line, other.to_string()),
            };
            let e = &mut cfg.engine;
            match key.as_str() {
                "strategies" | "strategy" => cfg.strategies = parse_strategies(&value).map_err(at)?,
                "seeds" => cfg.seeds = parse_seeds(&value).map_err(at)?,
                "instances" => {
                    files = Some(
                        value
                            .split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(|s| base_dir.join(s))
                            .collect(),
                    )
                }
                "instance_count" => count = num(&value).map_err(at)?,
                "instance_seed" => first_seed = num(&value).map_err(at)?,
                "tightness" => {
                    let t: f64 = num(&value).map_err(at)?;
                    nurse.tightness = t;
                    mall.tightness = t;
                }
                "nurses" => nurse.nurse_count = num(&value).map_err(at)?,
                "patterns" => nurse.pattern_count = num(&value).map_err(at)?,
                "patterns_per_nurse" => nurse.patterns_per_nurse = num(&value).map_err(at)?,
                "locations" => mall.location_count = num(&value).map_err(at)?,
                "areas" => mall.area_count = num(&value).map_err(at)?,
                "types" => mall.type_count = num(&value).map_err(at)?,
                "groups" => mall.group_count = num(&value).map_err(at)?,
                "records" => cfg.records = Some(base_dir.join(&value)),
                "report" => cfg.report = Some(base_dir.join(&value)),
                "report_format" => cfg.report_format = value.parse().map_err(at)?,
                "subpop_size" => e.subpop_size = num(&value).map_err(at)?,
                "main_size" => e.main_size = num(&value).map_err(at)?,
                "uniform_bias" => e.uniform_bias = num(&value).map_err(at)?,
                "assembly_share" => e.assembly_share = num(&value).map_err(at)?,
                "mutation_rate" => e.mutation_rate = num(&value).map_err(at)?,
                "replacement_fraction" => e.replacement_fraction = num(&value).map_err(at)?,
                "stop_patience" => e.stop_patience = num(&value).map_err(at)?,
                "max_generations" => e.max_generations = num(&value).map_err(at)?,
                "penalty_floor" => e.penalty_floor = num(&value).map_err(at)?,
                "penalty_growth" => e.penalty_growth = num(&value).map_err(at)?,
                "penalty_ceiling" => e.penalty_ceiling = num(&value).map_err(at)?,
                "candidate_count" => e.candidate_count = num(&value).map_err(at)?,
                "acceptance_attempts" => e.acceptance_attempts = num(&value).map_err(at)?,
                "torus" => e.torus = parse_torus(&value).map_err(at)?,
                _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
            }
        }
        cfg.instances = match files {
            Some(f) => InstanceSource::Files(f),
            None => InstanceSource::Generated {
                count,
                first_seed,
                nurse,
                mall,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical `key = value` form of the experiment settings.
    pub fn echo(&self) -> String {
        let mut out = format!("problem = {}\n", self.problem);
        let strategies: Vec<String> = self.strategies.iter().map(|s| s.to_string()).collect();
        out += &format!("strategies = {}\n", strategies.join(","));
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        out += &format!("seeds = {}\n", seeds.join(","));
        out += &format!("runs_per_instance = {}\n", self.runs_per_instance());
        match &self.instances {
            InstanceSource::Files(f) => {
                let names: Vec<String> = f.iter().map(|p| p.display().to_string()).collect();
                out += &format!("instances = {}\n", names.join(","));
            }
            InstanceSource::Generated {
                count,
                first_seed,
                nurse,
                mall,
            } => {
                out += &format!("instance_count = {count}\ninstance_seed = {first_seed}\n");
                match self.problem {
                    ProblemKind::Nurse => {
                        out += &format!(
                            "nurses = {}\npatterns = {}\npatterns_per_nurse = {}\ntightness = {}\n",
                            nurse.nurse_count, nurse.pattern_count, nurse.patterns_per_nurse, nurse.tightness
                        )
                    }
                    ProblemKind::Mall => {
                        out += &format!(
                            "locations = {}\nareas = {}\ntypes = {}\ngroups = {}\ntightness = {}\n",
                            mall.location_count, mall.area_count, mall.type_count, mall.group_count, mall.tightness
                        )
                    }
                }
            }
        }
        out
    }
}

fn num<T: FromStr>(value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid number `{value}`")))
}

pub fn parse_strategies(value: &str) -> Result<Vec<StrategyKind>> {
    let mut out = Vec::new();
    for token in value.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        // Accept both `S,R,A` and `SRA`.
        let letters: Vec<String> = if token.len() > 1 && token.chars().all(|c| c.is_ascii_alphabetic()) {
            token.chars().map(|c| c.to_string()).collect()
        } else {
            vec![token.to_string()]
        };
        for l in letters {
            let k: StrategyKind = l.parse()?;
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    Ok(out)
}

/// `1..20` (inclusive) or a comma-separated list.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(Error::Config(format!("empty seed range `{value}`")));
        }
        return Ok((a..=b).collect());
    }
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(num)
        .collect()
}

fn parse_torus(value: &str) -> Result<Torus> {
    let (w, h) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("torus must look like 10x10, got `{value}`")))?;
    Ok(Torus {
        width: num(w)?,
        height: num(h)?,
    })
}
