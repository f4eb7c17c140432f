use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pyramid_ga::experiment::{
    aggregate, desk_mall_params, desk_nurse_params, generated_id, load_instances, parse_records, render_records, render_report,
    run_experiment, topology_for, ExperimentConfig, LoadedInstance, LoadedProblem, ProblemKind, ReportFormat,
};
use pyramid_ga::mall::{generate_mall_instance, parse_mall_instance, render_mall_instance, MallProblem};
use pyramid_ga::nurse::{generate_nurse_instance, parse_nurse_instance, render_nurse_instance, NurseProblem};
use pyramid_ga::oracle::{exhaustive_optimum, DEFAULT_LIMIT};
use pyramid_ga::{Error, StrategyKind};

/// Pyramidal genetic algorithm with inter-agent partnering strategies.
#[derive(Debug, Parser)]
#[command(name = "pyramid-ga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write generated instances to a directory.
    Generate(GenerateArgs),
    /// Run an experiment described by a `key = value` config file.
    Run(RunArgs),
    /// Aggregate a stored records file into a report.
    Report(ReportArgs),
    /// Find the optimum of a tiny instance by exhaustive search.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Problem kind: nurse or mall.
    #[arg(long)]
    problem: ProblemKind,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Seed of the first instance; later instances use consecutive seeds.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Constraint tightness in [0, 1].
    #[arg(long)]
    tightness: Option<f64>,
    /// Nurses per ward (nurse only).
    #[arg(long)]
    nurses: Option<usize>,
    /// Size of the shift-pattern pool (nurse only).
    #[arg(long)]
    patterns: Option<usize>,
    /// Admissible patterns per nurse (nurse only).
    #[arg(long)]
    patterns_per_nurse: Option<usize>,
    /// Locations (mall only).
    #[arg(long)]
    locations: Option<usize>,
    /// Areas (mall only).
    #[arg(long)]
    areas: Option<usize>,
    /// Shop types (mall only).
    #[arg(long)]
    types: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Strategies to run, overriding the config: S, R, B, D, J, A or C.
    /// Repeat the flag or give a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<StrategyKind>,
    /// Records file, overriding the config.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Report file, overriding the config; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Report format: text or csv.
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Print the resolved configuration and exit without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Problem kind: nurse or mall.
    #[arg(long)]
    problem: ProblemKind,
    /// Records file written by `run`.
    #[arg(long)]
    records: PathBuf,
    /// Report format: text or csv.
    #[arg(long, default_value = "text")]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Problem kind: nurse or mall.
    #[arg(long)]
    problem: ProblemKind,
    /// Instance file.
    instance: PathBuf,
    /// Largest number of assignments to enumerate.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: u64,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(e: Error) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn data(e: Error) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data(Error::Io(format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| data(Error::Io(format!("{}: {e}", dir.display()))))?;
    }
    fs::write(path, text).map_err(|e| data(Error::Io(format!("{}: {e}", path.display()))))
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    fs::create_dir_all(&args.out).map_err(|e| data(Error::Io(format!("{}: {e}", args.out.display()))))?;
    for i in 0..args.count as u64 {
        let seed = args.seed + i;
        let (text, notes) = match args.problem {
            ProblemKind::Nurse => {
                let mut p = desk_nurse_params();
                p.tightness = args.tightness.unwrap_or(p.tightness);
                p.nurse_count = args.nurses.unwrap_or(p.nurse_count);
                p.pattern_count = args.patterns.unwrap_or(p.pattern_count);
                p.patterns_per_nurse = args.patterns_per_nurse.unwrap_or(p.patterns_per_nurse);
                let g = generate_nurse_instance(p, seed);
                (render_nurse_instance(&g.instance), g.adjustments)
            }
            ProblemKind::Mall => {
                let mut p = desk_mall_params();
                p.tightness = args.tightness.unwrap_or(p.tightness);
                p.location_count = args.locations.unwrap_or(p.location_count);
                p.area_count = args.areas.unwrap_or(p.area_count);
                p.type_count = args.types.unwrap_or(p.type_count);
                let g = generate_mall_instance(p, seed);
                (render_mall_instance(&g.instance), g.adjustments)
            }
        };
        if i == 0 {
            for n in &notes {
                eprintln!("note: {n}");
            }
        }
        let path = args.out.join(format!("{}.txt", generated_id(args.problem, seed)));
        write(&path, &text)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let text = read(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let mut cfg = ExperimentConfig::parse(&text, base).map_err(usage)?;
    if !args.strategy.is_empty() {
        cfg.strategies = args.strategy.clone();
    }
    if args.records.is_some() {
        cfg.records = args.records.clone();
    }
    if args.report.is_some() {
        cfg.report = args.report.clone();
    }
    if let Some(f) = args.format {
        cfg.report_format = f;
    }
    let instances = load_instances(&cfg).map_err(data)?;
    let engine_echo = cfg.engine.echo(&topology_for(&instances[0].problem, &cfg.engine));
    let echo = format!("{}{}", cfg.echo(), engine_echo);
    if args.dry_run {
        print!("{echo}");
        return Ok(());
    }
    eprint!("{echo}");
    let records = run_experiment(&cfg).map_err(data)?;
    let failed = records.iter().filter(|r| r.failed).count();
    if failed > 0 {
        eprintln!("warning: {failed} run(s) failed");
    }
    let total_ms: u128 = records.iter().map(|r| r.wall_ms).sum();
    eprintln!("{} runs, {:.1} s of run time", records.len(), total_ms as f64 / 1000.0);
    if let Some(path) = &cfg.records {
        write(path, &render_records(&records, &echo))?;
    }
    let report = render_report(&aggregate(&records, cfg.problem), cfg.report_format);
    match &cfg.report {
        Some(path) => write(path, &report),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let records = parse_records(&read(&args.records)?).map_err(data)?;
    print!("{}", render_report(&aggregate(&records, args.problem), args.format));
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), Failure> {
    let text = read(&args.instance)?;
    let problem = match args.problem {
        ProblemKind::Nurse => LoadedProblem::Nurse(NurseProblem::new(parse_nurse_instance(&text).map_err(data)?)),
        ProblemKind::Mall => LoadedProblem::Mall(MallProblem::new(parse_mall_instance(&text).map_err(data)?)),
    };
    let loaded = LoadedInstance {
        id: args.instance.display().to_string(),
        problem,
    };
    let result = exhaustive_optimum(loaded.problem.as_problem(), args.limit).map_err(data)?;
    println!("enumerated = {}", result.enumerated);
    println!("feasible = {}", result.feasible);
    match result.best {
        Some((genes, value)) => {
            println!("optimum = {value}");
            let genes: Vec<String> = genes.iter().map(|g| g.to_string()).collect();
            println!("assignment = {}", genes.join(" "));
        }
        None => println!("optimum = none"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
