use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::config::{ProblemKind, ReportFormat};
use super::records::RunRecord;
use crate::partnering::StrategyKind;

pub const REPORT_CSV_HEADER: &str = "problem,strategy,objective,feasibility,objective_feasible_only,instances";

/// Per-instance outcome of one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub instance: String,
    pub strategy: StrategyKind,
    pub runs: usize,
    pub feasible_runs: usize,
    /// Best feasible value over the instance's runs.
    pub best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRow {
    pub strategy: StrategyKind,
    /// Mean best value with censored substitutes for infeasible instances.
    pub objective: f64,
    /// Mean best value over instances with at least one feasible run.
    pub objective_feasible_only: Option<f64>,
    /// Mean per-instance share of feasible runs, in `[0, 1]`.
    pub feasibility: f64,
    pub instances: usize,
    pub solved_instances: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub problem: ProblemKind,
    pub rows: Vec<StrategyRow>,
    pub detail: Vec<InstanceSummary>,
}

impl Report {
    pub fn row(&self, strategy: StrategyKind) -> Option<&StrategyRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }
}

/// Aggregates records per strategy and instance. The result does not depend
/// on record order: strategies appear in `S R B D J A C` order and instances
/// in lexicographic order.
pub fn aggregate(records: &[RunRecord], problem: ProblemKind) -> Report {
    let direction = match problem {
        ProblemKind::Nurse => crate::problem::Direction::Minimize,
        ProblemKind::Mall => crate::problem::Direction::Maximize,
    };
    let mut groups: BTreeMap<(StrategyKind, &str), (usize, usize, Option<f64>)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry((r.strategy, r.instance.as_str())).or_insert((0, 0, None));
        entry.0 += 1;
        if let Some(v) = r.value {
            entry.1 += 1;
            if entry.2.map_or(true, |b| direction.better(v, b)) {
                entry.2 = Some(v);
            }
        }
    }
    let strategies: BTreeSet<StrategyKind> = groups.keys().map(|(s, _)| *s).collect();
    let detail: Vec<InstanceSummary> = groups
        .iter()
        .map(|(&(strategy, instance), &(runs, feasible_runs, best))| InstanceSummary {
            instance: instance.to_string(),
            strategy,
            runs,
            feasible_runs,
            best,
        })
        .collect();
    let rows = strategies
        .into_iter()
        .map(|strategy| {
            let mine: Vec<&InstanceSummary> = detail.iter().filter(|d| d.strategy == strategy).collect();
            let n = mine.len() as f64;
            let censored = problem.censored_value();
            let objective = mine.iter().map(|d| d.best.unwrap_or(censored)).sum::<f64>() / n;
            let solved: Vec<f64> = mine.iter().filter_map(|d| d.best).collect();
            let feasibility = mine
                .iter()
                .map(|d| d.feasible_runs as f64 / d.runs as f64)
                .sum::<f64>()
                / n;
            StrategyRow {
                strategy,
                objective,
                objective_feasible_only: (!solved.is_empty()).then(|| solved.iter().sum::<f64>() / solved.len() as f64),
                feasibility,
                instances: mine.len(),
                solved_instances: solved.len(),
            }
        })
        .collect();
    Report { problem, rows, detail }
}

fn percent(share: f64) -> String {
    format!("{}%", (share * 100.0).round() as i64)
}

fn one_decimal(v: f64) -> String {
    let s = format!("{v:.1}");
    // Avoid printing "-0.0".
    if s == "-0.0" {
        "0.0".to_string()
    } else {
        s
    }
}

pub fn render_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_csv(report),
    }
}

fn render_csv(report: &Report) -> String {
    let mut out = format!("{REPORT_CSV_HEADER}\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            report.problem,
            r.strategy,
            one_decimal(r.objective),
            (r.feasibility * 100.0).round() as i64,
            r.objective_feasible_only.map(one_decimal).unwrap_or_default(),
            r.instances
        );
    }
    out
}

fn render_text(report: &Report) -> String {
    let label = report.problem.objective_label();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} ({} censored at {})",
        report.problem,
        label.to_lowercase(),
        one_decimal(report.problem.censored_value())
    );
    let _ = writeln!(out, "{:<8}  {:>8}  {:>4}", "Strategy", label, "Feas");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<8}  {:>8}  {:>4}",
            r.strategy,
            one_decimal(r.objective),
            percent(r.feasibility)
        );
    }
    if report.rows.is_empty() {
        return out;
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{label} over instances with a feasible run");
    let _ = writeln!(out, "{:<8}  {:>8}  {:>6}", "Strategy", label, "Solved");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<8}  {:>8}  {:>6}",
            r.strategy,
            r.objective_feasible_only.map(one_decimal).unwrap_or_else(|| "-".to_string()),
            format!("{}/{}", r.solved_instances, r.instances)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<16}  {:<8}  {:>8}  {:>8}", "Instance", "Strategy", "Best", "Feasible");
    for d in &report.detail {
        let _ = writeln!(
            out,
            "{:<16}  {:<8}  {:>8}  {:>8}",
            d.instance,
            d.strategy,
            d.best.map(one_decimal).unwrap_or_else(|| "-".to_string()),
            format!("{}/{}", d.feasible_runs, d.runs)
        );
    }
    out
}
