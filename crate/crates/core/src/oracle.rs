//! Exhaustive search over tiny instances, used to produce reference optima.

use crate::error::{Error, Result};
use crate::problem::{Gene, Measure, PartSet, Problem};

/// Largest search space [`exhaustive_optimum`] accepts by default.
pub const DEFAULT_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best feasible assignment (gene per position) and its raw value.
    pub best: Option<(Vec<Gene>, f64)>,
    /// Feasible assignments found.
    pub feasible: u64,
    pub enumerated: u64,
}

/// Size of the full assignment space, or `None` on overflow.
pub fn search_space<P: Problem + ?Sized>(problem: &P) -> Option<u64> {
    (0..problem.position_count()).try_fold(1u64, |acc, p| acc.checked_mul(problem.domain(p).len() as u64))
}

/// Enumerates every full assignment in lexicographic domain order and keeps
/// the first best feasible one under the original objective.
pub fn exhaustive_optimum<P: Problem + ?Sized>(problem: &P, limit: u64) -> Result<OracleResult> {
    let n = problem.position_count();
    let size = search_space(problem).filter(|&s| s <= limit).ok_or_else(|| {
        Error::Config(format!("search space exceeds the oracle limit of {limit} assignments"))
    })?;
    let direction = problem.direction();
    let positions: Vec<usize> = (0..n).collect();
    let measure = Measure::original(PartSet::all(problem.part_count()));
    let domains: Vec<&[Gene]> = positions.iter().map(|&p| problem.domain(p)).collect();
    let mut digits = vec![0usize; n];
    let mut genes: Vec<Gene> = domains.iter().map(|d| d[0]).collect();
    let mut result = OracleResult {
        best: None,
        feasible: 0,
        enumerated: 0,
    };
    if size == 0 {
        return Ok(result);
    }
    loop {
        let e = problem.evaluate(measure, &positions, &genes);
        result.enumerated += 1;
        if e.is_feasible() {
            result.feasible += 1;
            if result.best.as_ref().map_or(true, |(_, v)| direction.better(e.raw, *v)) {
                result.best = Some((genes.clone(), e.raw));
            }
        }
        // Odometer increment, last position fastest.
        let mut p = n;
        loop {
            if p == 0 {
                return Ok(result);
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < domains[p].len() {
                genes[p] = domains[p][digits[p]];
                break;
            }
            digits[p] = 0;
            genes[p] = domains[p][0];
        }
    }
}
