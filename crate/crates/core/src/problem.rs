//! The adapter surface the pyramid engine is generic over.

use std::fmt;

/// A single decision value: a shift-pattern id (nurses) or a shop-type id (mall).
pub type Gene = u32;

/// Optimization direction of a problem's raw objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// True when `a` is at least as good as `b`.
    pub fn at_least_as_good(self, a: f64, b: f64) -> bool {
        a == b || self.better(a, b)
    }

    /// Penalized value for a raw objective and a constraint violation.
    pub fn penalize(self, raw: f64, weight: f64, violation: u64) -> f64 {
        match self {
            Direction::Minimize => raw + weight * violation as f64,
            Direction::Maximize => raw - weight * violation as f64,
        }
    }

    /// Maps a value onto a "lower is better" scale.
    pub fn to_cost(self, value: f64) -> f64 {
        match self {
            Direction::Minimize => value,
            Direction::Maximize => -value,
        }
    }
}

/// A set of part ids (nurse grades or mall areas) stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartSet(u32);

impl PartSet {
    pub const EMPTY: PartSet = PartSet(0);

    pub fn from_parts<I: IntoIterator<Item = usize>>(parts: I) -> Self {
        let mut bits = 0u32;
        for p in parts {
            assert!(p < 32, "part id {p} out of range");
            bits |= 1 << p;
        }
        PartSet(bits)
    }

    /// All parts `0..count`.
    pub fn all(count: usize) -> Self {
        assert!(count <= 32);
        if count == 32 {
            PartSet(u32::MAX)
        } else {
            PartSet((1u32 << count) - 1)
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, part: usize) -> bool {
        part < 32 && self.0 & (1 << part) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: PartSet) -> PartSet {
        PartSet(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: PartSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&p| self.contains(p))
    }
}

impl fmt::Debug for PartSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Which objective a node evaluates its genomes with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measure {
    pub parts: PartSet,
    /// `true` for the original objective, `false` for a substitute
    /// (sub-)fitness restricted to `parts`.
    pub full: bool,
}

impl Measure {
    pub fn substitute(parts: PartSet) -> Self {
        Measure { parts, full: false }
    }

    pub fn original(parts: PartSet) -> Self {
        Measure { parts, full: true }
    }
}

/// Raw objective value plus constraint violation units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub raw: f64,
    pub violation: u64,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0
    }
}

/// A multiple-choice assignment problem split into parts.
///
/// Positions are the string elements (nurses, locations); every position
/// belongs to exactly one part. A genome for a part set lists one gene per
/// position of those parts, in ascending position order.
pub trait Problem: Send + Sync {
    fn direction(&self) -> Direction;

    fn part_count(&self) -> usize;

    fn position_count(&self) -> usize;

    fn part_of(&self, position: usize) -> usize;

    /// Admissible gene values at a position.
    fn domain(&self, position: usize) -> &[Gene];

    /// Evaluates `genes` laid out over `positions` (ascending) under `measure`.
    fn evaluate(&self, measure: Measure, positions: &[usize], genes: &[Gene]) -> Evaluation;

    /// Ascending positions covered by a part set.
    fn positions_of(&self, parts: PartSet) -> Vec<usize> {
        (0..self.position_count())
            .filter(|&p| parts.contains(self.part_of(p)))
            .collect()
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn direction(&self) -> Direction {
        (**self).direction()
    }
    fn part_count(&self) -> usize {
        (**self).part_count()
    }
    fn position_count(&self) -> usize {
        (**self).position_count()
    }
    fn part_of(&self, position: usize) -> usize {
        (**self).part_of(position)
    }
    fn domain(&self, position: usize) -> &[Gene] {
        (**self).domain(position)
    }
    fn evaluate(&self, measure: Measure, positions: &[usize], genes: &[Gene]) -> Evaluation {
        (**self).evaluate(measure, positions, genes)
    }
}
