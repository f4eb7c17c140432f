//! Weekly nurse rostering as a multiple-choice assignment problem.
//!
//! Each nurse works exactly one shift pattern out of an admissible list. A
//! pattern covers up to fourteen shifts (seven days then seven nights) and is
//! either day-only or night-only. Demand is cumulative over grade bands: a
//! nurse of grade `g` counts toward every band `s >= g`.

mod format;
mod generate;

pub use format::{parse_nurse_instance, render_nurse_instance};
pub use generate::{generate_nurse_instance, GeneratedNurse, NurseGenParams};

use std::fmt;

use crate::error::{Error, Result};
use crate::problem::{Direction, Evaluation, Gene, Measure, PartSet, Problem};

pub const SHIFTS: usize = 14;
pub const GRADES: usize = 3;
pub const MAX_PATTERNS: usize = 411;
pub const MAX_COST: u32 = 100;

const DAY_BITS: u16 = 0b000_0000_0111_1111;
const NIGHT_BITS: u16 = 0b11_1111_1000_0000;
const NO_COST: u8 = u8::MAX;

/// A fourteen-slot work mask: bits 0..7 are days, bits 7..14 are nights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftPattern(u16);

impl ShiftPattern {
    pub fn from_mask(mask: u16) -> Result<Self> {
        if mask & !(DAY_BITS | NIGHT_BITS) != 0 {
            return Err(Error::Validation(format!("mask {mask:#x} has bits beyond shift 13")));
        }
        if mask & DAY_BITS != 0 && mask & NIGHT_BITS != 0 {
            return Err(Error::Validation(
                "pattern mixes day and night shifts".to_string(),
            ));
        }
        Ok(ShiftPattern(mask))
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn works(self, shift: usize) -> bool {
        self.0 & (1 << shift) != 0
    }

    pub fn is_night(self) -> bool {
        self.0 & NIGHT_BITS != 0
    }

    pub fn shifts(self) -> impl Iterator<Item = usize> {
        (0..SHIFTS).filter(move |&k| self.works(k))
    }
}

/// Non-empty subset of the grades {1, 2, 3}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GradeSet(u8);

impl GradeSet {
    pub const ALL: GradeSet = GradeSet(0b111);

    pub fn new(grades: &[u8]) -> Result<Self> {
        let mut bits = 0u8;
        for &g in grades {
            if !(1..=GRADES as u8).contains(&g) {
                return Err(Error::Contract(format!("grade {g} is not in {{1,2,3}}")));
            }
            bits |= 1 << (g - 1);
        }
        if bits == 0 {
            return Err(Error::Contract("grade set must be non-empty".to_string()));
        }
        Ok(GradeSet(bits))
    }

    pub fn single(grade: u8) -> Result<Self> {
        Self::new(&[grade])
    }

    pub fn from_parts(parts: PartSet) -> Result<Self> {
        let grades: Vec<u8> = parts.iter().map(|p| p as u8 + 1).collect();
        Self::new(&grades)
    }

    pub fn contains(self, grade: u8) -> bool {
        (1..=GRADES as u8).contains(&grade) && self.0 & (1 << (grade - 1)) != 0
    }

    pub fn grades(self) -> impl Iterator<Item = u8> {
        (1..=GRADES as u8).filter(move |&g| self.contains(g))
    }

    pub fn to_parts(self) -> PartSet {
        PartSet::from_parts(self.grades().map(|g| g as usize - 1))
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for GradeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.grades()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nurse {
    pub grade: u8,
    /// Sorted admissible pattern ids.
    pub admissible: Vec<Gene>,
}

/// Validated nurse rostering data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NurseInstance {
    patterns: Vec<ShiftPattern>,
    nurses: Vec<Nurse>,
    /// Dense `nurse * pattern_count + pattern` cost table, `NO_COST` when inadmissible.
    costs: Vec<u8>,
    /// `demand[shift][band - 1]`, cumulative over bands.
    demand: [[u32; GRADES]; SHIFTS],
    /// Nominal per-grade headcount per shift, `headcount[shift][grade - 1]`.
    headcount: [[u32; GRADES]; SHIFTS],
    /// Scoped demand per grade-set bitmask (index 1..=7).
    scoped_demand: [[[u32; GRADES]; SHIFTS]; 8],
}

/// Raw instance fields before validation.
#[derive(Debug, Clone, Default)]
pub struct NurseInstanceParts {
    pub patterns: Vec<ShiftPattern>,
    pub nurses: Vec<Nurse>,
    /// `(nurse, pattern, cost)`; admissible pairs not listed default to 100.
    pub costs: Vec<(usize, usize, u32)>,
    pub demand: [[u32; GRADES]; SHIFTS],
    pub headcount: [[u32; GRADES]; SHIFTS],
}

impl NurseInstance {
    pub fn from_parts(parts: NurseInstanceParts) -> Result<Self> {
        let NurseInstanceParts {
            patterns,
            mut nurses,
            costs: cost_list,
            demand,
            headcount,
        } = parts;
        if nurses.is_empty() {
            return Err(Error::Validation("instance has no nurses".to_string()));
        }
        if patterns.is_empty() {
            return Err(Error::Validation("instance has no shift patterns".to_string()));
        }
        if patterns.len() > MAX_PATTERNS {
            return Err(Error::Validation(format!(
                "pattern count {} exceeds {MAX_PATTERNS}",
                patterns.len()
            )));
        }
        let pc = patterns.len();
        let mut costs = vec![NO_COST; nurses.len() * pc];
        for (i, nurse) in nurses.iter_mut().enumerate() {
            if !(1..=GRADES as u8).contains(&nurse.grade) {
                return Err(Error::Validation(format!(
                    "nurse {i} has grade {} outside 1..=3",
                    nurse.grade
                )));
            }
            if nurse.admissible.is_empty() {
                return Err(Error::Validation(format!("nurse {i} has no admissible pattern")));
            }
            nurse.admissible.sort_unstable();
            for w in nurse.admissible.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Validation(format!(
                        "nurse {i} lists pattern {} twice",
                        w[0]
                    )));
                }
            }
            for &p in &nurse.admissible {
                if p as usize >= pc {
                    return Err(Error::Validation(format!(
                        "nurse {i} references unknown pattern {p}"
                    )));
                }
                costs[i * pc + p as usize] = MAX_COST as u8;
            }
        }
        for &(n, p, c) in &cost_list {
            if n >= nurses.len() || p >= pc {
                return Err(Error::Validation(format!("cost for unknown pair ({n}, {p})")));
            }
            if c > MAX_COST {
                return Err(Error::Validation(format!(
                    "cost out of range: nurse {n} pattern {p} cost {c}"
                )));
            }
            if costs[n * pc + p] == NO_COST {
                return Err(Error::Validation(format!(
                    "cost given for inadmissible pair ({n}, {p})"
                )));
            }
            costs[n * pc + p] = c as u8;
        }
        for (k, bands) in demand.iter().enumerate() {
            if bands[0] > bands[1] || bands[1] > bands[2] {
                return Err(Error::Validation(format!(
                    "demand on shift {k} is not cumulative over bands: {bands:?}"
                )));
            }
        }

        let mut scoped_demand = [[[0u32; GRADES]; SHIFTS]; 8];
        for bits in 1..8usize {
            for k in 0..SHIFTS {
                for s in 0..GRADES {
                    if bits & (1 << s) == 0 {
                        continue;
                    }
                    let outside: u32 = (0..s)
                        .filter(|g| bits & (1 << g) == 0)
                        .map(|g| headcount[k][g])
                        .sum();
                    scoped_demand[bits][k][s] = demand[k][s].saturating_sub(outside);
                }
            }
        }

        Ok(NurseInstance {
            patterns,
            nurses,
            costs,
            demand,
            headcount,
            scoped_demand,
        })
    }

    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn nurses(&self) -> &[Nurse] {
        &self.nurses
    }

    pub fn patterns(&self) -> &[ShiftPattern] {
        &self.patterns
    }

    pub fn grade(&self, nurse: usize) -> u8 {
        self.nurses[nurse].grade
    }

    /// Penalty cost of a nurse working a pattern, `None` when inadmissible.
    pub fn cost(&self, nurse: usize, pattern: usize) -> Option<u32> {
        match self.costs.get(nurse * self.patterns.len() + pattern) {
            Some(&c) if c != NO_COST && pattern < self.patterns.len() => Some(c as u32),
            _ => None,
        }
    }

    /// Cumulative demand on `shift` for grade band `band` (1..=3).
    pub fn demand(&self, shift: usize, band: u8) -> u32 {
        self.demand[shift][band as usize - 1]
    }

    pub fn headcount(&self, shift: usize, grade: u8) -> u32 {
        self.headcount[shift][grade as usize - 1]
    }

    /// Demand used when only the grades in `scope` are scheduled: bands
    /// outside the scope are dropped and the nominal headcount of lower grades
    /// outside the scope is subtracted (floored at zero).
    pub fn scoped_demand(&self, scope: GradeSet, shift: usize, band: u8) -> u32 {
        self.scoped_demand[scope.index()][shift][band as usize - 1]
    }

    pub fn is_admissible(&self, nurse: usize, pattern: Gene) -> bool {
        self.cost(nurse, pattern as usize).is_some()
    }

    /// Nurses whose grade is in `scope`, ascending.
    pub fn nurses_in(&self, scope: GradeSet) -> Vec<usize> {
        (0..self.nurse_count())
            .filter(|&n| scope.contains(self.grade(n)))
            .collect()
    }

    /// Cost and cover violation of `(nurse, pattern)` pairs scheduled under `scope`.
    ///
    /// Callers guarantee every pair is admissible and every nurse is in scope.
    fn scoped_objective<I>(&self, scope: GradeSet, pairs: I) -> (u64, u64)
    where
        I: IntoIterator<Item = (usize, Gene)>,
    {
        let pc = self.patterns.len();
        let mut worked = [[0u32; GRADES]; SHIFTS];
        let mut cost = 0u64;
        for (nurse, pattern) in pairs {
            let g = self.nurses[nurse].grade as usize - 1;
            debug_assert!(scope.contains(g as u8 + 1));
            let c = self.costs[nurse * pc + pattern as usize];
            debug_assert_ne!(c, NO_COST);
            cost += c as u64;
            let mut mask = self.patterns[pattern as usize].0;
            while mask != 0 {
                let k = mask.trailing_zeros() as usize;
                worked[k][g] += 1;
                mask &= mask - 1;
            }
        }
        let demand = &self.scoped_demand[scope.index()];
        let mut violation = 0u64;
        for k in 0..SHIFTS {
            let mut cumulative = 0u32;
            for s in 0..GRADES {
                if scope.0 & (1 << s) == 0 {
                    continue;
                }
                cumulative += worked[k][s];
                violation += demand[k][s].saturating_sub(cumulative) as u64;
            }
        }
        (cost, violation)
    }

    fn check(&self, a: &NurseAssignment) -> Result<()> {
        if a.choices.len() != self.nurse_count() {
            return Err(Error::Contract(format!(
                "assignment covers {} nurses, instance has {}",
                a.choices.len(),
                self.nurse_count()
            )));
        }
        for (n, choice) in a.choices.iter().enumerate() {
            let in_scope = a.scope.contains(self.grade(n));
            match choice {
                Some(p) if !in_scope => {
                    return Err(Error::Contract(format!(
                        "nurse {n} is outside scope {:?} but assigned pattern {p}",
                        a.scope
                    )))
                }
                None if in_scope => {
                    return Err(Error::Contract(format!(
                        "nurse {n} is in scope {:?} but unassigned",
                        a.scope
                    )))
                }
                Some(p) if !self.is_admissible(n, *p) => {
                    return Err(Error::Contract(format!(
                        "pattern {p} is not admissible for nurse {n}"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn pairs<'a>(a: &'a NurseAssignment) -> impl Iterator<Item = (usize, Gene)> + 'a {
        a.choices
            .iter()
            .enumerate()
            .filter_map(|(n, c)| c.map(|p| (n, p)))
    }

    /// Total cover shortfall, one unit per missing nurse per shift per band.
    pub fn cover_violation(&self, a: &NurseAssignment) -> Result<u64> {
        self.check(a)?;
        Ok(self.scoped_objective(a.scope, Self::pairs(a)).1)
    }

    /// Sum of the penalty costs of the chosen nurse/pattern pairs.
    pub fn preference_cost(&self, a: &NurseAssignment) -> Result<u64> {
        self.check(a)?;
        Ok(Self::pairs(a)
            .map(|(n, p)| self.cost(n, p as usize).unwrap_or(MAX_COST) as u64)
            .sum())
    }

    pub fn raw_objective(&self, a: &NurseAssignment) -> Result<(u64, u64)> {
        self.check(a)?;
        Ok(self.scoped_objective(a.scope, Self::pairs(a)))
    }

    pub fn is_feasible(&self, a: &NurseAssignment) -> Result<bool> {
        if a.scope != GradeSet::ALL {
            return Err(Error::Contract(format!(
                "feasibility needs a full assignment, got scope {:?}",
                a.scope
            )));
        }
        Ok(self.cover_violation(a)? == 0)
    }
}

/// Shift-pattern choice for every nurse whose grade is in `scope`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NurseAssignment {
    scope: GradeSet,
    choices: Vec<Option<Gene>>,
}

impl NurseAssignment {
    /// Validates scope coverage and admissibility against `instance`.
    pub fn new(instance: &NurseInstance, scope: GradeSet, choices: Vec<Option<Gene>>) -> Result<Self> {
        let a = NurseAssignment { scope, choices };
        instance.check(&a)?;
        Ok(a)
    }

    /// Full assignment from one pattern per nurse.
    pub fn full(instance: &NurseInstance, patterns: &[Gene]) -> Result<Self> {
        Self::new(instance, GradeSet::ALL, patterns.iter().map(|&p| Some(p)).collect())
    }

    /// Restriction of a full pattern vector to the nurses in `scope`.
    pub fn restricted(instance: &NurseInstance, scope: GradeSet, patterns: &[Gene]) -> Result<Self> {
        let choices = patterns
            .iter()
            .enumerate()
            .map(|(n, &p)| {
                (n < instance.nurse_count() && scope.contains(instance.grade(n))).then_some(p)
            })
            .collect();
        Self::new(instance, scope, choices)
    }

    pub fn scope(&self) -> GradeSet {
        self.scope
    }

    pub fn choice(&self, nurse: usize) -> Option<Gene> {
        self.choices.get(nurse).copied().flatten()
    }

    pub fn choices(&self) -> &[Option<Gene>] {
        &self.choices
    }
}

/// Minimization adapter: parts are grades (part `g - 1` holds grade `g`),
/// positions are nurses.
#[derive(Debug, Clone)]
pub struct NurseProblem {
    instance: NurseInstance,
}

impl NurseProblem {
    pub fn new(instance: NurseInstance) -> Self {
        NurseProblem { instance }
    }

    pub fn instance(&self) -> &NurseInstance {
        &self.instance
    }
}

impl Problem for NurseProblem {
    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn part_count(&self) -> usize {
        GRADES
    }

    fn position_count(&self) -> usize {
        self.instance.nurse_count()
    }

    fn part_of(&self, position: usize) -> usize {
        self.instance.grade(position) as usize - 1
    }

    fn domain(&self, position: usize) -> &[Gene] {
        &self.instance.nurses[position].admissible
    }

    fn evaluate(&self, measure: Measure, positions: &[usize], genes: &[Gene]) -> Evaluation {
        debug_assert_eq!(positions.len(), genes.len());
        let scope = if measure.full {
            GradeSet::ALL
        } else {
            GradeSet::from_parts(measure.parts).unwrap_or(GradeSet::ALL)
        };
        let (cost, violation) = self
            .instance
            .scoped_objective(scope, positions.iter().copied().zip(genes.iter().copied()));
        Evaluation {
            raw: cost as f64,
            violation,
        }
    }
}
