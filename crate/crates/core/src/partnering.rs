//! Inter-agent partner selection for assembly crossover.
//!
//! When a node is assembled from several lower nodes, the first slot's
//! parent is drawn by rank roulette and every further slot is filled by one
//! of seven strategies:
//!
//! | kind | rule |
//! |------|------|
//! | `S`  | rank roulette in the target sub-population |
//! | `R`  | uniform over the target sub-population |
//! | `B`  | the target's best agent (lower index on ties) |
//! | `D`  | uniform over the 3x3 torus patch around the first parent's cell |
//! | `J`  | no assembly: every node solves the full problem ([`PyramidTopology::joined`]) |
//! | `A`  | rank roulette, accepted with probability scaled by the combined fitness |
//! | `C`  | best of ten random candidates, judged by the child they produce |
//!
//! [`PyramidTopology::joined`]: crate::engine::PyramidTopology::joined

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;

use crate::engine::RankWheel;
use crate::error::Error;
use crate::problem::Direction;

pub const CANDIDATE_COUNT: usize = 10;
pub const ACCEPTANCE_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    S,
    R,
    B,
    D,
    J,
    A,
    C,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::S,
        StrategyKind::R,
        StrategyKind::B,
        StrategyKind::D,
        StrategyKind::J,
        StrategyKind::A,
        StrategyKind::C,
    ];

    pub fn letter(self) -> char {
        match self {
            StrategyKind::S => 'S',
            StrategyKind::R => 'R',
            StrategyKind::B => 'B',
            StrategyKind::D => 'D',
            StrategyKind::J => 'J',
            StrategyKind::A => 'A',
            StrategyKind::C => 'C',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::S => "rank-selection",
            StrategyKind::R => "random",
            StrategyKind::B => "best",
            StrategyKind::D => "distributed",
            StrategyKind::J => "joined",
            StrategyKind::A => "attractiveness",
            StrategyKind::C => "partner-choice",
        }
    }

    /// Strategies that evaluate candidate children while choosing.
    pub fn evaluates_children(self) -> bool {
        matches!(self, StrategyKind::A | StrategyKind::C)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = [0u8; 4];
        f.pad(self.letter().encode_utf8(&mut buf))
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        StrategyKind::ALL
            .into_iter()
            .find(|k| s.len() == 1 && s.eq_ignore_ascii_case(&k.letter().to_string()))
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`, expected one of {{S,R,B,D,J,A,C}}")))
    }
}

/// Toroidal grid every sub-population is laid out on, agents assigned to
/// cells round-robin by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub width: usize,
    pub height: usize,
}

impl Default for Torus {
    fn default() -> Self {
        Torus {
            width: 10,
            height: 10,
        }
    }
}

impl Torus {
    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn cell_of(&self, agent: usize) -> usize {
        agent % self.cells()
    }

    /// `(row, column)` of a cell.
    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.width, cell % self.width)
    }

    fn offset(&self, cell: usize, dr: isize, dc: isize) -> usize {
        let (r, c) = self.coords(cell);
        let r = (r as isize + dr).rem_euclid(self.height as isize) as usize;
        let c = (c as isize + dc).rem_euclid(self.width as isize) as usize;
        r * self.width + c
    }

    /// The eight surrounding cells, with wraparound.
    pub fn neighbors(&self, cell: usize) -> [usize; 8] {
        let mut out = [0; 8];
        let mut i = 0;
        for dr in -1..=1 {
            for dc in -1..=1 {
                if dr != 0 || dc != 0 {
                    out[i] = self.offset(cell, dr, dc);
                    i += 1;
                }
            }
        }
        out
    }

    /// The cell itself followed by its eight neighbours.
    pub fn patch(&self, cell: usize) -> [usize; 9] {
        let mut out = [cell; 9];
        out[1..].copy_from_slice(&self.neighbors(cell));
        out
    }

    pub fn in_patch(&self, center: usize, cell: usize) -> bool {
        self.patch(center).contains(&cell)
    }

    /// Agents per cell for a population of `n`.
    pub fn occupancy(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; self.cells()];
        for agent in 0..n {
            counts[self.cell_of(agent)] += 1;
        }
        counts
    }

    /// Agents of a population of `n` mapped to the patch around `cell`.
    pub fn members_of_patch(&self, cell: usize, n: usize) -> Vec<usize> {
        let cells = self.cells();
        let mut out = Vec::new();
        for c in self.patch(cell) {
            // Patch cells can repeat on grids narrower than three.
            if out.iter().any(|&a: &usize| a % cells == c) {
                continue;
            }
            out.extend((c..n).step_by(cells));
        }
        out.sort_unstable();
        out
    }
}

/// Read-only view of the sub-population a partner is drawn from.
#[derive(Debug, Clone, Copy)]
pub struct TargetPopulation<'a> {
    /// Penalized values, indexed by agent.
    pub values: &'a [f64],
    pub wheel: &'a RankWheel,
    pub direction: Direction,
}

impl TargetPopulation<'_> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Everything a strategy may consult for one slot.
#[derive(Debug)]
pub struct PartnerContext<'a> {
    pub target: TargetPopulation<'a>,
    /// Torus cell of the first parent.
    pub first_cell: usize,
    pub torus: Torus,
    /// Best value known in the receiving node, under its measure.
    pub best_known: &'a mut Option<f64>,
    /// Lowest value observed in the receiving node, used to shift ratios.
    pub observed_floor: f64,
    pub candidate_count: usize,
    pub max_attempts: usize,
}

pub fn partner_s<R: Rng + ?Sized>(target: &TargetPopulation, rng: &mut R) -> usize {
    target.wheel.spin(rng)
}

pub fn partner_r<R: Rng + ?Sized>(target: &TargetPopulation, rng: &mut R) -> usize {
    rng.gen_range(0..target.len())
}

/// Best penalized value; the lower index wins ties.
pub fn partner_b(target: &TargetPopulation) -> usize {
    let d = target.direction;
    let mut best = 0;
    for (i, &v) in target.values.iter().enumerate().skip(1) {
        if d.better(v, target.values[best]) {
            best = i;
        }
    }
    best
}

/// Uniform over target agents mapped to the first parent's cell or its
/// eight neighbours. Falls back to the whole population when the patch is
/// empty (populations smaller than the grid).
pub fn partner_d<R: Rng + ?Sized>(target: &TargetPopulation, torus: Torus, first_cell: usize, rng: &mut R) -> usize {
    let members = torus.members_of_patch(first_cell, target.len());
    if members.is_empty() {
        return rng.gen_range(0..target.len());
    }
    members[rng.gen_range(0..members.len())]
}

/// Cell an assembled child is placed in: one of the eight cells adjacent to
/// the first parent's cell.
pub fn place_child_d<R: Rng + ?Sized>(torus: Torus, first_cell: usize, rng: &mut R) -> usize {
    torus.neighbors(first_cell)[rng.gen_range(0..8)]
}

/// Probability of accepting a pairing whose combined value is `f_comb`
/// against the best known `f_best`.
///
/// At-least-as-good pairings are always accepted. Otherwise the ratio is
/// `f_comb / f_best` when maximizing and `f_best / f_comb` when minimizing.
/// If either value is not positive both are shifted by `1 - floor`, where
/// `floor` is the lowest value observed in the receiving node.
pub fn acceptance_probability(f_comb: f64, f_best: f64, direction: Direction, floor: f64) -> f64 {
    if direction.at_least_as_good(f_comb, f_best) {
        return 1.0;
    }
    let (mut comb, mut best) = (f_comb, f_best);
    if comb <= 0.0 || best <= 0.0 {
        let lo = floor.min(comb).min(best);
        comb += 1.0 - lo;
        best += 1.0 - lo;
    }
    let p = match direction {
        Direction::Maximize => comb / best,
        Direction::Minimize => best / comb,
    };
    p.clamp(0.0, 1.0)
}

/// Rank-roulette candidates accepted with [`acceptance_probability`]; after
/// `max_attempts` rejections the last candidate is taken.
///
/// `evaluate(candidate)` returns the combined value of the pairing under the
/// receiving node's measure.
pub fn partner_a<R, F>(ctx: &mut PartnerContext, rng: &mut R, mut evaluate: F) -> usize
where
    R: Rng + ?Sized,
    F: FnMut(usize) -> f64,
{
    let direction = ctx.target.direction;
    let attempts = ctx.max_attempts.max(1);
    let mut candidate = 0;
    for _ in 0..attempts {
        candidate = partner_s(&ctx.target, rng);
        let f_comb = evaluate(candidate);
        let f_best = *ctx.best_known.get_or_insert(f_comb);
        let p = acceptance_probability(f_comb, f_best, direction, ctx.observed_floor.min(f_comb));
        if direction.better(f_comb, f_best) {
            *ctx.best_known = Some(f_comb);
        }
        if p >= 1.0 || rng.gen_bool(p) {
            return candidate;
        }
    }
    candidate
}

/// Random candidate pool drawn without replacement, or with replacement when
/// the target is smaller than the pool.
pub fn candidate_pool<R: Rng + ?Sized>(target_len: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let count = count.max(1);
    if target_len >= count {
        sample(rng, target_len, count).into_vec()
    } else {
        (0..count).map(|_| rng.gen_range(0..target_len)).collect()
    }
}

/// The pool member whose child evaluates best; lower agent index on ties.
/// Returns the chosen agent and its child's value.
pub fn best_of_pool<F>(pool: &[usize], direction: Direction, mut evaluate: F) -> (usize, f64)
where
    F: FnMut(usize) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for &candidate in pool {
        let v = evaluate(candidate);
        best = match best {
            None => Some((candidate, v)),
            Some((b, bv)) if direction.better(v, bv) || (v == bv && candidate < b) => Some((candidate, v)),
            keep => keep,
        };
    }
    best.expect("candidate pool is non-empty")
}

pub fn partner_c<R, F>(ctx: &mut PartnerContext, rng: &mut R, evaluate: F) -> usize
where
    R: Rng + ?Sized,
    F: FnMut(usize) -> f64,
{
    let pool = candidate_pool(ctx.target.len(), ctx.candidate_count, rng);
    let (chosen, value) = best_of_pool(&pool, ctx.target.direction, evaluate);
    if ctx
        .best_known
        .map_or(true, |b| ctx.target.direction.better(value, b))
    {
        *ctx.best_known = Some(value);
    }
    chosen
}

/// Dispatches one slot to the given strategy. `J` never assembles and is
/// treated as `S` if reached.
pub fn select_partner<R, F>(kind: StrategyKind, ctx: &mut PartnerContext, rng: &mut R, evaluate: F) -> usize
where
    R: Rng + ?Sized,
    F: FnMut(usize) -> f64,
{
    match kind {
        StrategyKind::S | StrategyKind::J => partner_s(&ctx.target, rng),
        StrategyKind::R => partner_r(&ctx.target, rng),
        StrategyKind::B => partner_b(&ctx.target),
        StrategyKind::D => partner_d(&ctx.target, ctx.torus, ctx.first_cell, rng),
        StrategyKind::A => partner_a(ctx, rng, evaluate),
        StrategyKind::C => partner_c(ctx, rng, evaluate),
    }
}
