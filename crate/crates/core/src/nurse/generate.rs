use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    GradeSet, Nurse, NurseAssignment, NurseInstance, NurseInstanceParts, ShiftPattern, GRADES,
    MAX_COST, MAX_PATTERNS, SHIFTS,
};
use crate::problem::Gene;

/// Share of nurse/pattern costs drawn from the low range `[0, 10]`.
const LOW_COST_SHARE: f64 = 0.6;
const LOW_COST_MAX: u32 = 10;
const NIGHT_PATTERN_SHARE: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NurseGenParams {
    pub nurse_count: usize,
    /// Size of the shared shift-pattern pool.
    pub pattern_count: usize,
    pub patterns_per_nurse: usize,
    /// Fraction of the planted roster's cover that becomes demand.
    pub tightness: f64,
}

impl NurseGenParams {
    pub fn new(nurse_count: usize, pattern_count: usize, patterns_per_nurse: usize, tightness: f64) -> Self {
        NurseGenParams {
            nurse_count,
            pattern_count,
            patterns_per_nurse,
            tightness,
        }
    }

    /// Ward-sized defaults: 30 nurses drawing from the full 411-pattern pool.
    pub fn ward(tightness: f64) -> Self {
        Self::new(30, MAX_PATTERNS, 60, tightness)
    }

    fn clamped(self) -> (Self, Vec<String>) {
        let mut notes = Vec::new();
        let mut p = self;
        if p.nurse_count < 1 {
            notes.push(format!("nurse_count {} raised to 1", p.nurse_count));
            p.nurse_count = 1;
        }
        if p.pattern_count < 1 || p.pattern_count > MAX_PATTERNS {
            let c = p.pattern_count.clamp(1, MAX_PATTERNS);
            notes.push(format!("pattern_count {} clamped to {c}", p.pattern_count));
            p.pattern_count = c;
        }
        if p.patterns_per_nurse < 1 || p.patterns_per_nurse > p.pattern_count {
            let c = p.patterns_per_nurse.clamp(1, p.pattern_count);
            notes.push(format!("patterns_per_nurse {} clamped to {c}", p.patterns_per_nurse));
            p.patterns_per_nurse = c;
        }
        if !(0.0..=1.0).contains(&p.tightness) {
            let c = if p.tightness.is_nan() { 0.0 } else { p.tightness.clamp(0.0, 1.0) };
            notes.push(format!("tightness {} clamped to {c}", p.tightness));
            p.tightness = c;
        }
        (p, notes)
    }
}

/// A generated instance together with the roster its demand was derived from.
#[derive(Debug, Clone)]
pub struct GeneratedNurse {
    pub instance: NurseInstance,
    pub planted: NurseAssignment,
    /// Parameter adjustments made while clamping to legal ranges.
    pub adjustments: Vec<String>,
}

/// Builds a random instance around a planted roster.
///
/// Demand on each shift and band is `floor(tightness * planted cover)`, so
/// the planted roster is always feasible. Nominal headcount per grade is
/// derived the same way from the planted per-grade counts.
pub fn generate_nurse_instance(params: NurseGenParams, seed: u64) -> GeneratedNurse {
    let (params, adjustments) = params.clamped();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let patterns: Vec<ShiftPattern> = (0..params.pattern_count)
        .map(|_| random_pattern(&mut rng))
        .collect();

    let nurses: Vec<Nurse> = (0..params.nurse_count)
        .map(|i| {
            let grade = if i < GRADES && params.nurse_count >= GRADES {
                i as u8 + 1
            } else {
                let r: f64 = rng.gen();
                if r < 0.25 {
                    1
                } else if r < 0.6 {
                    2
                } else {
                    3
                }
            };
            let mut admissible: Vec<Gene> = sample(&mut rng, params.pattern_count, params.patterns_per_nurse)
                .into_iter()
                .map(|p| p as Gene)
                .collect();
            admissible.sort_unstable();
            Nurse { grade, admissible }
        })
        .collect();

    let mut costs = Vec::new();
    for (n, nurse) in nurses.iter().enumerate() {
        for &p in &nurse.admissible {
            let c = if rng.gen_bool(LOW_COST_SHARE) {
                rng.gen_range(0..=LOW_COST_MAX)
            } else {
                rng.gen_range(LOW_COST_MAX + 1..=MAX_COST)
            };
            costs.push((n, p as usize, c));
        }
    }

    let planted: Vec<Gene> = nurses
        .iter()
        .map(|nurse| nurse.admissible[rng.gen_range(0..nurse.admissible.len())])
        .collect();

    let mut per_grade = [[0u32; GRADES]; SHIFTS];
    for (n, &p) in planted.iter().enumerate() {
        let g = nurses[n].grade as usize - 1;
        for k in patterns[p as usize].shifts() {
            per_grade[k][g] += 1;
        }
    }
    let scale = |v: u32| (params.tightness * v as f64).floor() as u32;
    let mut demand = [[0u32; GRADES]; SHIFTS];
    let mut headcount = [[0u32; GRADES]; SHIFTS];
    for k in 0..SHIFTS {
        let mut cumulative = 0;
        for g in 0..GRADES {
            cumulative += per_grade[k][g];
            demand[k][g] = scale(cumulative);
            headcount[k][g] = scale(per_grade[k][g]);
        }
    }

    let instance = NurseInstance::from_parts(NurseInstanceParts {
        patterns,
        nurses,
        costs,
        demand,
        headcount,
    })
    .expect("generator output satisfies instance invariants");
    let planted = NurseAssignment::full(&instance, &planted).expect("planted roster is admissible");
    debug_assert_eq!(planted.scope(), GradeSet::ALL);
    GeneratedNurse {
        instance,
        planted,
        adjustments,
    }
}

fn random_pattern(rng: &mut ChaCha8Rng) -> ShiftPattern {
    let night = rng.gen_bool(NIGHT_PATTERN_SHARE);
    let (lo, hi) = if night { (2, 4) } else { (3, 5) };
    let len = rng.gen_range(lo..=hi);
    let offset = if night { 7 } else { 0 };
    let mask = sample(rng, 7, len)
        .into_iter()
        .fold(0u16, |m, d| m | 1 << (d + offset));
    ShiftPattern::from_mask(mask).expect("single-half mask")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let p = NurseGenParams::new(12, 40, 6, 0.4);
        let a = generate_nurse_instance(p, 11);
        let b = generate_nurse_instance(p, 11);
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.planted, b.planted);
        let c = generate_nurse_instance(p, 12);
        assert_ne!(a.instance, c.instance);
    }

    #[test]
    fn clamping_is_reported() {
        let g = generate_nurse_instance(NurseGenParams::new(0, 900, 1000, 1.5), 1);
        assert_eq!(g.instance.nurse_count(), 1);
        assert_eq!(g.instance.pattern_count(), MAX_PATTERNS);
        assert_eq!(g.adjustments.len(), 4);
    }

    #[test]
    fn planted_roster_feasible() {
        for seed in 0..20 {
            let g = generate_nurse_instance(NurseGenParams::new(15, 50, 8, 0.5), seed);
            assert!(g.instance.is_feasible(&g.planted).unwrap());
        }
    }

    #[test]
    fn roughly_sixty_percent_low_costs() {
        let g = generate_nurse_instance(NurseGenParams::ward(0.3), 5);
        let inst = &g.instance;
        let (mut low, mut total) = (0, 0);
        for (n, nurse) in inst.nurses().iter().enumerate() {
            for &p in &nurse.admissible {
                total += 1;
                if inst.cost(n, p as usize).unwrap() <= LOW_COST_MAX {
                    low += 1;
                }
            }
        }
        let share = low as f64 / total as f64;
        assert!((share - 0.6).abs() < 0.05, "low-cost share {share}");
    }
}
