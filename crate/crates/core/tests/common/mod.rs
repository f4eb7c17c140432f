//! Test-side reference implementations. Everything here is written from the
//! problem definitions against public accessors only, so the library's
//! evaluators can be checked against something they do not share code with.

#![allow(dead_code)]

use pyramid_ga::mall::{generate_mall_instance, MallGenParams, MallInstance};
use pyramid_ga::nurse::{generate_nurse_instance, NurseGenParams, NurseInstance, SHIFTS};
use pyramid_ga::Gene;

/// Tiny ward: 4 or 5 nurses over an 8-pattern pool, loosely demanded.
pub fn tiny_nurse(seed: u64) -> NurseInstance {
    let nurses = 4 + (seed % 2) as usize;
    generate_nurse_instance(NurseGenParams::new(nurses, 8, 6, 0.3), seed).instance
}

/// Ten locations in two areas, four shop types.
pub fn tiny_mall(seed: u64) -> MallInstance {
    generate_mall_instance(MallGenParams::layout(10, 2, 4, 0.3), seed).instance
}

/// Preference cost and cover shortfall of a full roster, one pattern per nurse.
pub fn nurse_score(inst: &NurseInstance, roster: &[Gene]) -> (u64, u64) {
    nurse_scoped_score(inst, &[1, 2, 3], roster)
}

/// Cost and shortfall restricted to the nurses whose grade is in `grades`.
/// Demand at a band in scope is reduced by the nominal headcount of the more
/// qualified grades that sit outside the scope.
pub fn nurse_scoped_score(inst: &NurseInstance, grades: &[u8], roster: &[Gene]) -> (u64, u64) {
    let in_scope = |n: usize| grades.contains(&inst.grade(n));
    let mut cost = 0u64;
    for (n, &p) in roster.iter().enumerate() {
        if in_scope(n) {
            cost += inst.cost(n, p as usize).expect("admissible pair") as u64;
        }
    }
    let mut shortfall = 0u64;
    for k in 0..SHIFTS {
        for band in 1..=3u8 {
            if !grades.contains(&band) {
                continue;
            }
            let lent: u32 = (1..band).filter(|g| !grades.contains(g)).map(|g| inst.headcount(k, g)).sum();
            let need = inst.demand(k, band).saturating_sub(lent);
            let have = (0..roster.len())
                .filter(|&n| in_scope(n) && inst.grade(n) <= band)
                .filter(|&n| inst.patterns()[roster[n] as usize].works(k))
                .count() as u32;
            shortfall += need.saturating_sub(have) as u64;
        }
    }
    (cost, shortfall)
}

/// Shop sizes for `n` same-type locations, largest first.
fn shop_sizes(n: u32) -> Vec<u32> {
    let mut out = vec![3; (n / 3) as usize];
    if n % 3 > 0 {
        out.push(n % 3);
    }
    out
}

/// Rent and violation of a full type assignment, computed location by location.
pub fn mall_score(inst: &MallInstance, types: &[Gene]) -> (f64, u64) {
    let areas = inst.area_count();
    let tc = inst.type_count();
    let mut rent = 0.0;
    let mut shops_of_type = vec![0u32; tc];
    let mut by_size = [0u32; 4];
    for a in 0..areas {
        for t in 0..tc {
            let n = (0..types.len())
                .filter(|&l| inst.area_of(l) == a && types[l] as usize == t)
                .count() as u32;
            for z in shop_sizes(n) {
                rent += inst.fixed_rent(t, a) + inst.attractiveness(a, t) * z as f64;
                shops_of_type[t] += 1;
                by_size[z as usize] += 1;
            }
        }
    }
    for t in 0..tc {
        if shops_of_type[t] > 0 {
            let ideal = inst.limits(t).ideal as f64;
            rent -= inst.count_slope(t) * (shops_of_type[t] as f64 - ideal).abs();
        }
    }
    for a in 0..areas {
        let locs: Vec<usize> = (0..types.len()).filter(|&l| inst.area_of(l) == a).collect();
        for w in locs.windows(2) {
            let (t, u) = (types[w[0]] as usize, types[w[1]] as usize);
            if inst.groups_of(t).iter().any(|g| inst.groups_of(u).contains(g)) {
                rent += inst.synergy_bonus();
            }
        }
    }
    let mut violation = 0u64;
    for t in 0..tc {
        let l = inst.limits(t);
        let n = shops_of_type[t];
        violation += l.min.saturating_sub(n) as u64 + n.saturating_sub(l.max) as u64;
    }
    let caps = inst.caps();
    violation += by_size[1].saturating_sub(caps.small) as u64;
    violation += by_size[2].saturating_sub(caps.medium) as u64;
    violation += by_size[3].saturating_sub(caps.large) as u64;
    (rent, violation)
}

/// Recursive enumeration of every assignment drawn from `domains`, keeping
/// the best feasible one. `score` returns `(value, violation)`; `better`
/// decides strict improvement.
pub fn brute_force<S, B>(domains: &[Vec<Gene>], score: S, better: B) -> Option<(Vec<Gene>, f64)>
where
    S: Fn(&[Gene]) -> (f64, u64),
    B: Fn(f64, f64) -> bool,
{
    fn walk<S, B>(
        domains: &[Vec<Gene>],
        prefix: &mut Vec<Gene>,
        score: &S,
        better: &B,
        best: &mut Option<(Vec<Gene>, f64)>,
    ) where
        S: Fn(&[Gene]) -> (f64, u64),
        B: Fn(f64, f64) -> bool,
    {
        if prefix.len() == domains.len() {
            let (v, violation) = score(prefix);
            if violation == 0 && best.as_ref().map_or(true, |(_, b)| better(v, *b)) {
                *best = Some((prefix.clone(), v));
            }
            return;
        }
        for &g in &domains[prefix.len()] {
            prefix.push(g);
            walk(domains, prefix, score, better, best);
            prefix.pop();
        }
    }
    let mut best = None;
    walk(domains, &mut Vec::new(), &score, &better, &mut best);
    best
}

pub fn nurse_optimum(inst: &NurseInstance) -> Option<f64> {
    let domains: Vec<Vec<Gene>> = inst.nurses().iter().map(|n| n.admissible.clone()).collect();
    brute_force(
        &domains,
        |r| {
            let (c, v) = nurse_score(inst, r);
            (c as f64, v)
        },
        |a, b| a < b,
    )
    .map(|(_, v)| v)
}

pub fn mall_optimum(inst: &MallInstance) -> Option<f64> {
    let all: Vec<Gene> = (0..inst.type_count() as Gene).collect();
    let domains = vec![all; inst.location_count()];
    brute_force(&domains, |t| mall_score(inst, t), |a, b| a > b).map(|(_, v)| v)
}
