mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{mall_score, nurse_scoped_score, nurse_score};
use pyramid_ga::mall::{generate_mall_instance, MallAssignment, MallGenParams, MallInstance};
use pyramid_ga::nurse::{
    generate_nurse_instance, GradeSet, NurseAssignment, NurseGenParams, NurseInstance, NurseProblem, MAX_PATTERNS,
};
use pyramid_ga::{Gene, Measure, PartSet, Problem};

fn random_roster(inst: &NurseInstance, rng: &mut ChaCha8Rng) -> Vec<Gene> {
    inst.nurses()
        .iter()
        .map(|n| n.admissible[rng.gen_range(0..n.admissible.len())])
        .collect()
}

fn random_types(inst: &MallInstance, rng: &mut ChaCha8Rng) -> Vec<Gene> {
    (0..inst.location_count())
        .map(|_| rng.gen_range(0..inst.type_count()) as Gene)
        .collect()
}

const GRADE_SCOPES: [&[u8]; 7] = [&[1], &[2], &[3], &[1, 2], &[2, 3], &[1, 3], &[1, 2, 3]];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nurse_full_objective_matches_reference(seed in 0u64..10_000, nurses in 1usize..25, t in 0.0f64..1.0) {
        let inst = generate_nurse_instance(NurseGenParams::new(nurses, 60, 12, t), seed).instance;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let roster = random_roster(&inst, &mut rng);
        let a = NurseAssignment::full(&inst, &roster).unwrap();
        let (cost, short) = nurse_score(&inst, &roster);
        prop_assert_eq!(inst.preference_cost(&a).unwrap(), cost);
        prop_assert_eq!(inst.cover_violation(&a).unwrap(), short);
        prop_assert_eq!(inst.is_feasible(&a).unwrap(), short == 0);
    }

    #[test]
    fn nurse_substitute_measure_matches_reference(seed in 0u64..10_000) {
        let inst = generate_nurse_instance(NurseGenParams::new(15, 40, 10, 0.7), seed).instance;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roster = random_roster(&inst, &mut rng);
        let problem = NurseProblem::new(inst.clone());
        for grades in GRADE_SCOPES {
            let scope = GradeSet::new(grades).unwrap();
            let parts = scope.to_parts();
            let positions = problem.positions_of(parts);
            let genes: Vec<Gene> = positions.iter().map(|&n| roster[n]).collect();
            let e = problem.evaluate(Measure::substitute(parts), &positions, &genes);
            let (cost, short) = nurse_scoped_score(&inst, grades, &roster);
            prop_assert_eq!(e.raw, cost as f64, "scope {:?}", grades);
            prop_assert_eq!(e.violation, short, "scope {:?}", grades);
            let a = NurseAssignment::restricted(&inst, scope, &roster).unwrap();
            prop_assert_eq!(inst.cover_violation(&a).unwrap(), short);
        }
    }

    #[test]
    fn preference_cost_is_additive_over_disjoint_scopes(seed in 0u64..10_000) {
        let inst = generate_nurse_instance(NurseGenParams::new(18, 50, 8, 0.5), seed).instance;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roster = random_roster(&inst, &mut rng);
        let cost = |g: &[u8]| {
            let a = NurseAssignment::restricted(&inst, GradeSet::new(g).unwrap(), &roster).unwrap();
            inst.preference_cost(&a).unwrap()
        };
        prop_assert_eq!(cost(&[1]) + cost(&[2, 3]), cost(&[1, 2, 3]));
    }

    #[test]
    fn planted_roster_is_feasible_when_loose(seed in 0u64..10_000, t in 0.0f64..=0.5) {
        let g = generate_nurse_instance(NurseGenParams::new(20, 100, 15, t), seed);
        prop_assert_eq!(g.instance.cover_violation(&g.planted).unwrap(), 0);
    }

    #[test]
    fn mall_objective_matches_reference(seed in 0u64..10_000, types in 4usize..30, t in 0.0f64..1.0) {
        let inst = generate_mall_instance(MallGenParams::layout(40, 4, types, t), seed).instance;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let genes = random_types(&inst, &mut rng);
        let a = MallAssignment::full(&inst, &genes).unwrap();
        let (rent, violation) = mall_score(&inst, &genes);
        prop_assert_eq!(inst.mall_rent(&a).unwrap(), rent);
        prop_assert_eq!(inst.mall_violation(&a).unwrap(), violation);
    }

    #[test]
    fn planted_tenant_mix_is_feasible(seed in 0u64..10_000, types in 20usize..=50, t in 0.0f64..=1.0) {
        let g = generate_mall_instance(MallGenParams::paper(types, t), seed);
        prop_assert_eq!(g.instance.mall_violation(&g.planted).unwrap(), 0);
    }
}

#[test]
fn paper_scale_ward_is_valid() {
    let inst = generate_nurse_instance(NurseGenParams::new(30, MAX_PATTERNS, 60, 0.3), 7).instance;
    assert_eq!(inst.nurse_count(), 30);
    assert_eq!(inst.pattern_count(), MAX_PATTERNS);
    for k in 0..14 {
        assert!(inst.demand(k, 1) <= inst.demand(k, 2) && inst.demand(k, 2) <= inst.demand(k, 3));
    }
}

#[test]
fn tiny_ward_planted_roster_is_feasible() {
    let g = generate_nurse_instance(NurseGenParams::new(5, 8, 8, 0.3), 1);
    assert!(g.instance.is_feasible(&g.planted).unwrap());
    assert!(common::nurse_optimum(&g.instance).is_some());
}

#[test]
fn type_bounds_of_the_paper_layout_are_accepted() {
    for (types, t, seed) in [(50, 0.2, 3), (20, 0.5, 9)] {
        let g = generate_mall_instance(MallGenParams::paper(types, t), seed);
        assert_eq!(g.instance.type_count(), types);
        assert!(g.adjustments.is_empty(), "{:?}", g.adjustments);
        assert_eq!(g.instance.mall_violation(&g.planted).unwrap(), 0);
    }
}

#[test]
fn area_rents_add_up_when_types_stay_in_one_area() {
    let inst = generate_mall_instance(MallGenParams::paper(25, 0.4), 11).instance;
    // Type t is only ever placed in area t % 5.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let genes: Vec<Gene> = (0..inst.location_count())
        .map(|l| {
            let a = inst.area_of(l);
            let own: Vec<Gene> = (0..25).filter(|t| t % 5 == a).map(|t| t as Gene).collect();
            own[rng.gen_range(0..own.len())]
        })
        .collect();
    let full = inst.mall_rent(&MallAssignment::full(&inst, &genes).unwrap()).unwrap();
    let by_area: f64 = (0..5)
        .map(|a| {
            let sub = MallAssignment::restricted(&inst, PartSet::from_parts([a]), &genes).unwrap();
            inst.area_sub_rent(&sub).unwrap()
        })
        .sum();
    assert_eq!(full, by_area);
}
