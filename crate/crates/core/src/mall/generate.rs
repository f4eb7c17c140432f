use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MallAssignment, MallInstance, MallInstanceParts, SizeCaps, SizeClass, TypeLimits};
use crate::problem::Gene;

pub const PAPER_LOCATIONS: usize = 100;
pub const PAPER_AREAS: usize = 5;
pub const MIN_TYPES: usize = 20;
pub const MAX_TYPES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MallGenParams {
    pub location_count: usize,
    pub area_count: usize,
    pub type_count: usize,
    /// Number of shop groups; 0 picks `max(2, type_count / 5)`.
    pub group_count: usize,
    /// 0 leaves wide slack around the planted counts, 1 pins limits to them.
    pub tightness: f64,
}

impl MallGenParams {
    /// 100 locations in five areas of twenty.
    pub fn paper(type_count: usize, tightness: f64) -> Self {
        MallGenParams {
            location_count: PAPER_LOCATIONS,
            area_count: PAPER_AREAS,
            type_count,
            group_count: 0,
            tightness,
        }
    }

    /// A custom layout, e.g. the 10-location fixtures used for exhaustive checks.
    pub fn layout(location_count: usize, area_count: usize, type_count: usize, tightness: f64) -> Self {
        MallGenParams {
            location_count,
            area_count,
            type_count,
            group_count: 0,
            tightness,
        }
    }

    fn clamped(self) -> (Self, Vec<String>) {
        let mut notes = Vec::new();
        let mut p = self;
        if p.location_count < 1 {
            notes.push(format!("location_count {} raised to 1", p.location_count));
            p.location_count = 1;
        }
        let area_hi = p.location_count.min(32);
        if p.area_count < 1 || p.area_count > area_hi {
            let c = p.area_count.clamp(1, area_hi);
            notes.push(format!("area_count {} clamped to {c}", p.area_count));
            p.area_count = c;
        }
        // The 20..=50 type range applies to the 100-location layout; smaller
        // layouts may use as few as two types.
        let (lo, hi) = if p.location_count >= PAPER_LOCATIONS {
            (MIN_TYPES, MAX_TYPES)
        } else {
            (2, MAX_TYPES)
        };
        if p.type_count < lo || p.type_count > hi {
            let c = p.type_count.clamp(lo, hi);
            notes.push(format!("type_count {} clamped to {c}", p.type_count));
            p.type_count = c;
        }
        if p.group_count == 0 {
            p.group_count = (p.type_count / 5).max(2);
        }
        if !(0.0..=1.0).contains(&p.tightness) {
            let c = if p.tightness.is_nan() { 0.0 } else { p.tightness.clamp(0.0, 1.0) };
            notes.push(format!("tightness {} clamped to {c}", p.tightness));
            p.tightness = c;
        }
        (p, notes)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedMall {
    pub instance: MallInstance,
    pub planted: MallAssignment,
    pub adjustments: Vec<String>,
}

/// Random money amount in quarter units, so that all rent arithmetic on
/// generated instances is exact in binary floating point.
fn quarters(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo * 4..=hi * 4) as f64 / 4.0
}

/// Builds a mall around a planted assignment whose shop counts define the
/// per-type limits and the size-class caps, so the planted assignment is
/// always feasible.
pub fn generate_mall_instance(params: MallGenParams, seed: u64) -> GeneratedMall {
    let (p, adjustments) = params.clamped();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Contiguous areas of (nearly) equal size.
    let area_of: Vec<usize> = (0..p.location_count)
        .map(|l| l * p.area_count / p.location_count)
        .collect();

    let groups_of: Vec<Vec<usize>> = (0..p.type_count)
        .map(|t| {
            let mut g = vec![t % p.group_count];
            if rng.gen_bool(0.2) {
                g.push(rng.gen_range(0..p.group_count));
            }
            g
        })
        .collect();

    // Planted tenants: runs of one type, 1..=4 locations long, within an area.
    let mut planted: Vec<Gene> = Vec::with_capacity(p.location_count);
    let mut l = 0;
    while l < p.location_count {
        let t = rng.gen_range(0..p.type_count) as Gene;
        let run = rng.gen_range(1..=4);
        let area = area_of[l];
        let mut k = 0;
        while k < run && l < p.location_count && area_of[l] == area {
            planted.push(t);
            l += 1;
            k += 1;
        }
    }

    let mut parts = MallInstanceParts::empty(area_of, p.area_count, p.type_count, p.group_count);
    parts.groups_of = groups_of;
    for t in 0..p.type_count {
        for a in 0..p.area_count {
            parts.fixed_rent[t * p.area_count + a] = quarters(&mut rng, 2, 12);
        }
    }
    for a in 0..p.area_count {
        for t in 0..p.type_count {
            parts.attractiveness[a * p.type_count + t] = quarters(&mut rng, 0, 10);
        }
    }
    for t in 0..p.type_count {
        parts.count_slope[t] = quarters(&mut rng, 0, 4);
    }
    parts.synergy_bonus = quarters(&mut rng, 1, 3);

    // Limits and caps from the planted shop structure.
    let shell = MallInstance::from_parts(parts.clone()).expect("generated parameters are valid");
    let assignment = MallAssignment::full(&shell, &planted).expect("planted types are in range");
    let shops = shell.derive_shops(&assignment).expect("planted assignment is valid");
    let mut shops_of_type = vec![0u32; p.type_count];
    let mut per_size = [0u32; 3];
    for s in &shops.0 {
        shops_of_type[s.shop_type as usize] += 1;
        per_size[s.size.locations() - 1] += 1;
    }
    let slack = 1.0 - p.tightness;
    for (t, &n) in shops_of_type.iter().enumerate() {
        let below = (slack * (n as f64 + 2.0)).round() as u32;
        let above = (slack * (n as f64 + 2.0)).round() as u32;
        let min = n.saturating_sub(below);
        let max = n + above;
        parts.limits[t] = TypeLimits {
            min,
            ideal: rng.gen_range(min..=max),
            max,
        };
    }
    let cap = |z: SizeClass| {
        let n = per_size[z.locations() - 1];
        n + (slack * (n as f64 * 0.5 + 2.0)).round() as u32
    };
    parts.caps = SizeCaps {
        small: cap(SizeClass::Small),
        medium: cap(SizeClass::Medium),
        large: cap(SizeClass::Large),
    };

    let instance = MallInstance::from_parts(parts).expect("generated instance is valid");
    let planted = MallAssignment::full(&instance, &planted).expect("planted types are in range");
    GeneratedMall {
        instance,
        planted,
        adjustments,
    }
}
