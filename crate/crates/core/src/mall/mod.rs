//! Shopping-mall tenant selection.
//!
//! Every location receives one shop type. Same-type locations inside one
//! area merge into shops of three size classes (1, 2 or 3 locations), and
//! rent is earned per shop. Global limits on per-type shop counts and on the
//! number of shops per size class are the constraints.
//!
//! Rent of a full assignment:
//!
//! ```text
//! rent = sum over shops (t, a, z):  fixed_rent[t][a] + attractiveness[a][t] * z
//!      - sum over types t present:  count_slope[t] * |n_t - ideal[t]|
//!      + synergy_bonus * #(adjacent same-area location pairs sharing a group)
//! ```
//!
//! where `n_t` is the number of shops of type `t` and adjacency is between
//! consecutive locations of an area's ascending location list.

mod format;
mod generate;

pub use format::{parse_mall_instance, render_mall_instance};
pub use generate::{generate_mall_instance, GeneratedMall, MallGenParams};

use crate::error::{Error, Result};
use crate::problem::{Direction, Evaluation, Gene, Measure, PartSet, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeClass {
    Small = 1,
    Medium = 2,
    Large = 3,
}

impl SizeClass {
    pub fn locations(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shop {
    pub shop_type: Gene,
    pub area: usize,
    pub size: SizeClass,
}

/// Shops derived from an assignment, ordered by area, then type, then size
/// (largest first).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShopList(pub Vec<Shop>);

/// Minimum, ideal and maximum number of shops of one type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeLimits {
    pub min: u32,
    pub ideal: u32,
    pub max: u32,
}

/// Mall-wide caps on shops per size class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCaps {
    pub small: u32,
    pub medium: u32,
    pub large: u32,
}

impl SizeCaps {
    fn get(&self, z: SizeClass) -> u32 {
        match z {
            SizeClass::Small => self.small,
            SizeClass::Medium => self.medium,
            SizeClass::Large => self.large,
        }
    }
}

/// Raw instance fields before validation. Money is in thousands of pounds per year.
#[derive(Debug, Clone, PartialEq)]
pub struct MallInstanceParts {
    pub area_of: Vec<usize>,
    pub area_count: usize,
    pub type_count: usize,
    pub group_count: usize,
    pub groups_of: Vec<Vec<usize>>,
    pub limits: Vec<TypeLimits>,
    pub caps: SizeCaps,
    /// `fixed_rent[t * area_count + a]`
    pub fixed_rent: Vec<f64>,
    /// `attractiveness[a * type_count + t]`
    pub attractiveness: Vec<f64>,
    pub count_slope: Vec<f64>,
    pub synergy_bonus: f64,
}

impl MallInstanceParts {
    /// Zeroed parameters with generous limits for the given layout.
    pub fn empty(area_of: Vec<usize>, area_count: usize, type_count: usize, group_count: usize) -> Self {
        let n = area_of.len() as u32;
        MallInstanceParts {
            area_of,
            area_count,
            type_count,
            group_count,
            groups_of: vec![vec![0]; type_count],
            limits: vec![TypeLimits { min: 0, ideal: 0, max: n }; type_count],
            caps: SizeCaps { small: n, medium: n, large: n },
            fixed_rent: vec![0.0; type_count * area_count],
            attractiveness: vec![0.0; area_count * type_count],
            count_slope: vec![0.0; type_count],
            synergy_bonus: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MallInstance {
    parts: MallInstanceParts,
    area_locations: Vec<Vec<usize>>,
    /// `share_group[t * type_count + u]`
    share_group: Vec<bool>,
    type_domain: Vec<Gene>,
}

impl MallInstance {
    pub fn from_parts(mut parts: MallInstanceParts) -> Result<Self> {
        let MallInstanceParts {
            area_count,
            type_count,
            group_count,
            ..
        } = parts;
        if parts.area_of.is_empty() {
            return Err(Error::Validation("mall has no locations".to_string()));
        }
        if area_count == 0 || area_count > 32 {
            return Err(Error::Validation(format!("area count {area_count} outside 1..=32")));
        }
        if type_count == 0 {
            return Err(Error::Validation("mall has no shop types".to_string()));
        }
        if let Some((l, a)) = parts.area_of.iter().enumerate().find(|(_, &a)| a >= area_count) {
            return Err(Error::Validation(format!("location {l} in unknown area {a}")));
        }
        let expect = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Validation(format!("{what} has the wrong length")))
            }
        };
        expect(parts.groups_of.len() == type_count, "group table")?;
        expect(parts.limits.len() == type_count, "type limits")?;
        expect(parts.fixed_rent.len() == type_count * area_count, "fixed rent table")?;
        expect(parts.attractiveness.len() == type_count * area_count, "attractiveness table")?;
        expect(parts.count_slope.len() == type_count, "count slope table")?;

        for (t, groups) in parts.groups_of.iter_mut().enumerate() {
            groups.sort_unstable();
            groups.dedup();
            if groups.is_empty() {
                return Err(Error::Validation(format!("type {t} belongs to no group")));
            }
            if let Some(g) = groups.iter().find(|&&g| g >= group_count) {
                return Err(Error::Validation(format!("type {t} in unknown group {g}")));
            }
        }
        for (t, l) in parts.limits.iter().enumerate() {
            if !(l.min <= l.ideal && l.ideal <= l.max) {
                return Err(Error::Validation(format!(
                    "type {t} limits must satisfy min <= ideal <= max, got {} {} {}",
                    l.min, l.ideal, l.max
                )));
            }
        }
        let money = parts
            .fixed_rent
            .iter()
            .chain(&parts.attractiveness)
            .chain(&parts.count_slope)
            .chain(std::iter::once(&parts.synergy_bonus));
        for &m in money {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::Validation(format!("rent parameter {m} must be finite and >= 0")));
            }
        }

        let mut area_locations = vec![Vec::new(); area_count];
        for (l, &a) in parts.area_of.iter().enumerate() {
            area_locations[a].push(l);
        }
        let mut share_group = vec![false; type_count * type_count];
        for t in 0..type_count {
            for u in 0..type_count {
                share_group[t * type_count + u] =
                    parts.groups_of[t].iter().any(|g| parts.groups_of[u].contains(g));
            }
        }
        Ok(MallInstance {
            type_domain: (0..type_count as Gene).collect(),
            parts,
            area_locations,
            share_group,
        })
    }

    pub fn parts(&self) -> &MallInstanceParts {
        &self.parts
    }

    pub fn location_count(&self) -> usize {
        self.parts.area_of.len()
    }

    pub fn area_count(&self) -> usize {
        self.parts.area_count
    }

    pub fn type_count(&self) -> usize {
        self.parts.type_count
    }

    pub fn area_of(&self, location: usize) -> usize {
        self.parts.area_of[location]
    }

    pub fn locations_in(&self, area: usize) -> &[usize] {
        &self.area_locations[area]
    }

    pub fn limits(&self, t: usize) -> TypeLimits {
        self.parts.limits[t]
    }

    pub fn caps(&self) -> SizeCaps {
        self.parts.caps
    }

    pub fn groups_of(&self, t: usize) -> &[usize] {
        &self.parts.groups_of[t]
    }

    pub fn fixed_rent(&self, t: usize, area: usize) -> f64 {
        self.parts.fixed_rent[t * self.parts.area_count + area]
    }

    pub fn attractiveness(&self, area: usize, t: usize) -> f64 {
        self.parts.attractiveness[area * self.parts.type_count + t]
    }

    pub fn count_slope(&self, t: usize) -> f64 {
        self.parts.count_slope[t]
    }

    pub fn synergy_bonus(&self) -> f64 {
        self.parts.synergy_bonus
    }

    pub fn share_group(&self, t: usize, u: usize) -> bool {
        self.share_group[t * self.parts.type_count + u]
    }

    fn all_areas(&self) -> PartSet {
        PartSet::all(self.area_count())
    }

    /// Rent and violation of `(location, type)` pairs over the areas in `scope`.
    ///
    /// Pairs must be in ascending location order. The count term uses the
    /// in-scope shop count; violation is only evaluated when `with_violation`.
    fn score<I>(&self, pairs: I, with_violation: bool) -> (f64, u64)
    where
        I: IntoIterator<Item = (usize, Gene)>,
    {
        let areas = self.area_count();
        let types = self.type_count();
        let mut counts = vec![0u32; types * areas];
        let mut last_type: Vec<Option<Gene>> = vec![None; areas];
        let mut synergy_pairs = 0u64;
        for (location, t) in pairs {
            let a = self.parts.area_of[location];
            counts[t as usize * areas + a] += 1;
            if let Some(prev) = last_type[a] {
                if self.share_group(prev as usize, t as usize) {
                    synergy_pairs += 1;
                }
            }
            last_type[a] = Some(t);
        }

        let mut shop_rent = 0.0;
        let mut shops_of_type = vec![0u32; types];
        let mut per_size = [0u32; 3];
        for a in 0..areas {
            for t in 0..types {
                let n = counts[t * areas + a];
                if n == 0 {
                    continue;
                }
                let (fixed, attract) = (self.fixed_rent(t, a), self.attractiveness(a, t));
                for z in decompose(n) {
                    shop_rent += fixed + attract * z.locations() as f64;
                    shops_of_type[t] += 1;
                    per_size[z.locations() - 1] += 1;
                }
            }
        }
        let mut count_term = 0.0;
        for (t, &n) in shops_of_type.iter().enumerate() {
            if n > 0 {
                let ideal = self.parts.limits[t].ideal;
                count_term += self.count_slope(t) * n.abs_diff(ideal) as f64;
            }
        }
        let rent = shop_rent - count_term + self.synergy_bonus() * synergy_pairs as f64;

        let mut violation = 0u64;
        if with_violation {
            for (t, &n) in shops_of_type.iter().enumerate() {
                let l = self.parts.limits[t];
                violation += l.min.saturating_sub(n) as u64 + n.saturating_sub(l.max) as u64;
            }
            for z in [SizeClass::Small, SizeClass::Medium, SizeClass::Large] {
                violation += per_size[z.locations() - 1].saturating_sub(self.parts.caps.get(z)) as u64;
            }
        }
        (rent, violation)
    }

    fn check(&self, a: &MallAssignment) -> Result<()> {
        if a.types.len() != self.location_count() {
            return Err(Error::Contract(format!(
                "assignment covers {} locations, mall has {}",
                a.types.len(),
                self.location_count()
            )));
        }
        for (l, t) in a.types.iter().enumerate() {
            let in_scope = a.scope.contains(self.area_of(l));
            match t {
                Some(t) if !in_scope => {
                    return Err(Error::Contract(format!("location {l} outside scope holds type {t}")))
                }
                None if in_scope => {
                    return Err(Error::Contract(format!("location {l} in scope is vacant")))
                }
                Some(t) if *t as usize >= self.type_count() => {
                    return Err(Error::Contract(format!("location {l} holds unknown type {t}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn require_full(&self, a: &MallAssignment) -> Result<()> {
        self.check(a)?;
        if a.scope != self.all_areas() {
            return Err(Error::Contract(format!(
                "operation needs a full assignment, got areas {:?}",
                a.scope
            )));
        }
        Ok(())
    }

    /// Greedy largest-first shop decomposition per (area, type).
    pub fn derive_shops(&self, a: &MallAssignment) -> Result<ShopList> {
        self.check(a)?;
        let mut shops = Vec::new();
        for area in a.scope.iter() {
            let mut counts = vec![0u32; self.type_count()];
            for &l in self.locations_in(area) {
                if let Some(t) = a.types[l] {
                    counts[t as usize] += 1;
                }
            }
            for (t, &n) in counts.iter().enumerate() {
                shops.extend(decompose(n).map(|size| Shop {
                    shop_type: t as Gene,
                    area,
                    size,
                }));
            }
        }
        Ok(ShopList(shops))
    }

    pub fn mall_rent(&self, a: &MallAssignment) -> Result<f64> {
        self.require_full(a)?;
        Ok(self.score(a.pairs(), false).0)
    }

    /// Area-local rent of a single-area assignment. Mall-wide aspects are
    /// reduced to the in-area shop count against the ideal.
    pub fn area_sub_rent(&self, a: &MallAssignment) -> Result<f64> {
        self.check(a)?;
        if a.scope.len() != 1 {
            return Err(Error::Contract(format!(
                "area sub-rent needs exactly one area, got {:?}",
                a.scope
            )));
        }
        Ok(self.score(a.pairs(), false).0)
    }

    /// Shortfall/excess shops against per-type limits plus size-class overflow.
    pub fn mall_violation(&self, a: &MallAssignment) -> Result<u64> {
        self.require_full(a)?;
        Ok(self.score(a.pairs(), true).1)
    }
}

/// Greedy largest-first split of `n` same-type locations into shops.
pub fn decompose(n: u32) -> impl Iterator<Item = SizeClass> {
    let large = (n / 3) as usize;
    let rest = match n % 3 {
        2 => Some(SizeClass::Medium),
        1 => Some(SizeClass::Small),
        _ => None,
    };
    std::iter::repeat(SizeClass::Large).take(large).chain(rest)
}

/// Shop type per location for the locations of the areas in `scope`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MallAssignment {
    scope: PartSet,
    types: Vec<Option<Gene>>,
}

impl MallAssignment {
    pub fn new(instance: &MallInstance, scope: PartSet, types: Vec<Option<Gene>>) -> Result<Self> {
        let a = MallAssignment { scope, types };
        instance.check(&a)?;
        Ok(a)
    }

    pub fn full(instance: &MallInstance, types: &[Gene]) -> Result<Self> {
        Self::new(instance, instance.all_areas(), types.iter().map(|&t| Some(t)).collect())
    }

    /// Restriction of a full type vector to the locations of `scope`.
    pub fn restricted(instance: &MallInstance, scope: PartSet, types: &[Gene]) -> Result<Self> {
        let choices = types
            .iter()
            .enumerate()
            .map(|(l, &t)| (l < instance.location_count() && scope.contains(instance.area_of(l))).then_some(t))
            .collect();
        Self::new(instance, scope, choices)
    }

    pub fn scope(&self) -> PartSet {
        self.scope
    }

    pub fn shop_type(&self, location: usize) -> Option<Gene> {
        self.types.get(location).copied().flatten()
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, Gene)> + '_ {
        self.types
            .iter()
            .enumerate()
            .filter_map(|(l, t)| t.map(|t| (l, t)))
    }
}

/// Maximization adapter: parts are areas, positions are locations.
#[derive(Debug, Clone)]
pub struct MallProblem {
    instance: MallInstance,
}

impl MallProblem {
    pub fn new(instance: MallInstance) -> Self {
        MallProblem { instance }
    }

    pub fn instance(&self) -> &MallInstance {
        &self.instance
    }
}

impl Problem for MallProblem {
    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn part_count(&self) -> usize {
        self.instance.area_count()
    }

    fn position_count(&self) -> usize {
        self.instance.location_count()
    }

    fn part_of(&self, position: usize) -> usize {
        self.instance.area_of(position)
    }

    fn domain(&self, _position: usize) -> &[Gene] {
        &self.instance.type_domain
    }

    /// Substitute measures ignore every mall-wide constraint, so their
    /// violation is always zero.
    fn evaluate(&self, measure: Measure, positions: &[usize], genes: &[Gene]) -> Evaluation {
        debug_assert_eq!(positions.len(), genes.len());
        let (raw, violation) = self.instance.score(
            positions.iter().copied().zip(genes.iter().copied()),
            measure.full,
        );
        Evaluation { raw, violation }
    }
}
