use crate::problem::{Direction, Evaluation};

/// Adaptive penalty weight of one sub-population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyState {
    pub weight: f64,
    pub growth: f64,
    pub floor: f64,
    /// Upper bound on the weight. Keeps raw values distinguishable next to
    /// `weight * violation` in floating point during long infeasible phases.
    pub ceiling: f64,
}

impl PenaltyState {
    pub fn new(floor: f64, growth: f64) -> Self {
        Self::with_ceiling(floor, growth, f64::INFINITY)
    }

    pub fn with_ceiling(floor: f64, growth: f64, ceiling: f64) -> Self {
        assert!(floor > 0.0 && growth > 1.0, "penalty floor must be > 0 and growth > 1");
        assert!(ceiling >= floor, "penalty ceiling below floor");
        PenaltyState {
            weight: floor,
            growth,
            floor,
            ceiling,
        }
    }

    pub fn penalize(&self, direction: Direction, e: &Evaluation) -> f64 {
        direction.penalize(e.raw, self.weight, e.violation)
    }

    /// Adjusts the weight from the gap between the best agent (by penalized
    /// value under the current weight) and the best feasible agent.
    ///
    /// * best agent feasible: shrink by the growth factor, not below the floor;
    /// * best agent infeasible, some agent feasible: set the weight so the
    ///   raw gap is bridged per violation unit, plus the floor;
    /// * no feasible agent: grow geometrically.
    ///
    /// The result is clamped to `[floor, ceiling]`.
    pub fn update(&mut self, direction: Direction, evaluations: &[Evaluation]) {
        let mut best: Option<(f64, &Evaluation)> = None;
        let mut best_feasible: Option<&Evaluation> = None;
        for e in evaluations {
            let p = direction.to_cost(self.penalize(direction, e));
            if best.map_or(true, |(bp, _)| p < bp) {
                best = Some((p, e));
            }
            if e.is_feasible() && best_feasible.map_or(true, |f| direction.better(e.raw, f.raw)) {
                best_feasible = Some(e);
            }
        }
        let Some((_, best)) = best else { return };
        let weight = match best_feasible {
            None => self.weight * self.growth,
            Some(_) if best.is_feasible() => (self.weight / self.growth).max(self.floor),
            Some(f) => {
                let gap = (best.raw - f.raw).abs() / (best.violation.max(1) as f64);
                gap + self.floor
            }
        };
        self.weight = weight.clamp(self.floor, self.ceiling);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(raw: f64, violation: u64) -> Evaluation {
        Evaluation { raw, violation }
    }

    #[test]
    fn feasible_best_shrinks_toward_floor() {
        let mut p = PenaltyState::new(1.0, 2.0);
        p.weight = 8.0;
        let pop = [ev(5.0, 0), ev(9.0, 1)];
        p.update(Direction::Minimize, &pop);
        assert_eq!(p.weight, 4.0);
        for _ in 0..10 {
            p.update(Direction::Minimize, &pop);
        }
        assert_eq!(p.weight, 1.0);
    }

    #[test]
    fn no_feasible_grows_geometrically() {
        let mut p = PenaltyState::new(1.0, 2.0);
        p.weight = 3.0;
        let pop = [ev(5.0, 2), ev(9.0, 1)];
        for _ in 0..3 {
            p.update(Direction::Minimize, &pop);
        }
        assert_eq!(p.weight, 24.0);
    }

    #[test]
    fn gap_rule_uses_violation_of_best() {
        let mut p = PenaltyState::new(1.0, 2.0);
        // best by penalized (w=1): 2 + 2 = 4 < 10; best feasible raw 10.
        p.update(Direction::Minimize, &[ev(2.0, 2), ev(10.0, 0)]);
        assert_eq!(p.weight, 8.0 / 2.0 + 1.0);

        let mut p = PenaltyState::new(1.0, 2.0);
        // maximize: best 20 - 1 = 19 > 12.
        p.update(Direction::Maximize, &[ev(20.0, 1), ev(12.0, 0)]);
        assert_eq!(p.weight, 9.0);
    }

    #[test]
    fn growth_stops_at_ceiling() {
        let mut p = PenaltyState::with_ceiling(1.0, 2.0, 100.0);
        for _ in 0..20 {
            p.update(Direction::Maximize, &[ev(5.0, 3)]);
        }
        assert_eq!(p.weight, 100.0);
    }

    #[test]
    fn empty_population_keeps_weight() {
        let mut p = PenaltyState::new(1.0, 2.0);
        p.update(Direction::Minimize, &[]);
        assert_eq!(p.weight, 1.0);
    }
}
