use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::{Direction, Gene};

use super::topology::{Decomposition, NodeId, PyramidTopology};

/// Two-parent two-children parameterized uniform crossover.
///
/// The first child takes each gene from `a` with probability `p`, the second
/// child takes the other parent's gene at every position.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &[Gene],
    b: &[Gene],
    p: f64,
    rng: &mut R,
) -> Result<(Vec<Gene>, Vec<Gene>)> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!(
            "crossover parents cover {} and {} positions",
            a.len(),
            b.len()
        )));
    }
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        if rng.gen_bool(p) {
            c1.push(x);
            c2.push(y);
        } else {
            c1.push(y);
            c2.push(x);
        }
    }
    Ok((c1, c2))
}

/// Re-initializes each gene with probability `rate` from its domain.
pub fn mutate<R: Rng + ?Sized>(genome: &mut [Gene], rate: f64, domains: &[&[Gene]], rng: &mut R) {
    debug_assert_eq!(genome.len(), domains.len());
    if rate <= 0.0 {
        return;
    }
    for (gene, domain) in genome.iter_mut().zip(domains) {
        if rng.gen_bool(rate) {
            *gene = domain[rng.gen_range(0..domain.len())];
        }
    }
}

/// Uniform choice among a node's registered decompositions.
pub fn pick_decomposition<'t, R: Rng + ?Sized>(
    topology: &'t PyramidTopology,
    node: NodeId,
    rng: &mut R,
) -> Result<&'t Decomposition> {
    let decs = topology.decompositions(node);
    if decs.is_empty() {
        return Err(Error::Contract(format!(
            "node {} is a leaf and cannot be assembled",
            topology.node(node).label
        )));
    }
    Ok(&decs[rng.gen_range(0..decs.len())])
}

/// Rank-proportional roulette wheel over one sub-population.
///
/// The best agent gets rank N, the worst rank 1; among equal values the
/// lower index ranks higher. Selection probability is `rank / (N(N+1)/2)`.
#[derive(Debug, Clone)]
pub struct RankWheel {
    /// Agent indices from best to worst.
    order: Vec<usize>,
}

impl RankWheel {
    pub fn new(values: &[f64], direction: Direction) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| {
            direction
                .to_cost(values[i])
                .total_cmp(&direction.to_cost(values[j]))
                .then(i.cmp(&j))
        });
        RankWheel { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Agent indices from best to worst.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Rank of the agent at `position` in best-to-worst order.
    pub fn rank_at(&self, position: usize) -> usize {
        self.order.len() - position
    }

    pub fn total_rank(&self) -> usize {
        let n = self.order.len();
        n * (n + 1) / 2
    }

    pub fn spin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.order.len();
        assert!(n > 0, "rank roulette over an empty population");
        // Ranks N, N-1, .., 1 in best-to-worst order; find the slot holding
        // ticket `r` by its cumulative rank sum.
        let r = rng.gen_range(0..self.total_rank());
        let (mut lo, mut hi) = (0usize, n - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            // Cumulative rank of positions 0..=mid.
            let cum = (mid + 1) * n - mid * (mid + 1) / 2;
            if r < cum {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.order[lo]
    }
}

/// One rank-roulette draw over penalized values.
pub fn rank_roulette<R: Rng + ?Sized>(values: &[f64], direction: Direction, rng: &mut R) -> usize {
    RankWheel::new(values, direction).spin(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_parents_give_identical_children() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = vec![3, 1, 4, 1, 5];
        let (c1, c2) = uniform_crossover(&a, &a, 0.66, &mut rng).unwrap();
        assert_eq!(c1, a);
        assert_eq!(c2, a);
    }

    #[test]
    fn bias_one_copies_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = vec![0; 8];
        let b = vec![1; 8];
        let (c1, c2) = uniform_crossover(&a, &b, 1.0, &mut rng).unwrap();
        assert_eq!((c1, c2), (a, b));
    }

    #[test]
    fn mismatched_parents_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(uniform_crossover(&[1, 2], &[1], 0.5, &mut rng).is_err());
    }

    #[test]
    fn children_are_complementary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<Gene> = (0..50).collect();
        let b: Vec<Gene> = (100..150).collect();
        let (c1, c2) = uniform_crossover(&a, &b, 0.66, &mut rng).unwrap();
        for i in 0..50 {
            assert!((c1[i] == a[i] && c2[i] == b[i]) || (c1[i] == b[i] && c2[i] == a[i]));
        }
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dom: Vec<Gene> = (0..10).collect();
        let domains = vec![dom.as_slice(); 6];
        let mut g = vec![1, 2, 3, 4, 5, 6];
        mutate(&mut g, 0.0, &domains, &mut rng);
        assert_eq!(g, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn full_rate_on_singleton_domain_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let doms: Vec<Vec<Gene>> = vec![vec![7], vec![2], vec![9]];
        let domains: Vec<&[Gene]> = doms.iter().map(|d| d.as_slice()).collect();
        let mut g = vec![7, 2, 9];
        mutate(&mut g, 1.0, &domains, &mut rng);
        assert_eq!(g, vec![7, 2, 9]);
    }

    #[test]
    fn single_agent_always_selected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(rank_roulette(&[42.0], Direction::Minimize, &mut rng), 0);
        }
    }

    #[test]
    fn ties_rank_lower_index_higher() {
        let w = RankWheel::new(&[5.0, 5.0, 5.0, 5.0], Direction::Maximize);
        assert_eq!(w.order(), &[0, 1, 2, 3]);
        assert_eq!(w.total_rank(), 10);
        let ranks: usize = (0..4).map(|p| w.rank_at(p)).sum();
        assert_eq!(ranks, 4 * 5 / 2);
    }

    #[test]
    fn wheel_orders_by_direction() {
        assert_eq!(RankWheel::new(&[3.0, 1.0, 2.0], Direction::Minimize).order(), &[1, 2, 0]);
        assert_eq!(RankWheel::new(&[3.0, 1.0, 2.0], Direction::Maximize).order(), &[0, 2, 1]);
    }

    #[test]
    fn spin_matches_rank_weights() {
        // Exact ticket accounting: every ticket maps to the position whose
        // cumulative rank range contains it.
        let values: Vec<f64> = (0..7).map(|v| v as f64).collect();
        let w = RankWheel::new(&values, Direction::Minimize);
        let n = w.len();
        let mut expected = Vec::new();
        for pos in 0..n {
            expected.extend(std::iter::repeat(w.order()[pos]).take(w.rank_at(pos)));
        }
        assert_eq!(expected.len(), w.total_rank());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts = vec![0usize; n];
        let draws = 70_000;
        for _ in 0..draws {
            counts[w.spin(&mut rng)] += 1;
        }
        for (agent, &c) in counts.iter().enumerate() {
            let want = expected.iter().filter(|&&a| a == agent).count() as f64 / w.total_rank() as f64;
            let got = c as f64 / draws as f64;
            assert!((got - want).abs() < 0.01, "agent {agent}: {got} vs {want}");
        }
    }
}
