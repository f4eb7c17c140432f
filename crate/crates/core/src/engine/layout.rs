use crate::error::{Error, Result};
use crate::problem::{Gene, Problem};

use super::topology::{NodeId, PyramidTopology};

const ABSENT: usize = usize::MAX;

/// Position bookkeeping for a topology over a concrete problem: which string
/// positions each node's genomes cover, and where each decomposition slot's
/// genes land in the assembled genome.
#[derive(Debug, Clone)]
pub struct Layout {
    positions: Vec<Vec<usize>>,
    /// `scatter[node][decomposition][slot][i]` is the index in the node's
    /// genome receiving gene `i` of the slot genome.
    scatter: Vec<Vec<Vec<Vec<usize>>>>,
}

impl Layout {
    pub fn new<P: Problem + ?Sized>(problem: &P, topology: &PyramidTopology) -> Self {
        let positions: Vec<Vec<usize>> = topology
            .nodes()
            .iter()
            .map(|n| problem.positions_of(n.parts))
            .collect();
        let scatter = (0..topology.len())
            .map(|id| {
                let mut local = vec![ABSENT; problem.position_count()];
                for (i, &p) in positions[id].iter().enumerate() {
                    local[p] = i;
                }
                topology
                    .decompositions(id)
                    .iter()
                    .map(|dec| {
                        dec.iter()
                            .map(|&slot| positions[slot].iter().map(|&p| local[p]).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Layout { positions, scatter }
    }

    pub fn positions(&self, node: NodeId) -> &[usize] {
        &self.positions[node]
    }

    pub fn genome_len(&self, node: NodeId) -> usize {
        self.positions[node].len()
    }

    /// Copies one slot's genes into an assembled genome of `node`.
    pub fn scatter_slot(&self, node: NodeId, decomposition: usize, slot: usize, genes: &[Gene], out: &mut [Gene]) {
        let targets = &self.scatter[node][decomposition][slot];
        debug_assert_eq!(targets.len(), genes.len());
        for (&t, &g) in targets.iter().zip(genes) {
            out[t] = g;
        }
    }

    /// Concatenates slot genomes along a registered decomposition.
    pub fn assemble_decomposition(&self, node: NodeId, decomposition: usize, slots: &[&[Gene]]) -> Vec<Gene> {
        let mut out = vec![0; self.genome_len(node)];
        for (slot, genes) in slots.iter().enumerate() {
            self.scatter_slot(node, decomposition, slot, genes, &mut out);
        }
        out
    }

    /// Assembles `node` from `(slot node, genome)` parts, which must form one
    /// of its registered decompositions (in any order).
    pub fn assemble(&self, topology: &PyramidTopology, node: NodeId, parts: &[(NodeId, &[Gene])]) -> Result<Vec<Gene>> {
        let ids: Vec<NodeId> = parts.iter().map(|(id, _)| *id).collect();
        let dec = topology.decomposition_index(node, &ids).ok_or_else(|| {
            Error::Contract(format!(
                "{ids:?} is not a registered decomposition of {}",
                topology.node(node).label
            ))
        })?;
        let order = &topology.decompositions(node)[dec];
        let mut out = vec![0; self.genome_len(node)];
        for (slot, slot_node) in order.iter().enumerate() {
            let (_, genes) = parts.iter().find(|(id, _)| id == slot_node).expect("matched above");
            if genes.len() != self.genome_len(*slot_node) {
                return Err(Error::Contract(format!(
                    "genome for {} has {} genes, expected {}",
                    topology.node(*slot_node).label,
                    genes.len(),
                    self.genome_len(*slot_node)
                )));
            }
            self.scatter_slot(node, dec, slot, genes, &mut out);
        }
        Ok(out)
    }
}
