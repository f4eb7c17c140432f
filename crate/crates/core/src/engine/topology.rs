//! Pyramid layouts: which sub-populations exist, which string parts each
//! one optimizes, and how higher nodes are assembled from lower ones.

use crate::error::{Error, Result};
use crate::problem::{Measure, PartSet};

pub type NodeId = usize;

pub const DEFAULT_SUBPOP_SIZE: usize = 100;
pub const NURSE_MAIN_SIZE: usize = 300;
pub const MALL_MAIN_SIZE: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub label: String,
    pub parts: PartSet,
    pub measure: Measure,
    pub population_size: usize,
}

/// One way of assembling a node: an ordered list of slot nodes whose part
/// sets partition the node's part set.
pub type Decomposition = Vec<NodeId>;

#[derive(Debug, Clone, PartialEq)]
pub struct PyramidTopology {
    nodes: Vec<Node>,
    decompositions: Vec<Vec<Decomposition>>,
    /// Cross-node pairing partners for joined topologies.
    partners: Vec<Vec<NodeId>>,
    top: NodeId,
    joined: bool,
}

impl PyramidTopology {
    /// Validates the partition and top-node invariants.
    pub fn new(nodes: Vec<Node>, decompositions: Vec<Vec<Decomposition>>, top: NodeId) -> Result<Self> {
        let t = PyramidTopology {
            partners: vec![Vec::new(); nodes.len()],
            nodes,
            decompositions,
            top,
            joined: false,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Contract("topology has no nodes".to_string()));
        }
        if self.decompositions.len() != self.nodes.len() {
            return Err(Error::Contract("one decomposition list per node required".to_string()));
        }
        if self.top >= self.nodes.len() {
            return Err(Error::Contract(format!("top node {} does not exist", self.top)));
        }
        if let Some(n) = self.nodes.iter().find(|n| n.population_size == 0) {
            return Err(Error::Contract(format!("node {} has an empty population", n.label)));
        }
        let full = self.nodes.iter().fold(PartSet::EMPTY, |acc, n| acc.union(n.parts));
        if self.nodes[self.top].parts != full {
            return Err(Error::Contract("top node must hold the full part set".to_string()));
        }
        if !self.joined {
            let originals = self.nodes.iter().filter(|n| n.measure.full).count();
            if originals != 1 || !self.nodes[self.top].measure.full {
                return Err(Error::Contract(
                    "exactly one node, the top, evaluates the original objective".to_string(),
                ));
            }
        }
        for (id, decs) in self.decompositions.iter().enumerate() {
            for dec in decs {
                let mut union = PartSet::EMPTY;
                for &slot in dec {
                    let parts = self
                        .nodes
                        .get(slot)
                        .ok_or_else(|| Error::Contract(format!("unknown slot node {slot}")))?
                        .parts;
                    if slot == id || !union.is_disjoint(parts) {
                        return Err(Error::Contract(format!(
                            "decomposition {dec:?} of {} overlaps",
                            self.nodes[id].label
                        )));
                    }
                    union = union.union(parts);
                }
                if dec.is_empty() || union != self.nodes[id].parts {
                    return Err(Error::Contract(format!(
                        "decomposition {dec:?} does not cover {}",
                        self.nodes[id].label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn top(&self) -> NodeId {
        self.top
    }

    pub fn is_joined(&self) -> bool {
        self.joined
    }

    pub fn decompositions(&self, id: NodeId) -> &[Decomposition] {
        &self.decompositions[id]
    }

    pub fn partners(&self, id: NodeId) -> &[NodeId] {
        &self.partners[id]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.decompositions[id].is_empty()
    }

    pub fn total_population(&self) -> usize {
        self.nodes.iter().map(|n| n.population_size).sum()
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Index of a registered decomposition matching `slots` as a set.
    pub fn decomposition_index(&self, id: NodeId, slots: &[NodeId]) -> Option<usize> {
        let mut want = slots.to_vec();
        want.sort_unstable();
        self.decompositions[id].iter().position(|dec| {
            let mut have = dec.clone();
            have.sort_unstable();
            have == want
        })
    }

    /// The joined variant: every node solves the original problem over the
    /// full string, assembly is disabled, and former decomposition members
    /// become cross-node pairing partners.
    pub fn joined(&self) -> PyramidTopology {
        let full = self.nodes[self.top].parts;
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                label: n.label.clone(),
                parts: full,
                measure: Measure::original(full),
                population_size: n.population_size,
            })
            .collect();
        let partners = self
            .decompositions
            .iter()
            .map(|decs| {
                let mut p: Vec<NodeId> = decs.iter().flatten().copied().collect();
                p.sort_unstable();
                p.dedup();
                p
            })
            .collect();
        PyramidTopology {
            nodes,
            decompositions: vec![Vec::new(); self.nodes.len()],
            partners,
            top: self.top,
            joined: true,
        }
    }
}

/// Eight-node nurse pyramid: grades {1},{2},{3}, pairs {1,2},{2,3},{3,1},
/// the substitute-measured {1,2,3} and the top node "all".
pub fn nurse_topology(subpop_size: usize, main_size: usize) -> PyramidTopology {
    let g = |grades: &[usize]| PartSet::from_parts(grades.iter().map(|g| g - 1));
    let lower = |label: &str, parts: PartSet| Node {
        label: label.to_string(),
        parts,
        measure: Measure::substitute(parts),
        population_size: subpop_size,
    };
    let all = g(&[1, 2, 3]);
    let nodes = vec![
        lower("1", g(&[1])),
        lower("2", g(&[2])),
        lower("3", g(&[3])),
        lower("1+2", g(&[1, 2])),
        lower("2+3", g(&[2, 3])),
        lower("3+1", g(&[3, 1])),
        lower("1+2+3", all),
        Node {
            label: "all".to_string(),
            parts: all,
            measure: Measure::original(all),
            population_size: main_size,
        },
    ];
    let three_way = vec![vec![3, 2], vec![4, 0], vec![5, 1], vec![0, 1, 2]];
    let mut top_ways = vec![vec![6]];
    top_ways.extend(three_way.iter().cloned());
    let decompositions = vec![
        vec![],
        vec![],
        vec![],
        vec![vec![0, 1]],
        vec![vec![1, 2]],
        vec![vec![2, 0]],
        three_way,
        top_ways,
    ];
    PyramidTopology::new(nodes, decompositions, 7).expect("nurse pyramid is well formed")
}

/// Two-level mall pyramid: one node per area and a top node assembled from
/// one agent of every area.
pub fn mall_topology(area_count: usize, subpop_size: usize, main_size: usize) -> PyramidTopology {
    let mut nodes: Vec<Node> = (0..area_count)
        .map(|a| {
            let parts = PartSet::from_parts([a]);
            Node {
                label: (a + 1).to_string(),
                parts,
                measure: Measure::substitute(parts),
                population_size: subpop_size,
            }
        })
        .collect();
    let all = PartSet::all(area_count);
    nodes.push(Node {
        label: "all".to_string(),
        parts: all,
        measure: Measure::original(all),
        population_size: main_size,
    });
    let mut decompositions = vec![Vec::new(); area_count];
    decompositions.push(vec![(0..area_count).collect()]);
    PyramidTopology::new(nodes, decompositions, area_count).expect("mall pyramid is well formed")
}

pub fn build_nurse_topology(main_size: usize) -> PyramidTopology {
    nurse_topology(DEFAULT_SUBPOP_SIZE, main_size)
}

pub fn build_mall_topology(main_size: usize) -> PyramidTopology {
    mall_topology(5, DEFAULT_SUBPOP_SIZE, main_size)
}
