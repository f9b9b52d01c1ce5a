//! Splitting a guarantee between one subsystem and the rest of the network.
//!
//! A split `(down, up)` is admissible when every local output valuation in
//! `down` combined with every remaining output valuation in `up` satisfies
//! the guarantee. Maximal splits are the maximal bicliques of the bipartite
//! graph whose edges are the satisfying pairs.

use std::cmp::Ordering;

use fixedbitset::FixedBitSet;

use crate::boolean::{BoolFunc, VariableSet, MAX_VARS};
use crate::network::{BooleanNetwork, NetworkError};

/// A split `γ = (down, up)` of a guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    /// Over the outputs of the chosen subsystem.
    pub down: BoolFunc,
    /// Over the remaining outputs that the guarantee mentions.
    pub up: BoolFunc,
}

/// A complete bipartite subgraph, as sorted left and right node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Biclique {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Biclique {
    pub fn size(&self) -> usize {
        self.left.len() * self.right.len()
    }

    /// Larger bicliques first, then by left side.
    pub fn canonical_cmp(&self, other: &Biclique) -> Ordering {
        other
            .size()
            .cmp(&self.size())
            .then_with(|| self.left.cmp(&other.left))
            .then_with(|| self.right.cmp(&other.right))
    }
}

/// Left nodes are the valuations of `left_scope`, right nodes those of
/// `right_scope`; `(l, r)` is an edge iff the joint valuation satisfies the
/// guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionGraph {
    left_scope: VariableSet,
    right_scope: VariableSet,
    adjacency: Vec<FixedBitSet>,
}

impl DistributionGraph {
    /// Graph of `g` split between `local` and the other variables of `g`.
    pub fn new(g: &BoolFunc, local: &VariableSet) -> Self {
        let right_scope = g.scope().difference(local);
        let joint = local.union(&right_scope);
        assert!(joint.len() <= MAX_VARS, "distribution graph over {} variables", joint.len());
        let g = g.extend_to(&joint).expect("joint scope covers g");
        let n_right = right_scope.valuation_count();
        let adjacency = (0..local.valuation_count())
            .map(|l| {
                let mut row = FixedBitSet::with_capacity(n_right);
                for r in 0..n_right {
                    if g.eval_index(l * n_right + r) {
                        row.insert(r);
                    }
                }
                row
            })
            .collect();
        DistributionGraph {
            left_scope: local.clone(),
            right_scope,
            adjacency,
        }
    }

    /// Builds a graph directly from an adjacency list.
    pub fn from_adjacency(left_scope: VariableSet, right_scope: VariableSet, edges: &[(usize, usize)]) -> Self {
        let n_right = right_scope.valuation_count();
        let mut adjacency = vec![FixedBitSet::with_capacity(n_right); left_scope.valuation_count()];
        for &(l, r) in edges {
            adjacency[l].insert(r);
        }
        DistributionGraph {
            left_scope,
            right_scope,
            adjacency,
        }
    }

    pub fn left_scope(&self) -> &VariableSet {
        &self.left_scope
    }

    pub fn right_scope(&self) -> &VariableSet {
        &self.right_scope
    }

    pub fn left_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_scope.valuation_count()
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adjacency[l].contains(r)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(l, row)| row.ones().map(move |r| (l, r)))
            .collect()
    }

    /// Right neighbourhood of left node `l`.
    pub fn neighbors(&self, l: usize) -> &FixedBitSet {
        &self.adjacency[l]
    }

    fn right_neighbors(&self) -> Vec<FixedBitSet> {
        let mut cols = vec![FixedBitSet::with_capacity(self.left_count()); self.right_count()];
        for (l, row) in self.adjacency.iter().enumerate() {
            for r in row.ones() {
                cols[r].insert(l);
            }
        }
        cols
    }

    /// All maximal bicliques with both sides nonempty, in canonical order.
    pub fn maximal_bicliques(&self) -> Vec<Biclique> {
        let cols = self.right_neighbors();
        let all_left: FixedBitSet = {
            let mut s = FixedBitSet::with_capacity(self.left_count());
            s.insert_range(..);
            s
        };
        let candidates: Vec<usize> = (0..self.right_count()).filter(|&r| !cols[r].is_clear()).collect();
        let mut out = Vec::new();
        mbea(&cols, &all_left, &[], candidates, Vec::new(), &mut out);
        out.sort_by(Biclique::canonical_cmp);
        out
    }

    pub fn to_distribution(&self, b: &Biclique) -> Distribution {
        Distribution {
            down: BoolFunc::from_indices(&self.left_scope, b.left.iter().copied()),
            up: BoolFunc::from_indices(&self.right_scope, b.right.iter().copied()),
        }
    }

    /// Maximal distributions in canonical order.
    pub fn maximal_distributions(&self) -> Vec<Distribution> {
        self.maximal_bicliques()
            .iter()
            .map(|b| self.to_distribution(b))
            .collect()
    }
}

/// Maximal biclique enumeration in the style of Bron–Kerbosch: `left` is
/// the common neighbourhood of `right`, `p` holds right nodes that may still
/// be added and `q` right nodes already explored at this level.
fn mbea(
    cols: &[FixedBitSet],
    left: &FixedBitSet,
    right: &[usize],
    mut p: Vec<usize>,
    mut q: Vec<usize>,
    out: &mut Vec<Biclique>,
) {
    while !p.is_empty() {
        let x = p.remove(0);
        let mut new_left = left.clone();
        new_left.intersect_with(&cols[x]);
        let size = new_left.count_ones(..);
        if size == 0 {
            continue;
        }
        let mut new_right = right.to_vec();
        new_right.push(x);

        let mut new_q = Vec::new();
        let mut maximal = true;
        for &v in &q {
            let n = new_left.intersection_count(&cols[v]);
            if n == size {
                maximal = false;
                break;
            }
            if n > 0 {
                new_q.push(v);
            }
        }
        if maximal {
            let mut new_p = Vec::new();
            for &v in &p {
                let n = new_left.intersection_count(&cols[v]);
                if n == size {
                    new_right.push(v);
                } else if n > 0 {
                    new_p.push(v);
                }
            }
            let mut r = new_right.clone();
            r.sort_unstable();
            out.push(Biclique {
                left: new_left.ones().collect(),
                right: r,
            });
            if !new_p.is_empty() {
                mbea(cols, &new_left, &new_right, new_p, new_q, out);
            }
        }
        q.push(x);
    }
}

/// Distribution graph of `g` at subsystem `i` of `net`.
pub fn build_distribution_graph(
    g: &BoolFunc,
    net: &BooleanNetwork,
    i: &str,
) -> Result<DistributionGraph, NetworkError> {
    let sys = net
        .subsystem(i)
        .ok_or_else(|| NetworkError::UnknownSubsystem(i.to_string()))?;
    Ok(DistributionGraph::new(g, &sys.output_vars()))
}

/// The maximal distributions of `g` at subsystem `i`, largest first.
pub fn maximal_distributions(
    g: &BoolFunc,
    net: &BooleanNetwork,
    i: &str,
) -> Result<Vec<Distribution>, NetworkError> {
    Ok(build_distribution_graph(g, net, i)?.maximal_distributions())
}
