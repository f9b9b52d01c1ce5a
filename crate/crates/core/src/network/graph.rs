use petgraph::algo::{tarjan_scc, toposort};
use petgraph::graph::{DiGraph, NodeIndex};

/// The digraph induced by a network's wiring: one node per subsystem and an
/// edge `(i, j)` whenever some output of `i` drives an input of `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemGraph {
    nodes: Vec<String>,
    /// Sorted, deduplicated `(from, to)` node indices.
    edges: Vec<(usize, usize)>,
}

impl SystemGraph {
    pub fn new(nodes: Vec<String>, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        SystemGraph { nodes, edges }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn named_edges(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn parents(&self, node: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == node).map(|e| e.0).collect()
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == node).map(|e| e.1).collect()
    }

    /// Nodes without outgoing edges, in declaration order.
    pub fn leaves(&self) -> Vec<String> {
        (0..self.nodes.len())
            .filter(|&i| !self.edges.iter().any(|e| e.0 == i))
            .map(|i| self.nodes[i].clone())
            .collect()
    }

    /// On an acyclic graph, any two nodes are joined by at most one path iff
    /// every node has at most one parent.
    pub fn is_forest(&self) -> bool {
        (0..self.nodes.len()).all(|i| self.edges.iter().filter(|e| e.1 == i).count() <= 1)
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::new();
        let idx: Vec<NodeIndex> = self.nodes.iter().map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            g.add_edge(idx[a], idx[b], ());
        }
        g
    }

    /// A topological order of node indices, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        toposort(&self.digraph(), None)
            .ok()
            .map(|order| order.into_iter().map(|n| n.index()).collect())
    }

    /// Node sets of the nontrivial strongly connected components (including
    /// self-loops), each sorted, in order of their least member.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = tarjan_scc(&self.digraph())
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || self.edges.contains(&(c[0], c[0])))
            .collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> SystemGraph {
        SystemGraph::new((0..n).map(|i| format!("S{}", i + 1)).collect(), edges.to_vec())
    }

    #[test]
    fn leaves_and_forest() {
        let ex1 = g(2, &[(0, 1)]);
        assert_eq!(ex1.leaves(), vec!["S2"]);
        assert!(ex1.is_forest());
        let ex4 = g(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(ex4.leaves(), vec!["S3"]);
        assert!(!ex4.is_forest());
        let empty = g(3, &[]);
        assert_eq!(empty.leaves(), vec!["S1", "S2", "S3"]);
        assert!(empty.is_forest());
        assert!(g(0, &[]).is_forest());
    }

    #[test]
    fn cycles_detected() {
        let c = g(3, &[(0, 1), (1, 0), (1, 2)]);
        assert!(c.topological_order().is_none());
        assert_eq!(c.cycles(), vec![vec![0, 1]]);
        let ok = g(3, &[(0, 2), (1, 2)]);
        let order = ok.topological_order().unwrap();
        assert_eq!(*order.last().unwrap(), 2);
        assert!(ok.cycles().is_empty());
    }
}
