//! Electric power system topologies: ingestion, live-path semantics and
//! compilation to a Boolean network with a contract.
//!
//! Generators, rectifiers and transformers can fail; each has a health bit.
//! Buses and dummy junctions are always healthy. Contactors are the control
//! inputs. Feeder edges conduct only from `a` to `b`; all other edges conduct
//! both ways.

mod check;
mod compile;
mod semantics;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolean::is_identifier;
use crate::network::NetworkError;

pub use check::{check_faithfulness, Mismatch};
pub use compile::{compile_to_network, load_partition, CompiledEps, Group, Partition};
pub use semantics::{ac_coupled, bus_status, live_path};

#[derive(Debug, thiserror::Error)]
pub enum EpsError {
    #[error("malformed topology: {0}")]
    Json(#[from] serde_json::Error),
    #[error("name '{0}' is used more than once")]
    DuplicateName(String),
    #[error("'{0}' is not a valid name")]
    InvalidName(String),
    #[error("edge {edge} refers to unknown node '{node}'")]
    UnknownEndpoint { edge: String, node: String },
    #[error("edge {0} connects a node to itself")]
    SelfLoop(String),
    #[error("feeder '{0}' is not an edge")]
    UnknownFeeder(String),
    #[error("unknown component '{0}'")]
    UnknownComponent(String),
    #[error("'{0}' is not a bus")]
    NotABus(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("AC generators {0} and {1} are in different groups")]
    SplitAcSources(String, String),
    #[error("compiled network is ill-formed: {0}")]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Generator,
    Rectifier,
    Transformer,
    Bus,
    Dummy,
}

impl NodeKind {
    /// Whether the component can go offline.
    pub fn can_fail(self) -> bool {
        matches!(self, NodeKind::Generator | NodeKind::Rectifier | NodeKind::Transformer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Current {
    Ac,
    Dc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub current: Current,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// A switchable connection, named by its contactor.
    Contactor(String),
    /// A permanent wire link.
    Solid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    #[serde(flatten)]
    pub kind: EdgeKind,
}

impl Edge {
    pub fn name(&self) -> &str {
        match &self.kind {
            EdgeKind::Contactor(n) | EdgeKind::Solid(n) => n,
        }
    }

    pub fn contactor(&self) -> Option<&str> {
        match &self.kind {
            EdgeKind::Contactor(n) => Some(n),
            EdgeKind::Solid(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    nodes: Vec<Node>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    feeders: Vec<String>,
}

/// A validated single-line diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerTopology {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    /// Indices into `edges`.
    feeders: BTreeSet<usize>,
    /// Endpoint node indices per edge.
    ends: Vec<(usize, usize)>,
}

impl PowerTopology {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, feeders: &[String]) -> Result<Self, EpsError> {
        let mut names = BTreeSet::new();
        for name in nodes.iter().map(|n| n.name.as_str()).chain(edges.iter().map(Edge::name)) {
            if !is_identifier(name) {
                return Err(EpsError::InvalidName(name.to_string()));
            }
            if !names.insert(name) {
                return Err(EpsError::DuplicateName(name.to_string()));
            }
        }
        let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let mut ends = Vec::new();
        for e in &edges {
            let find = |n: &str| {
                index.get(n).copied().ok_or_else(|| EpsError::UnknownEndpoint {
                    edge: e.name().to_string(),
                    node: n.to_string(),
                })
            };
            let (a, b) = (find(&e.a)?, find(&e.b)?);
            if a == b {
                return Err(EpsError::SelfLoop(e.name().to_string()));
            }
            ends.push((a, b));
        }
        let feeders = feeders
            .iter()
            .map(|f| {
                edges
                    .iter()
                    .position(|e| e.name() == f)
                    .ok_or_else(|| EpsError::UnknownFeeder(f.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(PowerTopology {
            nodes,
            edges,
            feeders,
            ends,
        })
    }

    pub fn parse(text: &str) -> Result<Self, EpsError> {
        let doc: TopologyDoc = serde_json::from_str(text)?;
        Self::new(doc.nodes, doc.edges, &doc.feeders)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(&TopologyDoc {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            feeders: self.feeders.iter().map(|&i| self.edges[i].name().to_string()).collect(),
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub(crate) fn ends(&self, edge: usize) -> (usize, usize) {
        self.ends[edge]
    }

    pub fn is_feeder(&self, edge: usize) -> bool {
        self.feeders.contains(&edge)
    }

    /// Components with a health bit, in declaration order.
    pub fn fallible(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.kind.can_fail())
            .map(|n| n.name.as_str())
            .collect()
    }

    pub fn contactors(&self) -> Vec<&str> {
        self.edges.iter().filter_map(Edge::contactor).collect()
    }

    pub fn of_kind(&self, kind: NodeKind) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.kind == kind)
            .map(|n| n.name.as_str())
            .collect()
    }
}

/// Set of offline components; anything not listed is healthy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HealthState {
    pub offline: BTreeSet<String>,
}

impl HealthState {
    pub fn all_healthy() -> Self {
        Self::default()
    }

    pub fn with_offline<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        HealthState {
            offline: names.into_iter().map(String::from).collect(),
        }
    }

    pub fn is_healthy(&self, node: &Node) -> bool {
        !node.kind.can_fail() || !self.offline.contains(&node.name)
    }
}

/// Set of closed contactors; anything not listed is open.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContactorState {
    pub closed: BTreeSet<String>,
}

impl ContactorState {
    pub fn all_open() -> Self {
        Self::default()
    }

    pub fn with_closed<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        ContactorState {
            closed: names.into_iter().map(String::from).collect(),
        }
    }

    pub fn conducts(&self, edge: &Edge) -> bool {
        edge.contactor().is_none_or(|c| self.closed.contains(c))
    }
}

impl fmt::Display for PowerTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nodes, {} edges, {} feeders", self.nodes.len(), self.edges.len(), self.feeders.len())
    }
}
