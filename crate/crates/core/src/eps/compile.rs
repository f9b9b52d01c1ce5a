use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boolean::{is_identifier, BoolFunc, Variable, VariableSet};
use crate::contract::ContractPair;
use crate::network::{BooleanNetwork, BooleanSystem, Link};

use super::semantics::reach;
use super::{Current, EpsError, NodeKind, PowerTopology};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Group {
    pub name: String,
    pub nodes: Vec<String>,
}

/// An explicit grouping of topology nodes into subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub groups: Vec<Group>,
}

pub fn load_partition(text: &str) -> Result<Partition, EpsError> {
    Ok(serde_json::from_str(text)?)
}

/// A topology compiled to a network and contract.
#[derive(Debug, Clone)]
pub struct CompiledEps {
    pub network: BooleanNetwork,
    pub contract: ContractPair,
    pub groups: Vec<Group>,
    /// The topology with every edge between groups marked as a feeder.
    pub topology: PowerTopology,
    /// `(output, generator, generator)` for each coupling output.
    pub couplings: Vec<(String, String, String)>,
}

fn pwr(edge: &str) -> String {
    format!("pwr_{edge}")
}

fn inp(edge: &str) -> String {
    format!("in_{edge}")
}

/// Node-to-group assignment from connected components of the non-feeder
/// edges, groups numbered in order of their first node.
fn default_groups(t: &PowerTopology) -> Vec<usize> {
    let n = t.nodes().len();
    let mut group = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if group[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        group[start] = next;
        while let Some(u) = stack.pop() {
            for k in (0..t.edges().len()).filter(|&k| !t.is_feeder(k)) {
                let (a, b) = t.ends(k);
                let v = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if group[v] == usize::MAX {
                    group[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    group
}

fn explicit_groups(t: &PowerTopology, p: &Partition) -> Result<Vec<usize>, EpsError> {
    let n = t.nodes().len();
    let mut group = vec![usize::MAX; n];
    let mut names = BTreeSet::new();
    for (g, grp) in p.groups.iter().enumerate() {
        if !is_identifier(&grp.name) || !names.insert(grp.name.as_str()) {
            return Err(EpsError::Partition(format!("bad or repeated group name '{}'", grp.name)));
        }
        if grp.nodes.is_empty() {
            return Err(EpsError::Partition(format!("group {} is empty", grp.name)));
        }
        for node in &grp.nodes {
            let i = t
                .node_index(node)
                .ok_or_else(|| EpsError::Partition(format!("unknown node '{node}'")))?;
            if group[i] != usize::MAX {
                return Err(EpsError::Partition(format!("node {node} is in two groups")));
            }
            group[i] = g;
        }
    }
    if let Some(i) = group.iter().position(|&g| g == usize::MAX) {
        return Err(EpsError::Partition(format!("node {} is in no group", t.nodes()[i].name)));
    }
    Ok(group)
}

/// Per-group view used to tabulate one subsystem.
struct GroupModel<'a> {
    t: &'a PowerTopology,
    group: &'a [usize],
    g: usize,
    /// Edges whose contactor this group owns: those ending in the group.
    control_edges: Vec<usize>,
    health_nodes: Vec<usize>,
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    buses: Vec<usize>,
    ac_pairs: Vec<(usize, usize)>,
}

impl GroupModel<'_> {
    fn inputs(&self) -> VariableSet {
        let controls = self.control_edges.iter().map(|&k| self.t.edges()[k].contactor().unwrap().to_string());
        let health = self.health_nodes.iter().map(|&n| self.t.nodes()[n].name.clone());
        let internal = self.incoming.iter().map(|&k| inp(self.t.edges()[k].name()));
        let names: Vec<String> = controls.chain(health).chain(internal).collect();
        VariableSet::from_names(&names).expect("names validated at load")
    }

    /// Output bits for one input valuation index, in output order.
    fn evaluate(&self, idx: usize, width: usize) -> Vec<bool> {
        let bit = |pos: usize| (idx >> (width - 1 - pos)) & 1 == 1;
        let t = self.t;
        let mut closed = vec![false; t.edges().len()];
        for (k, edge) in t.edges().iter().enumerate() {
            closed[k] = edge.contactor().is_none();
        }
        for (p, &k) in self.control_edges.iter().enumerate() {
            closed[k] = bit(p);
        }
        let mut healthy = vec![false; t.nodes().len()];
        for (n, node) in t.nodes().iter().enumerate() {
            healthy[n] = self.group[n] == self.g && !node.kind.can_fail();
        }
        let base = self.control_edges.len();
        for (p, &n) in self.health_nodes.iter().enumerate() {
            healthy[n] = bit(base + p);
        }
        let base = base + self.health_nodes.len();
        let mut sources: Vec<usize> = (0..t.nodes().len())
            .filter(|&n| self.group[n] == self.g && t.nodes()[n].kind == NodeKind::Generator)
            .collect();
        for (p, &k) in self.incoming.iter().enumerate() {
            if bit(base + p) && closed[k] {
                sources.push(t.ends(k).1);
            }
        }
        let local_edge = |k: usize| {
            let (a, b) = t.ends(k);
            closed[k] && self.group[a] == self.g && self.group[b] == self.g
        };
        let powered = reach(t, sources, |n| healthy[n], local_edge);

        let mut out: Vec<bool> = self.buses.iter().map(|&b| powered[b]).collect();
        out.extend(self.outgoing.iter().map(|&k| powered[t.ends(k).0]));
        let ac_ok = |n: usize| healthy[n] && t.nodes()[n].current == Current::Ac;
        for &(i, j) in &self.ac_pairs {
            let coupled = reach(t, [i], ac_ok, local_edge)[j] || reach(t, [j], ac_ok, local_edge)[i];
            out.push(coupled);
        }
        out
    }
}

/// One subsystem per group: contactors are controls, health bits and feeds
/// from upstream groups are environment inputs, bus states, feeds to
/// downstream groups and AC couplings are outputs.
pub fn compile_to_network(t: &PowerTopology, partition: Option<&Partition>) -> Result<CompiledEps, EpsError> {
    let (group, names) = match partition {
        Some(p) => (
            explicit_groups(t, p)?,
            p.groups.iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
        ),
        None => {
            let group = default_groups(t);
            let count = group.iter().max().map_or(0, |m| m + 1);
            (group, (1..=count).map(|i| format!("S{i}")).collect())
        }
    };
    let n_groups = names.len();
    let cross: Vec<usize> = (0..t.edges().len())
        .filter(|&k| {
            let (a, b) = t.ends(k);
            group[a] != group[b]
        })
        .collect();

    let ac_gens: Vec<usize> = (0..t.nodes().len())
        .filter(|&n| t.nodes()[n].kind == NodeKind::Generator && t.nodes()[n].current == Current::Ac)
        .collect();
    for (x, &i) in ac_gens.iter().enumerate() {
        for &j in &ac_gens[x + 1..] {
            if group[i] != group[j] {
                return Err(EpsError::SplitAcSources(
                    t.nodes()[i].name.clone(),
                    t.nodes()[j].name.clone(),
                ));
            }
        }
    }

    let mut systems = Vec::new();
    let mut wiring = Vec::new();
    let mut couplings = Vec::new();
    let mut groups = Vec::new();
    let mut bus_vars = Vec::new();
    for g in 0..n_groups {
        let in_g = |n: usize| group[n] == g;
        let model = GroupModel {
            t,
            group: &group,
            g,
            control_edges: (0..t.edges().len())
                .filter(|&k| t.edges()[k].contactor().is_some() && in_g(t.ends(k).1))
                .collect(),
            health_nodes: (0..t.nodes().len())
                .filter(|&n| in_g(n) && t.nodes()[n].kind.can_fail())
                .collect(),
            incoming: cross.iter().copied().filter(|&k| in_g(t.ends(k).1)).collect(),
            outgoing: cross.iter().copied().filter(|&k| in_g(t.ends(k).0)).collect(),
            buses: (0..t.nodes().len())
                .filter(|&n| in_g(n) && t.nodes()[n].kind == NodeKind::Bus)
                .collect(),
            ac_pairs: ac_gens
                .iter()
                .enumerate()
                .filter(|(_, &i)| in_g(i))
                .flat_map(|(x, &i)| ac_gens[x + 1..].iter().map(move |&j| (i, j)))
                .collect(),
        };

        let inputs = model.inputs();
        let n_controls = model.control_edges.len();
        let controls = VariableSet::from_vars(inputs.iter().take(n_controls).cloned()).unwrap();
        let env = VariableSet::from_vars(inputs.iter().skip(n_controls).cloned()).unwrap();

        let mut out_names: Vec<String> = model.buses.iter().map(|&b| t.nodes()[b].name.clone()).collect();
        bus_vars.extend(out_names.iter().cloned());
        out_names.extend(model.outgoing.iter().map(|&k| pwr(t.edges()[k].name())));
        for &(i, j) in &model.ac_pairs {
            let (a, b) = (&t.nodes()[i].name, &t.nodes()[j].name);
            let name = format!("ac_{a}_{b}");
            couplings.push((name.clone(), a.clone(), b.clone()));
            out_names.push(name);
        }

        let width = inputs.len();
        let rows: Vec<Vec<bool>> = (0..inputs.valuation_count())
            .map(|idx| model.evaluate(idx, width))
            .collect();
        let outputs = out_names
            .iter()
            .enumerate()
            .map(|(o, name)| {
                let var = Variable::new(name.as_str()).map_err(|_| EpsError::InvalidName(name.clone()))?;
                Ok((var, BoolFunc::from_index_fn(&inputs, |idx| rows[idx][o])))
            })
            .collect::<Result<Vec<_>, EpsError>>()?;
        systems.push(BooleanSystem::new(names[g].as_str(), controls, env, outputs));

        for &k in &model.incoming {
            let edge = t.edges()[k].name();
            let (a, _) = t.ends(k);
            wiring.push(Link::new(&names[group[a]], &pwr(edge), &names[g], &inp(edge)));
        }
        groups.push(Group {
            name: names[g].clone(),
            nodes: (0..t.nodes().len())
                .filter(|&n| in_g(n))
                .map(|n| t.nodes()[n].name.clone())
                .collect(),
        });
    }

    let network = BooleanNetwork::new(systems, wiring);
    network.ensure_well_posed()?;

    let any_of = |names: Vec<&str>| {
        names
            .into_iter()
            .map(|n| BoolFunc::var(n).expect("validated name"))
            .fold(BoolFunc::contradiction(), |acc, f| acc.or(&f))
    };
    // one rectifier per side, where sides are the feeder-separated components
    // whatever the partition
    let mut assumption = any_of(t.of_kind(NodeKind::Generator));
    let sides = default_groups(t);
    for side in 0..sides.iter().max().map_or(0, |m| m + 1) {
        let rectifiers: Vec<&str> = (0..t.nodes().len())
            .filter(|&n| sides[n] == side && t.nodes()[n].kind == NodeKind::Rectifier)
            .map(|n| t.nodes()[n].name.as_str())
            .collect();
        if !rectifiers.is_empty() {
            assumption = assumption.and(&any_of(rectifiers));
        }
    }
    let mut guarantee = BoolFunc::tautology();
    for b in &bus_vars {
        guarantee = guarantee.and(&BoolFunc::var(b).expect("validated name"));
    }
    for (name, _, _) in &couplings {
        guarantee = guarantee.and(&BoolFunc::var(name).expect("validated name").not());
    }

    let mut effective = t.clone();
    effective.feeders.extend(cross.iter().copied());

    Ok(CompiledEps {
        network,
        contract: ContractPair::new(assumption, guarantee),
        groups,
        topology: effective,
        couplings,
    })
}
