//! Boolean subsystems, their interconnection, and closed-loop composition.

mod controller;
mod eval;
mod graph;
mod system;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolean::{BoolFunc, Variable, VariableSet};

pub use controller::Controller;
pub(crate) use eval::NetworkEval;
pub use graph::SystemGraph;
pub(crate) use system::SystemEval;
pub use system::BooleanSystem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("unknown subsystem '{0}'")]
    UnknownSubsystem(String),
    #[error("network is not well-posed:\n{}", format_violations(.0))]
    IllPosed(Vec<Violation>),
    #[error("{0}")]
    IllFormedSystem(String),
    #[error("subsystem '{0}' is not a leaf of the system graph")]
    NotALeaf(String),
    #[error("no controller supplied for subsystem '{0}'")]
    MissingController(String),
    #[error("controller for '{subsystem}' is malformed: {reason}")]
    BadController { subsystem: String, reason: String },
    #[error("internal input '{input}' of '{subsystem}' has no driving link")]
    Undriven { subsystem: String, input: String },
    #[error("problem too large for explicit enumeration: {0}")]
    TooLarge(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  - {x}")).collect::<Vec<_>>().join("\n")
}

/// One serial-interconnection pair: output `from_output` of `from_sys` is the
/// environment input `to_input` of `to_sys`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub from_sys: String,
    pub from_output: String,
    pub to_sys: String,
    pub to_input: String,
}

impl Link {
    pub fn new(from_sys: &str, from_output: &str, to_sys: &str, to_input: &str) -> Self {
        Link {
            from_sys: from_sys.into(),
            from_output: from_output.into(),
            to_sys: to_sys.into(),
            to_input: to_input.into(),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} -> {}.{}",
            self.from_sys, self.from_output, self.to_sys, self.to_input
        )
    }
}

/// A well-posedness violation reported by [`BooleanNetwork::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateSubsystem(String),
    /// A variable name used more than once across the network.
    DuplicateVariable(String),
    /// A subsystem-local problem: overlapping controls and inputs, or an
    /// output function reading a non-input.
    SystemScope { subsystem: String, detail: String },
    /// A link whose endpoints do not name an output and an environment input.
    BadLink { link: Link, detail: String },
    /// Two links drive the same environment input.
    MultipleDrivers { subsystem: String, input: String },
    /// Subsystems on a directed cycle of the system graph.
    Cycle(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateSubsystem(n) => write!(f, "subsystem name '{n}' is used twice"),
            Violation::DuplicateVariable(v) => write!(f, "variable '{v}' is declared more than once"),
            Violation::SystemScope { detail, .. } => f.write_str(detail),
            Violation::BadLink { link, detail } => write!(f, "link {link}: {detail}"),
            Violation::MultipleDrivers { subsystem, input } => {
                write!(f, "input {subsystem}.{input} is driven by more than one link")
            }
            Violation::Cycle(names) => write!(f, "cycle through {}", names.join(", ")),
        }
    }
}

/// The closed-loop network as a function of the external inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedLoop {
    pub inputs: VariableSet,
    pub outputs: Vec<(Variable, BoolFunc)>,
}

impl ClosedLoop {
    pub fn output(&self, name: &str) -> Option<&BoolFunc> {
        self.outputs.iter().find(|(v, _)| v.name() == name).map(|(_, f)| f)
    }
}

/// A collection of subsystems wired output-to-input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BooleanNetwork {
    subsystems: Vec<BooleanSystem>,
    wiring: Vec<Link>,
}

impl BooleanNetwork {
    pub fn new(subsystems: Vec<BooleanSystem>, wiring: Vec<Link>) -> Self {
        BooleanNetwork { subsystems, wiring }
    }

    pub fn subsystems(&self) -> &[BooleanSystem] {
        &self.subsystems
    }

    pub fn wiring(&self) -> &[Link] {
        &self.wiring
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.name() == name)
    }

    pub fn subsystem(&self, name: &str) -> Option<&BooleanSystem> {
        self.subsystems.iter().find(|s| s.name() == name)
    }

    fn require(&self, name: &str) -> Result<&BooleanSystem, NetworkError> {
        self.subsystem(name)
            .ok_or_else(|| NetworkError::UnknownSubsystem(name.to_string()))
    }

    pub fn driver_of(&self, sys: &str, input: &str) -> Option<&Link> {
        self.wiring
            .iter()
            .find(|l| l.to_sys == sys && l.to_input == input)
    }

    /// Well-posedness report; empty means well-posed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut names: Vec<&str> = Vec::new();
        for s in &self.subsystems {
            if names.contains(&s.name()) {
                out.push(Violation::DuplicateSubsystem(s.name().to_string()));
            }
            names.push(s.name());
        }

        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut first_seen: Vec<&str> = Vec::new();
        for s in &self.subsystems {
            let vars = s
                .controls()
                .iter()
                .chain(s.env_inputs().iter())
                .chain(s.outputs().iter().map(|(v, _)| v));
            for v in vars {
                let c = counts.entry(v.name()).or_insert(0);
                if *c == 0 {
                    first_seen.push(v.name());
                }
                *c += 1;
            }
        }
        for n in first_seen {
            if counts[n] > 1 {
                out.push(Violation::DuplicateVariable(n.to_string()));
            }
        }

        for s in &self.subsystems {
            for detail in s.check() {
                out.push(Violation::SystemScope {
                    subsystem: s.name().to_string(),
                    detail,
                });
            }
        }

        for link in &self.wiring {
            let bad = |detail: String| Violation::BadLink {
                link: link.clone(),
                detail,
            };
            match self.subsystem(&link.from_sys) {
                None => out.push(bad(format!("unknown source subsystem '{}'", link.from_sys))),
                Some(s) if s.output_func(&link.from_output).is_none() => out.push(bad(format!(
                    "'{}' is not an output of {}",
                    link.from_output, link.from_sys
                ))),
                _ => {}
            }
            match self.subsystem(&link.to_sys) {
                None => out.push(bad(format!("unknown target subsystem '{}'", link.to_sys))),
                Some(s) if !s.env_inputs().contains_name(&link.to_input) => out.push(bad(format!(
                    "'{}' is not an environment input of {}",
                    link.to_input, link.to_sys
                ))),
                _ => {}
            }
        }

        let mut driven: Vec<(&str, &str)> = Vec::new();
        for link in &self.wiring {
            let key = (link.to_sys.as_str(), link.to_input.as_str());
            if driven.contains(&key) {
                let v = Violation::MultipleDrivers {
                    subsystem: key.0.to_string(),
                    input: key.1.to_string(),
                };
                if !out.contains(&v) {
                    out.push(v);
                }
            } else {
                driven.push(key);
            }
        }

        let graph = self.system_graph();
        for cycle in graph.cycles() {
            out.push(Violation::Cycle(
                cycle.into_iter().map(|i| graph.nodes()[i].clone()).collect(),
            ));
        }
        out
    }

    pub fn is_well_posed(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_well_posed(&self) -> Result<(), NetworkError> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(NetworkError::IllPosed(report))
        }
    }

    /// The induced system graph. Links naming unknown subsystems are ignored.
    pub fn system_graph(&self) -> SystemGraph {
        let nodes = self.subsystems.iter().map(|s| s.name().to_string()).collect();
        let edges = self
            .wiring
            .iter()
            .filter_map(|l| Some((self.index_of(&l.from_sys)?, self.index_of(&l.to_sys)?)))
            .collect();
        SystemGraph::new(nodes, edges)
    }

    /// Splits the environment inputs of `name` into `(internal, external)`:
    /// inputs driven by a link and the rest, each in declaration order.
    pub fn classify_inputs(&self, name: &str) -> Result<(VariableSet, VariableSet), NetworkError> {
        let sys = self.require(name)?;
        let mut internal = VariableSet::new();
        let mut external = VariableSet::new();
        for e in sys.env_inputs() {
            if self.driver_of(name, e.name()).is_some() {
                internal.insert(e.clone());
            } else {
                external.insert(e.clone());
            }
        }
        Ok((internal, external))
    }

    /// All external inputs, by subsystem then declaration order.
    pub fn external_inputs(&self) -> VariableSet {
        let mut all = VariableSet::new();
        for s in &self.subsystems {
            for e in s.env_inputs() {
                if self.driver_of(s.name(), e.name()).is_none() {
                    all.insert(e.clone());
                }
            }
        }
        all
    }

    /// All outputs, by subsystem then declaration order.
    pub fn all_outputs(&self) -> VariableSet {
        let mut all = VariableSet::new();
        for s in &self.subsystems {
            for (y, _) in s.outputs() {
                all.insert(y.clone());
            }
        }
        all
    }

    pub fn all_controls(&self) -> VariableSet {
        let mut all = VariableSet::new();
        for s in &self.subsystems {
            for u in s.controls() {
                all.insert(u.clone());
            }
        }
        all
    }

    /// The subsystem owning output `name`.
    pub fn output_owner(&self, name: &str) -> Option<&BooleanSystem> {
        self.subsystems.iter().find(|s| s.output_func(name).is_some())
    }

    /// Deletes leaf subsystem `name` together with every link into it.
    pub fn remove_subsystem(&self, name: &str) -> Result<BooleanNetwork, NetworkError> {
        self.require(name)?;
        if self.wiring.iter().any(|l| l.from_sys == name) {
            return Err(NetworkError::NotALeaf(name.to_string()));
        }
        Ok(BooleanNetwork {
            subsystems: self
                .subsystems
                .iter()
                .filter(|s| s.name() != name)
                .cloned()
                .collect(),
            wiring: self
                .wiring
                .iter()
                .filter(|l| l.to_sys != name)
                .cloned()
                .collect(),
        })
    }

    /// Closed-loop outputs `y = f(π(e), e)` as functions of the external
    /// inputs, with one controller per subsystem.
    pub fn compose(&self, controllers: &[Controller]) -> Result<ClosedLoop, NetworkError> {
        let plan = NetworkEval::new(self)?;
        let tables = self.match_controllers(controllers)?;
        let n_out = plan.out_scope.len();
        let mut columns = vec![Vec::with_capacity(plan.ext_scope.valuation_count()); n_out];
        for ext in 0..plan.ext_scope.valuation_count() {
            let ys = plan
                .run(ext, |i, e| Some(tables[i].control_index(e)))
                .expect("total controllers");
            let y = plan.global_output_index(&ys);
            for (k, col) in columns.iter_mut().enumerate() {
                col.push((y >> (n_out - 1 - k)) & 1 == 1);
            }
        }
        let outputs = plan
            .out_scope
            .iter()
            .zip(columns)
            .map(|(v, col)| (v.clone(), BoolFunc::from_index_fn(&plan.ext_scope, |i| col[i])))
            .collect();
        Ok(ClosedLoop {
            inputs: plan.ext_scope,
            outputs,
        })
    }

    /// Orders `controllers` by subsystem declaration order, checking that each
    /// subsystem has exactly one matching controller.
    pub(crate) fn match_controllers<'a>(
        &self,
        controllers: &'a [Controller],
    ) -> Result<Vec<&'a Controller>, NetworkError> {
        self.subsystems
            .iter()
            .map(|s| {
                let c = controllers
                    .iter()
                    .find(|c| c.subsystem() == s.name())
                    .ok_or_else(|| NetworkError::MissingController(s.name().to_string()))?;
                if !c.fits(s) {
                    return Err(NetworkError::BadController {
                        subsystem: s.name().to_string(),
                        reason: "inputs or controls differ from the subsystem's".into(),
                    });
                }
                Ok(c)
            })
            .collect()
    }

    /// The whole network viewed as one Boolean system: all controls, all
    /// external inputs, all outputs.
    pub fn flatten(&self, name: &str) -> Result<BooleanSystem, NetworkError> {
        let plan = NetworkEval::new(self)?;
        let controls = self.all_controls();
        let inputs = controls.union(&plan.ext_scope);
        if inputs.len() > crate::boolean::MAX_VARS {
            return Err(NetworkError::TooLarge(format!(
                "flattened network has {} inputs",
                inputs.len()
            )));
        }
        // offset of each subsystem's controls inside the global control index
        let mut offsets = Vec::new();
        let mut acc = 0;
        for s in &self.subsystems {
            offsets.push(acc);
            acc += s.controls().len();
        }
        let n_u = controls.len();
        let n_e = plan.ext_scope.len();
        let n_out = plan.out_scope.len();
        let mut columns = vec![Vec::with_capacity(inputs.valuation_count()); n_out];
        for idx in 0..inputs.valuation_count() {
            let u_all = idx >> n_e;
            let ext = idx & ((1 << n_e) - 1);
            let ys = plan
                .run(ext, |i, _| {
                    let width = self.subsystems[i].controls().len();
                    let shift = n_u - offsets[i] - width;
                    Some((u_all >> shift) & ((1 << width) - 1))
                })
                .expect("controls always supplied");
            let y = plan.global_output_index(&ys);
            for (k, col) in columns.iter_mut().enumerate() {
                col.push((y >> (n_out - 1 - k)) & 1 == 1);
            }
        }
        let outputs = plan
            .out_scope
            .iter()
            .zip(columns)
            .map(|(v, col)| (v.clone(), BoolFunc::from_index_fn(&inputs, |i| col[i])))
            .collect();
        Ok(BooleanSystem::new(name, controls, plan.ext_scope, outputs))
    }
}
