//! Realizability checking, controller extraction and the leaf-by-leaf
//! distributed synthesis procedure.

mod local;

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::boolean::{BoolFunc, Variable, VariableSet};
use crate::contract::{conjunctive_decomposition, project_onto, ContractError, ContractPair};
use crate::distribution::maximal_distributions;
use crate::network::{BooleanNetwork, Controller, NetworkError};

pub use local::{
    check_realizable, extract_controller, find_lra, least_restrictive_assumption, LocalSynthesisResult,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("{0}")]
    Scope(String),
    #[error("contract for {subsystem} cannot be met on input {row}")]
    Unrealizable { subsystem: String, row: String },
}

/// What happened to one candidate distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// The least restrictive assumption was False.
    Infeasible,
    /// Accepted locally, but the remaining network could not be solved.
    Backtracked,
    Accepted,
}

/// One candidate tried at one leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub subsystem: String,
    /// Number of subsystems already eliminated.
    pub depth: usize,
    /// Index of the candidate within its ordered list.
    pub candidate: usize,
    pub candidates: usize,
    pub lra: BoolFunc,
    pub outcome: StepOutcome,
}

/// The deepest leaf at which every candidate failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureInfo {
    pub subsystem: String,
    pub depth: usize,
    /// How many candidate distributions were tried there.
    pub exhausted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisOutcome {
    pub success: bool,
    /// In subsystem declaration order; empty on failure.
    pub controllers: IndexMap<String, Controller>,
    /// Local contracts, over each subsystem's own inputs and outputs.
    pub local_contracts: IndexMap<String, ContractPair>,
    pub trace: Vec<TraceStep>,
    pub failure: Option<FailureInfo>,
}

impl SynthesisOutcome {
    /// Controllers in subsystem declaration order.
    pub fn controller_list(&self) -> Vec<Controller> {
        self.controllers.values().cloned().collect()
    }
}

/// Replaces each internal input of subsystem `i` in `lra` by the parent output
/// driving it.
pub fn rewire_to_parent_outputs(lra: &BoolFunc, net: &BooleanNetwork, i: &str) -> Result<BoolFunc, NetworkError> {
    let mut mapping = BTreeMap::new();
    for v in lra.scope() {
        let link = net.driver_of(i, v.name()).ok_or_else(|| NetworkError::Undriven {
            subsystem: i.to_string(),
            input: v.name().to_string(),
        })?;
        let target = Variable::new(link.from_output.as_str()).expect("validated output name");
        mapping.insert(v.clone(), target);
    }
    Ok(lra.substitute(&mapping))
}

/// `[A, up ∧ λ]` for the network left after deleting a leaf.
pub fn update_contract(c: &ContractPair, up: &BoolFunc, lra_rewired: &BoolFunc) -> ContractPair {
    ContractPair::new(c.assumption.clone(), up.and(lra_rewired))
}

/// Solves the network leaf by leaf, trying the maximal distributions of the
/// current guarantee at each leaf and backtracking when the remaining
/// network fails.
pub fn distributed_synthesis(net: &BooleanNetwork, c: &ContractPair) -> Result<SynthesisOutcome, SynthesisError> {
    net.ensure_well_posed()?;
    c.check_scopes(net)?;

    let mut outcome = SynthesisOutcome {
        success: false,
        controllers: IndexMap::new(),
        local_contracts: IndexMap::new(),
        trace: Vec::new(),
        failure: None,
    };

    if c.assumption.is_false() {
        for sys in net.subsystems() {
            outcome
                .controllers
                .insert(sys.name().to_string(), Controller::constant(sys, 0)?);
            outcome.local_contracts.insert(
                sys.name().to_string(),
                ContractPair::new(BoolFunc::contradiction(), BoolFunc::tautology()),
            );
        }
        outcome.success = true;
        return Ok(outcome);
    }

    let mut search = Search {
        assumption: &c.assumption,
        trace: Vec::new(),
        failure: None,
    };
    let solved = search.solve(net, &c.guarantee, 0)?;
    outcome.trace = search.trace;
    if let Some(mut found) = solved {
        for sys in net.subsystems() {
            let (k, ctr) = found.remove(sys.name()).expect("every subsystem solved");
            outcome.controllers.insert(sys.name().to_string(), k);
            outcome.local_contracts.insert(sys.name().to_string(), ctr);
        }
        outcome.success = true;
    } else {
        outcome.failure = search.failure;
    }
    Ok(outcome)
}

type Solution = BTreeMap<String, (Controller, ContractPair)>;

struct Search<'a> {
    assumption: &'a BoolFunc,
    trace: Vec<TraceStep>,
    failure: Option<FailureInfo>,
}

impl Search<'_> {
    fn solve(&mut self, net: &BooleanNetwork, g: &BoolFunc, depth: usize) -> Result<Option<Solution>, SynthesisError> {
        let Some(leaf) = net.system_graph().leaves().into_iter().next() else {
            return Ok(Some(Solution::new()));
        };
        let sys = net.subsystem(&leaf).expect("leaf of this network");
        let (internal, external) = net.classify_inputs(&leaf)?;
        let a_loc = project_onto(self.assumption, &external);
        let gammas = maximal_distributions(g, net, &leaf)?;

        for (k, gamma) in gammas.iter().enumerate() {
            let local = find_lra(sys, &a_loc, &gamma.down, &internal)?;
            let pos = self.trace.len();
            self.trace.push(TraceStep {
                subsystem: leaf.clone(),
                depth,
                candidate: k,
                candidates: gammas.len(),
                lra: local.lra.clone(),
                outcome: StepOutcome::Infeasible,
            });
            let Some(controller) = local.controller else {
                continue;
            };
            let rewired = rewire_to_parent_outputs(&local.lra, net, &leaf)?;
            let rest = net.remove_subsystem(&leaf)?;
            let next = update_contract(
                &ContractPair::new(self.assumption.clone(), g.clone()),
                &gamma.up,
                &rewired,
            );
            match self.solve(&rest, &next.guarantee, depth + 1)? {
                Some(mut sol) => {
                    self.trace[pos].outcome = StepOutcome::Accepted;
                    let local_contract = ContractPair::new(a_loc.and(&local.lra), gamma.down.clone());
                    sol.insert(leaf, (controller, local_contract));
                    return Ok(Some(sol));
                }
                None => self.trace[pos].outcome = StepOutcome::Backtracked,
            }
        }

        if self.failure.as_ref().is_none_or(|f| depth > f.depth) {
            self.failure = Some(FailureInfo {
                subsystem: leaf,
                depth,
                exhausted: gammas.len(),
            });
        }
        Ok(None)
    }
}

/// Whether the assumption factors over the subsystems' external inputs, the
/// guarantee over their outputs, and the system graph is a forest. When it
/// holds, a failed distributed synthesis means no distributed controller
/// exists.
pub fn completeness_certificate(net: &BooleanNetwork, c: &ContractPair) -> Result<bool, SynthesisError> {
    net.ensure_well_posed()?;
    c.check_scopes(net)?;
    let ext_blocks = external_blocks(net)?;
    let out_blocks: Vec<VariableSet> = net.subsystems().iter().map(|s| s.output_vars()).collect();
    Ok(net.system_graph().is_forest()
        && conjunctive_decomposition(&c.assumption, &ext_blocks).is_some()
        && conjunctive_decomposition(&c.guarantee, &out_blocks).is_some())
}

/// Result of synthesizing one controller for the whole network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralOutcome {
    pub realizable: bool,
    /// Reads every external input and sets every control.
    pub controller: Option<Controller>,
    /// The flattened network the controller belongs to.
    pub system: crate::network::BooleanSystem,
}

/// Name of the single subsystem of a flattened network.
pub const CENTRAL_NAME: &str = "central";

/// Treats the network as one system and solves the contract directly.
pub fn centralized_synthesis(net: &BooleanNetwork, c: &ContractPair) -> Result<CentralOutcome, SynthesisError> {
    net.ensure_well_posed()?;
    c.check_scopes(net)?;
    let flat = net.flatten(CENTRAL_NAME)?;
    let realizable = check_realizable(&flat, &c.assumption, &c.guarantee, None)?;
    let controller = if realizable {
        Some(extract_controller(&flat, &c.assumption, &c.guarantee)?)
    } else {
        None
    };
    Ok(CentralOutcome {
        realizable,
        controller,
        system: flat,
    })
}

/// External-input blocks of each subsystem, in declaration order.
pub fn external_blocks(net: &BooleanNetwork) -> Result<Vec<VariableSet>, NetworkError> {
    net.subsystems()
        .iter()
        .map(|s| net.classify_inputs(s.name()).map(|(_, e)| e))
        .collect()
}
