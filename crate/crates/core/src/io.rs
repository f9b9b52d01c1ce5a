//! JSON formats for networks, contracts and controller files.

use serde::{Deserialize, Serialize};

use crate::boolean::{parse_expr, BoolError, BoolFunc, Valuation, Variable, VariableSet};
use crate::contract::ContractPair;
use crate::network::{BooleanNetwork, BooleanSystem, Controller, Link, NetworkError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Bool {
        context: String,
        #[source]
        source: BoolError,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("{0}")]
    Format(String),
}

fn bool_err(context: impl Into<String>) -> impl FnOnce(BoolError) -> IoError {
    let context = context.into();
    move |source| IoError::Bool { context, source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemDoc {
    pub name: String,
    #[serde(default)]
    pub controls: Vec<String>,
    #[serde(default)]
    pub env_inputs: Vec<String>,
    pub outputs: Vec<OutputDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub subsystems: Vec<SubsystemDoc>,
    #[serde(default)]
    pub wiring: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractDoc {
    #[serde(default)]
    pub assumptions: Vec<String>,
    #[serde(default)]
    pub guarantees: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDoc {
    pub inputs: String,
    pub controls: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerDoc {
    pub subsystem: String,
    pub inputs: Vec<String>,
    pub controls: Vec<String>,
    pub rows: Vec<RowDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalContractDoc {
    pub subsystem: String,
    pub assumption: String,
    pub guarantee: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerMode {
    #[default]
    Distributed,
    /// One controller for the flattened network.
    Central,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    #[serde(default)]
    pub mode: ControllerMode,
    pub controllers: Vec<ControllerDoc>,
    #[serde(default)]
    pub local_contracts: Vec<LocalContractDoc>,
}

/// Parses `text` over `scope` and shrinks the result to its support.
fn parse_reduced(text: &str, scope: &VariableSet, context: &str) -> Result<BoolFunc, IoError> {
    let f = parse_expr(text, scope).map_err(bool_err(context))?;
    Ok(f.project(&f.support()).expect("support lies in scope"))
}

fn var_set(names: &[String], context: &str) -> Result<VariableSet, IoError> {
    VariableSet::from_names(names).map_err(bool_err(context))
}

impl NetworkDoc {
    pub fn build(&self) -> Result<BooleanNetwork, IoError> {
        let mut systems = Vec::new();
        for s in &self.subsystems {
            let controls = var_set(&s.controls, &format!("{}: controls", s.name))?;
            let env = var_set(&s.env_inputs, &format!("{}: env_inputs", s.name))?;
            let scope = controls.union(&env);
            let mut outputs = Vec::new();
            for o in &s.outputs {
                let ctx = format!("{}: output {}", s.name, o.name);
                let y = Variable::new(o.name.as_str()).map_err(bool_err(&ctx))?;
                let f = parse_expr(&o.expr, &scope).map_err(bool_err(&ctx))?;
                outputs.push((y, f));
            }
            systems.push(BooleanSystem::new(s.name.as_str(), controls, env, outputs));
        }
        Ok(BooleanNetwork::new(systems, self.wiring.clone()))
    }

    pub fn from_network(net: &BooleanNetwork) -> Self {
        NetworkDoc {
            subsystems: net
                .subsystems()
                .iter()
                .map(|s| SubsystemDoc {
                    name: s.name().to_string(),
                    controls: s.controls().names(),
                    env_inputs: s.env_inputs().names(),
                    outputs: s
                        .outputs()
                        .iter()
                        .map(|(y, f)| OutputDoc {
                            name: y.name().to_string(),
                            expr: f.to_expr(),
                        })
                        .collect(),
                })
                .collect(),
            wiring: net.wiring().to_vec(),
        }
    }
}

/// Parses a network document. The network is not validated.
pub fn parse_network(text: &str) -> Result<BooleanNetwork, IoError> {
    serde_json::from_str::<NetworkDoc>(text)?.build()
}

pub fn network_to_json(net: &BooleanNetwork) -> String {
    to_json(&NetworkDoc::from_network(net))
}

impl ContractDoc {
    /// Assumptions are read over the external inputs of `net`, guarantees over
    /// its outputs; each list is conjoined.
    pub fn build(&self, net: &BooleanNetwork) -> Result<ContractPair, IoError> {
        let ext = net.external_inputs();
        let outs = net.all_outputs();
        let mut a = BoolFunc::tautology();
        for (k, text) in self.assumptions.iter().enumerate() {
            a = a.and(&parse_reduced(text, &ext, &format!("assumptions[{k}]"))?);
        }
        let mut g = BoolFunc::tautology();
        for (k, text) in self.guarantees.iter().enumerate() {
            g = g.and(&parse_reduced(text, &outs, &format!("guarantees[{k}]"))?);
        }
        Ok(ContractPair::new(reduce(&a), reduce(&g)))
    }

    pub fn from_contract(c: &ContractPair) -> Self {
        ContractDoc {
            assumptions: vec![c.assumption.to_expr()],
            guarantees: vec![c.guarantee.to_expr()],
        }
    }
}

fn reduce(f: &BoolFunc) -> BoolFunc {
    f.project(&f.support()).expect("support lies in scope")
}

pub fn parse_contract(text: &str, net: &BooleanNetwork) -> Result<ContractPair, IoError> {
    serde_json::from_str::<ContractDoc>(text)?.build(net)
}

impl ControllerDoc {
    pub fn from_controller(k: &Controller) -> Self {
        ControllerDoc {
            subsystem: k.subsystem().to_string(),
            inputs: k.inputs().names(),
            controls: k.controls().names(),
            rows: k
                .rows()
                .map(|(e, u)| RowDoc {
                    inputs: e.bit_string(),
                    controls: u.bit_string(),
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Controller, IoError> {
        let ctx = format!("controller {}", self.subsystem);
        let inputs = var_set(&self.inputs, &ctx)?;
        let controls = var_set(&self.controls, &ctx)?;
        let n = inputs.valuation_count();
        let mut table: Vec<Option<usize>> = vec![None; n];
        for row in &self.rows {
            let e = parse_bits(&row.inputs, inputs.len(), &ctx)?;
            let u = parse_bits(&row.controls, controls.len(), &ctx)?;
            if table[e].replace(u).is_some() {
                return Err(IoError::Format(format!("{ctx}: row '{}' listed twice", row.inputs)));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(e, u)| {
                u.ok_or_else(|| {
                    IoError::Format(format!(
                        "{ctx}: no row for inputs '{}'",
                        Valuation::from_index(&inputs, e).bit_string()
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Controller::new(self.subsystem.as_str(), inputs, controls, table)?)
    }
}

fn parse_bits(s: &str, width: usize, ctx: &str) -> Result<usize, IoError> {
    if s.len() != width || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(IoError::Format(format!(
            "{ctx}: '{s}' is not a {width}-bit string of 0 and 1"
        )));
    }
    Ok(s.bytes().fold(0, |acc, b| (acc << 1) | (b - b'0') as usize))
}

impl ControllerFile {
    pub fn new(
        mode: ControllerMode,
        controllers: &[Controller],
        local_contracts: &[(String, ContractPair)],
    ) -> Self {
        ControllerFile {
            mode,
            controllers: controllers.iter().map(ControllerDoc::from_controller).collect(),
            local_contracts: local_contracts
                .iter()
                .map(|(s, c)| LocalContractDoc {
                    subsystem: s.clone(),
                    assumption: c.assumption.to_expr(),
                    guarantee: c.guarantee.to_expr(),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn controllers(&self) -> Result<Vec<Controller>, IoError> {
        self.controllers.iter().map(ControllerDoc::build).collect()
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
