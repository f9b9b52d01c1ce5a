//! Assume-guarantee contracts and assumption projection.

use std::fmt;

use crate::boolean::{BoolFunc, VariableSet};
use crate::network::{BooleanNetwork, NetworkError};

/// A contract `[A, G]`: whenever the external inputs satisfy `A`, the
/// outputs must satisfy `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractPair {
    pub assumption: BoolFunc,
    pub guarantee: BoolFunc,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContractError {
    #[error("assumption mentions '{0}', which is not an external input")]
    AssumptionScope(String),
    #[error("guarantee mentions '{0}', which is not an output")]
    GuaranteeScope(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl ContractPair {
    pub fn new(assumption: BoolFunc, guarantee: BoolFunc) -> Self {
        ContractPair {
            assumption,
            guarantee,
        }
    }

    pub fn trivial() -> Self {
        ContractPair::new(BoolFunc::tautology(), BoolFunc::tautology())
    }

    /// Conjoins several pairs into one.
    pub fn conjoin<'a>(pairs: impl IntoIterator<Item = &'a ContractPair>) -> ContractPair {
        pairs.into_iter().fold(ContractPair::trivial(), |acc, c| {
            ContractPair::new(acc.assumption.and(&c.assumption), acc.guarantee.and(&c.guarantee))
        })
    }

    /// Checks that the assumption reads only external inputs of `net` and the
    /// guarantee only its outputs.
    pub fn check_scopes(&self, net: &BooleanNetwork) -> Result<(), ContractError> {
        let ext = net.external_inputs();
        if let Some(v) = self.assumption.scope().difference(&ext).iter().next() {
            return Err(ContractError::AssumptionScope(v.to_string()));
        }
        let outs = net.all_outputs();
        if let Some(v) = self.guarantee.scope().difference(&outs).iter().next() {
            return Err(ContractError::GuaranteeScope(v.to_string()));
        }
        Ok(())
    }

    /// The pair as the single predicate `A → G` over inputs and outputs.
    pub fn implication(&self) -> BoolFunc {
        self.assumption.implies(&self.guarantee)
    }
}

impl fmt::Display for ContractPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.assumption.to_expr(), self.guarantee.to_expr())
    }
}

/// Existential projection of `a` onto the external inputs of subsystem `i`.
///
/// The result is scoped over those inputs in declaration order. Variables of
/// `a` that do not belong to `i` are quantified away.
pub fn project_assumption(a: &BoolFunc, net: &BooleanNetwork, i: &str) -> Result<BoolFunc, NetworkError> {
    let (_, external) = net.classify_inputs(i)?;
    Ok(project_onto(a, &external))
}

/// `a` projected onto `block ∩ scope(a)` and extended over `block`.
pub(crate) fn project_onto(a: &BoolFunc, block: &VariableSet) -> BoolFunc {
    a.project(&block.intersection(a.scope()))
        .and_then(|p| p.extend_to(block))
        .expect("intersection lies in both scopes")
}

/// Per-block projections of `f`, provided their conjunction equals `f`.
pub fn conjunctive_decomposition(f: &BoolFunc, partition: &[VariableSet]) -> Option<Vec<BoolFunc>> {
    let parts: Vec<BoolFunc> = partition.iter().map(|b| project_onto(f, b)).collect();
    let conj = parts.iter().fold(BoolFunc::tautology(), |acc, p| acc.and(p));
    conj.equivalent(f).then_some(parts)
}
