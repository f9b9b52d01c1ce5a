use crate::boolean::{Valuation, VariableSet};

use super::{BooleanSystem, NetworkError};

/// A total lookup table from environment-input valuations of one subsystem
/// to control valuations.
///
/// `table[e]` is the control valuation index chosen for environment valuation
/// index `e`; both indices follow the lexicographic numbering of
/// [`Valuation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller {
    subsystem: String,
    inputs: VariableSet,
    controls: VariableSet,
    table: Vec<usize>,
}

impl Controller {
    pub fn new(
        subsystem: impl Into<String>,
        inputs: VariableSet,
        controls: VariableSet,
        table: Vec<usize>,
    ) -> Result<Self, NetworkError> {
        let subsystem = subsystem.into();
        if table.len() != inputs.valuation_count() {
            return Err(NetworkError::BadController {
                subsystem,
                reason: format!(
                    "table has {} rows, expected {}",
                    table.len(),
                    inputs.valuation_count()
                ),
            });
        }
        if let Some(bad) = table.iter().find(|&&u| u >= controls.valuation_count()) {
            return Err(NetworkError::BadController {
                subsystem,
                reason: format!("control index {bad} out of range"),
            });
        }
        Ok(Controller {
            subsystem,
            inputs,
            controls,
            table,
        })
    }

    /// Tabulates `choose` over every environment valuation of `sys`.
    pub fn from_fn(sys: &BooleanSystem, choose: impl FnMut(usize) -> usize) -> Result<Self, NetworkError> {
        let n = sys.env_inputs().valuation_count();
        let table = (0..n).map(choose).collect();
        Self::new(sys.name(), sys.env_inputs().clone(), sys.controls().clone(), table)
    }

    /// Applies the same control valuation on every row.
    pub fn constant(sys: &BooleanSystem, control: usize) -> Result<Self, NetworkError> {
        Self::from_fn(sys, |_| control)
    }

    pub fn subsystem(&self) -> &str {
        &self.subsystem
    }

    pub fn inputs(&self) -> &VariableSet {
        &self.inputs
    }

    pub fn controls(&self) -> &VariableSet {
        &self.controls
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn control_index(&self, input: usize) -> usize {
        self.table[input]
    }

    /// Looks up the control valuation for an input valuation over `inputs`.
    pub fn lookup(&self, input: &Valuation) -> Option<Valuation> {
        if *input.scope() != self.inputs {
            return None;
        }
        Some(Valuation::from_index(&self.controls, self.table[input.index()]))
    }

    /// Rows as `(input, control)` valuation pairs, in input order.
    pub fn rows(&self) -> impl Iterator<Item = (Valuation, Valuation)> + '_ {
        self.table.iter().enumerate().map(|(e, &u)| {
            (
                Valuation::from_index(&self.inputs, e),
                Valuation::from_index(&self.controls, u),
            )
        })
    }

    /// Whether this controller matches the interface of `sys`.
    pub fn fits(&self, sys: &BooleanSystem) -> bool {
        self.subsystem == sys.name() && self.inputs == *sys.env_inputs() && self.controls == *sys.controls()
    }
}
