use crate::boolean::{BoolFunc, Variable, VariableSet};

use super::NetworkError;

/// A memoryless Boolean subsystem `⟨U, E, Y, f⟩`.
///
/// Each output is defined by a function over (a subset of) the controls and
/// environment inputs. Scoping and disjointness are checked by
/// [`super::BooleanNetwork::validate`] and by [`BooleanSystem::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanSystem {
    name: String,
    controls: VariableSet,
    env_inputs: VariableSet,
    outputs: Vec<(Variable, BoolFunc)>,
}

impl BooleanSystem {
    pub fn new(
        name: impl Into<String>,
        controls: VariableSet,
        env_inputs: VariableSet,
        outputs: Vec<(Variable, BoolFunc)>,
    ) -> Self {
        BooleanSystem {
            name: name.into(),
            controls,
            env_inputs,
            outputs,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn controls(&self) -> &VariableSet {
        &self.controls
    }

    pub fn env_inputs(&self) -> &VariableSet {
        &self.env_inputs
    }

    pub fn outputs(&self) -> &[(Variable, BoolFunc)] {
        &self.outputs
    }

    pub fn output_vars(&self) -> VariableSet {
        let mut s = VariableSet::new();
        for (v, _) in &self.outputs {
            s.insert(v.clone());
        }
        s
    }

    pub fn output_func(&self, name: &str) -> Option<&BoolFunc> {
        self.outputs
            .iter()
            .find(|(v, _)| v.name() == name)
            .map(|(_, f)| f)
    }

    /// Controls followed by environment inputs; the layout of
    /// [`SystemEval`] input indices.
    pub fn input_scope(&self) -> VariableSet {
        self.controls.union(&self.env_inputs)
    }

    /// Local well-formedness problems, as human-readable messages.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for v in self.controls.intersection(&self.env_inputs).iter() {
            problems.push(format!(
                "subsystem {}: '{}' is both a control and an environment input",
                self.name, v
            ));
        }
        let inputs = self.input_scope();
        let mut seen = VariableSet::new();
        for (y, f) in &self.outputs {
            if !seen.insert(y.clone()) {
                problems.push(format!("subsystem {}: output '{}' defined twice", self.name, y));
            }
            if inputs.contains(y) {
                problems.push(format!(
                    "subsystem {}: output '{}' is also an input",
                    self.name, y
                ));
            }
            for v in f.scope().difference(&inputs).iter() {
                problems.push(format!(
                    "subsystem {}: output '{}' depends on '{}', which is not an input",
                    self.name, y, v
                ));
            }
        }
        problems
    }

    pub(crate) fn evaluator(&self) -> Result<SystemEval, NetworkError> {
        let problems = self.check();
        if !problems.is_empty() {
            return Err(NetworkError::IllFormedSystem(problems.join("; ")));
        }
        SystemEval::new(self)
    }
}

/// Output tables of one subsystem, each extended over its full input scope
/// (controls then environment inputs).
#[derive(Debug, Clone)]
pub(crate) struct SystemEval {
    pub n_controls: usize,
    pub n_env: usize,
    tables: Vec<BoolFunc>,
}

impl SystemEval {
    fn new(sys: &BooleanSystem) -> Result<Self, NetworkError> {
        let inputs = sys.input_scope();
        if inputs.len() > crate::boolean::MAX_VARS {
            return Err(NetworkError::TooLarge(format!(
                "subsystem {} has {} inputs",
                sys.name,
                inputs.len()
            )));
        }
        let tables = sys
            .outputs
            .iter()
            .map(|(_, f)| f.extend_to(&inputs).expect("checked scoping"))
            .collect();
        Ok(SystemEval {
            n_controls: sys.controls.len(),
            n_env: sys.env_inputs.len(),
            tables,
        })
    }

    pub fn n_outputs(&self) -> usize {
        self.tables.len()
    }

    /// Output valuation index for control index `u` and environment index `e`.
    #[inline]
    pub fn outputs(&self, u: usize, e: usize) -> usize {
        let idx = (u << self.n_env) | e;
        self.tables
            .iter()
            .fold(0usize, |acc, t| (acc << 1) | t.eval_index(idx) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::parse_expr;

    #[test]
    fn check_reports_scoping_and_overlap() {
        let u = VariableSet::from_names(&["u"]).unwrap();
        let e = VariableSet::from_names(&["u", "e"]).unwrap();
        let foreign = parse_expr("zz", &VariableSet::from_names(&["zz"]).unwrap()).unwrap();
        let sys = BooleanSystem::new("S", u, e, vec![(Variable::new("y").unwrap(), foreign)]);
        let problems = sys.check();
        assert_eq!(problems.len(), 2, "{problems:?}");
        assert!(sys.evaluator().is_err());
    }

    #[test]
    fn evaluation_layout() {
        let u = VariableSet::from_names(&["u2"]).unwrap();
        let e = VariableSet::from_names(&["e2", "i2"]).unwrap();
        let f = parse_expr("(e2 | i2) & u2", &u.union(&e)).unwrap();
        let sys = BooleanSystem::new("S2", u, e, vec![(Variable::new("y2").unwrap(), f)]);
        let ev = sys.evaluator().unwrap();
        assert_eq!(ev.outputs(1, 0b01), 1);
        assert_eq!(ev.outputs(1, 0b00), 0);
        assert_eq!(ev.outputs(0, 0b11), 0);
    }
}
