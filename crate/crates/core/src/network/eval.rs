use crate::boolean::VariableSet;

use super::{BooleanNetwork, NetworkError, SystemEval};

#[derive(Debug, Clone, Copy)]
enum Source {
    /// Position in the network's external-input scope.
    External(usize),
    /// Output `k` of subsystem `sys`.
    Output { sys: usize, k: usize },
}

/// Precomputed evaluation plan for a well-posed network.
///
/// Subsystems are evaluated in topological order; each environment input
/// reads either a bit of the external valuation or an upstream output.
#[derive(Debug, Clone)]
pub(crate) struct NetworkEval {
    order: Vec<usize>,
    systems: Vec<SystemEval>,
    sources: Vec<Vec<Source>>,
    pub ext_scope: VariableSet,
    pub out_scope: VariableSet,
}

impl NetworkEval {
    pub fn new(net: &BooleanNetwork) -> Result<Self, NetworkError> {
        net.ensure_well_posed()?;
        let graph = net.system_graph();
        let order = graph
            .topological_order()
            .expect("well-posed networks are acyclic");
        let ext_scope = net.external_inputs();
        let out_scope = net.all_outputs();
        let mut systems = Vec::new();
        let mut sources = Vec::new();
        for sys in net.subsystems() {
            systems.push(sys.evaluator()?);
            let srcs = sys
                .env_inputs()
                .iter()
                .map(|e| match net.driver_of(sys.name(), e.name()) {
                    Some(link) => {
                        let from = net.index_of(&link.from_sys).expect("validated link");
                        let k = net.subsystems()[from]
                            .outputs()
                            .iter()
                            .position(|(y, _)| y.name() == link.from_output)
                            .expect("validated link");
                        Source::Output { sys: from, k }
                    }
                    None => Source::External(ext_scope.position(e).expect("undriven input is external")),
                })
                .collect();
            sources.push(srcs);
        }
        Ok(NetworkEval {
            order,
            systems,
            sources,
            ext_scope,
            out_scope,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn system(&self, i: usize) -> &SystemEval {
        &self.systems[i]
    }

    /// Environment valuation index of subsystem `i` given the external
    /// valuation and the output indices computed so far.
    #[inline]
    pub fn env_index(&self, i: usize, ext: usize, ys: &[usize]) -> usize {
        let n_ext = self.ext_scope.len();
        self.sources[i].iter().fold(0usize, |acc, src| {
            let bit = match *src {
                Source::External(p) => (ext >> (n_ext - 1 - p)) & 1,
                Source::Output { sys, k } => {
                    let n = self.systems[sys].n_outputs();
                    (ys[sys] >> (n - 1 - k)) & 1
                }
            };
            (acc << 1) | bit
        })
    }

    /// Runs the closed loop on external valuation `ext`. `choose(i, e)` gives
    /// the control index of subsystem `i` on environment index `e`; if it
    /// returns `None` the run stops and reports that subsystem.
    pub fn run(
        &self,
        ext: usize,
        mut choose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Vec<usize>, usize> {
        let mut ys = vec![0usize; self.systems.len()];
        for &i in &self.order {
            let e = self.env_index(i, ext, &ys);
            let u = choose(i, e).ok_or(i)?;
            ys[i] = self.systems[i].outputs(u, e);
        }
        Ok(ys)
    }

    /// Concatenates per-subsystem output indices into an index over
    /// `out_scope`.
    pub fn global_output_index(&self, ys: &[usize]) -> usize {
        ys.iter()
            .zip(&self.systems)
            .fold(0usize, |acc, (&y, s)| (acc << s.n_outputs()) | y)
    }
}
