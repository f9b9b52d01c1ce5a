use crate::boolean::{BoolFunc, Valuation, VariableSet};
use crate::network::{BooleanSystem, Controller, SystemEval};

use super::SynthesisError;

/// Least restrictive assumption of one subsystem together with a controller
/// realizing the local contract under it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSynthesisResult {
    /// Over the internal inputs.
    pub lra: BoolFunc,
    /// Present iff `lra` is satisfiable.
    pub controller: Option<Controller>,
}

/// A local problem with assumption and guarantee laid out over the
/// subsystem's environment inputs and outputs.
struct Local<'a> {
    sys: &'a BooleanSystem,
    eval: SystemEval,
    a: BoolFunc,
    g: BoolFunc,
}

impl<'a> Local<'a> {
    fn new(sys: &'a BooleanSystem, a: &BoolFunc, g: &BoolFunc) -> Result<Self, SynthesisError> {
        let env = sys.env_inputs();
        let a = a.extend_to(env).map_err(|_| {
            SynthesisError::Scope(format!(
                "assumption over {} is not within the inputs {} of {}",
                a.scope(),
                env,
                sys.name()
            ))
        })?;
        let outs = sys.output_vars();
        let g = g.extend_to(&outs).map_err(|_| {
            SynthesisError::Scope(format!(
                "guarantee over {} is not within the outputs {} of {}",
                g.scope(),
                outs,
                sys.name()
            ))
        })?;
        Ok(Local {
            sys,
            eval: sys.evaluator()?,
            a,
            g,
        })
    }

    /// Least control index meeting the guarantee on row `e`.
    fn witness(&self, e: usize) -> Option<usize> {
        (0..self.sys.controls().valuation_count()).find(|&u| self.g.eval_index(self.eval.outputs(u, e)))
    }

    fn admissible(&self, e: usize) -> bool {
        self.a.eval_index(e)
    }

    /// Rows agreeing with `fixed`, as a mask/value pair over row indices.
    fn pin(&self, fixed: Option<&Valuation>) -> Result<(usize, usize), SynthesisError> {
        let Some(fixed) = fixed else { return Ok((0, 0)) };
        let env = self.sys.env_inputs();
        let n = env.len();
        let (mut mask, mut value) = (0, 0);
        for (v, &b) in fixed.scope().iter().zip(fixed.bits()) {
            let p = env.position(v).ok_or_else(|| {
                SynthesisError::Scope(format!("'{}' is not an input of {}", v, self.sys.name()))
            })?;
            mask |= 1 << (n - 1 - p);
            value |= (b as usize) << (n - 1 - p);
        }
        Ok((mask, value))
    }
}

/// Decides `∀e ∃u: A(e) → G(f(u, e))`, optionally with some environment
/// inputs pinned to `fixed`.
pub fn check_realizable(
    sys: &BooleanSystem,
    a: &BoolFunc,
    g: &BoolFunc,
    fixed: Option<&Valuation>,
) -> Result<bool, SynthesisError> {
    let local = Local::new(sys, a, g)?;
    let (mask, value) = local.pin(fixed)?;
    Ok((0..sys.env_inputs().valuation_count())
        .filter(|e| e & mask == value)
        .all(|e| !local.admissible(e) || local.witness(e).is_some()))
}

/// A total controller realizing `[A, G]` on `sys`. Each row gets the least
/// control valuation meeting `G`, or the all-false valuation if none does.
pub fn extract_controller(sys: &BooleanSystem, a: &BoolFunc, g: &BoolFunc) -> Result<Controller, SynthesisError> {
    let local = Local::new(sys, a, g)?;
    let mut table = Vec::with_capacity(sys.env_inputs().valuation_count());
    for e in 0..sys.env_inputs().valuation_count() {
        match local.witness(e) {
            Some(u) => table.push(u),
            None if local.admissible(e) => {
                return Err(SynthesisError::Unrealizable {
                    subsystem: sys.name().to_string(),
                    row: Valuation::from_index(sys.env_inputs(), e).to_string(),
                })
            }
            None => table.push(0),
        }
    }
    Ok(Controller::new(
        sys.name(),
        sys.env_inputs().clone(),
        sys.controls().clone(),
        table,
    )?)
}

/// The set of internal-input valuations under which `[a_loc, g_loc]` is
/// realizable on `sys`.
pub fn least_restrictive_assumption(
    sys: &BooleanSystem,
    a_loc: &BoolFunc,
    g_loc: &BoolFunc,
    internal: &VariableSet,
) -> Result<BoolFunc, SynthesisError> {
    let local = Local::new(sys, a_loc, g_loc)?;
    let env = sys.env_inputs();
    let n_env = env.len();
    let positions = internal
        .iter()
        .map(|v| {
            env.position(v)
                .ok_or_else(|| SynthesisError::Scope(format!("'{}' is not an input of {}", v, sys.name())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // one pass over rows: a failing row rules out its internal valuation
    let mut ok = vec![true; internal.valuation_count()];
    for e in 0..env.valuation_count() {
        if local.admissible(e) && local.witness(e).is_none() {
            ok[crate::boolean::gather(e, n_env, &positions)] = false;
        }
    }
    Ok(BoolFunc::from_index_fn(internal, |i| ok[i]))
}

/// Least restrictive assumption plus a controller for `[a_loc ∧ λ, g_loc]`.
pub fn find_lra(
    sys: &BooleanSystem,
    a_loc: &BoolFunc,
    g_loc: &BoolFunc,
    internal: &VariableSet,
) -> Result<LocalSynthesisResult, SynthesisError> {
    let lra = least_restrictive_assumption(sys, a_loc, g_loc, internal)?;
    let controller = if lra.is_false() {
        None
    } else {
        Some(extract_controller(sys, &a_loc.and(&lra), g_loc)?)
    };
    Ok(LocalSynthesisResult { lra, controller })
}
