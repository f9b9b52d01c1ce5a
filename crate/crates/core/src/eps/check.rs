use crate::boolean::Valuation;

use super::{ac_coupled, bus_status, live_path, CompiledEps, ContactorState, HealthState, NodeKind};

/// A disagreement between the compiled network and the topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    /// Health bits and contactor settings of the offending case.
    pub inputs: Valuation,
    pub what: String,
}

/// Evaluates the flattened network on every health and contactor valuation
/// and compares each output, and the guarantee, with live-path semantics on
/// the topology. Returns the first mismatch.
pub fn check_faithfulness(compiled: &CompiledEps) -> Result<Option<Mismatch>, super::EpsError> {
    let t = &compiled.topology;
    let flat = compiled.network.flatten("flat")?;
    let inputs = flat.input_scope();
    let outputs = flat.output_vars();
    let tables: Vec<_> = flat
        .outputs()
        .iter()
        .map(|(y, f)| (y.name().to_string(), f.extend_to(&inputs).expect("output scoped by inputs")))
        .collect();
    let guarantee = compiled
        .contract
        .guarantee
        .extend_to(&outputs)
        .expect("guarantee over outputs");
    let generators = t.of_kind(NodeKind::Generator);
    let buses = t.of_kind(NodeKind::Bus);

    for idx in 0..inputs.valuation_count() {
        let v = Valuation::from_index(&inputs, idx);
        let h = HealthState::with_offline(t.fallible().into_iter().filter(|n| v.get_name(n) == Some(false)));
        let c = ContactorState::with_closed(t.contactors().into_iter().filter(|n| v.get_name(n) == Some(true)));
        let mut y = 0usize;
        for (name, f) in &tables {
            let got = f.eval_index(idx);
            y = (y << 1) | got as usize;
            let expected = if let Some((_, g1, g2)) = compiled.couplings.iter().find(|(o, _, _)| o == name) {
                ac_coupled(t, &h, &c, g1, g2)?
            } else if let Some(edge) = name.strip_prefix("pwr_") {
                let k = t.edges().iter().position(|e| e.name() == edge).expect("feed edge");
                let upstream = &t.nodes()[t.ends(k).0].name;
                let mut any = false;
                for g in &generators {
                    any |= live_path(t, &h, &c, g, upstream)?;
                }
                any
            } else {
                bus_status(t, &h, &c, name)?
            };
            if got != expected {
                return Ok(Some(Mismatch {
                    inputs: v,
                    what: format!("output {name} is {got}, topology says {expected}"),
                }));
            }
        }
        let mut physical = true;
        for b in &buses {
            physical &= bus_status(t, &h, &c, b)?;
        }
        for (_, g1, g2) in &compiled.couplings {
            physical &= !ac_coupled(t, &h, &c, g1, g2)?;
        }
        if guarantee.eval_index(y) != physical {
            return Ok(Some(Mismatch {
                inputs: v,
                what: format!("guarantee is {}, topology says {physical}", !physical),
            }));
        }
    }
    Ok(None)
}
