use super::{ContactorState, Current, EpsError, HealthState, NodeKind, PowerTopology};

/// Nodes reachable from `sources` along conducting edges through usable
/// nodes. Sources that are not usable are ignored.
pub(crate) fn reach(
    t: &PowerTopology,
    sources: impl IntoIterator<Item = usize>,
    node_ok: impl Fn(usize) -> bool,
    edge_ok: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let mut seen = vec![false; t.nodes().len()];
    let mut stack: Vec<usize> = sources.into_iter().filter(|&s| node_ok(s)).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for k in 0..t.edges().len() {
            if !edge_ok(k) {
                continue;
            }
            let (a, b) = t.ends(k);
            let next = if a == u {
                b
            } else if b == u && !t.is_feeder(k) {
                a
            } else {
                continue;
            };
            if !seen[next] && node_ok(next) {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

fn index(t: &PowerTopology, name: &str) -> Result<usize, EpsError> {
    t.node_index(name)
        .ok_or_else(|| EpsError::UnknownComponent(name.to_string()))
}

/// Whether power can flow from `a` to `b` along closed contactors and solid
/// links, with every component on the way, ends included, online.
pub fn live_path(
    t: &PowerTopology,
    h: &HealthState,
    c: &ContactorState,
    a: &str,
    b: &str,
) -> Result<bool, EpsError> {
    let (a, b) = (index(t, a)?, index(t, b)?);
    let seen = reach(
        t,
        [a],
        |n| h.is_healthy(&t.nodes()[n]),
        |k| c.conducts(&t.edges()[k]),
    );
    Ok(seen[b])
}

/// A bus is powered iff some generator has a live path to it.
pub fn bus_status(t: &PowerTopology, h: &HealthState, c: &ContactorState, bus: &str) -> Result<bool, EpsError> {
    let b = index(t, bus)?;
    if t.nodes()[b].kind != NodeKind::Bus {
        return Err(EpsError::NotABus(bus.to_string()));
    }
    let generators = (0..t.nodes().len()).filter(|&n| t.nodes()[n].kind == NodeKind::Generator);
    let seen = reach(
        t,
        generators,
        |n| h.is_healthy(&t.nodes()[n]),
        |k| c.conducts(&t.edges()[k]),
    );
    Ok(seen[b])
}

/// Whether two AC sources share a live path through AC components.
pub fn ac_coupled(
    t: &PowerTopology,
    h: &HealthState,
    c: &ContactorState,
    g1: &str,
    g2: &str,
) -> Result<bool, EpsError> {
    let (i, j) = (index(t, g1)?, index(t, g2)?);
    let ok = |n: usize| {
        let node = &t.nodes()[n];
        node.current == Current::Ac && h.is_healthy(node)
    };
    let conducts = |k: usize| c.conducts(&t.edges()[k]);
    Ok(reach(t, [i], ok, conducts)[j] || reach(t, [j], ok, conducts)[i])
}
