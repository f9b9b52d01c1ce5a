use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use dsynth_core::contract::{project_assumption, ContractPair};
use dsynth_core::distribution::build_distribution_graph;
use dsynth_core::eps::{check_faithfulness, compile_to_network, load_partition, PowerTopology};
use dsynth_core::io::{parse_contract, parse_network, ControllerFile, ControllerMode};
use dsynth_core::network::{BooleanNetwork, Controller};
use dsynth_core::oracle::{
    brute_force_distributed, enumerate_bicliques_subset, verify_closed_loop, OracleBudget, OracleError,
};
use dsynth_core::synthesis::{
    centralized_synthesis, completeness_certificate, distributed_synthesis, StepOutcome, SynthesisOutcome, CENTRAL_NAME,
};

use crate::report::Report;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(net: &Path, contract: &Path) -> Result<(BooleanNetwork, ContractPair)> {
    let network = parse_network(&read(net)?).with_context(|| format!("in {}", net.display()))?;
    let c = parse_contract(&read(contract)?, &network).with_context(|| format!("in {}", contract.display()))?;
    Ok((network, c))
}

fn outcome_name(o: StepOutcome) -> &'static str {
    match o {
        StepOutcome::Infeasible => "infeasible",
        StepOutcome::Backtracked => "backtracked",
        StepOutcome::Accepted => "accepted",
    }
}

fn report_distributed(r: &mut Report, out: &SynthesisOutcome) {
    r.line("trace:");
    for s in &out.trace {
        r.line(format!(
            "  {} (depth {}) candidate {}/{}: lra {} -> {}",
            s.subsystem,
            s.depth,
            s.candidate + 1,
            s.candidates,
            s.lra.to_expr(),
            outcome_name(s.outcome)
        ));
    }
    let trace: Vec<Value> = out
        .trace
        .iter()
        .map(|s| {
            json!({
                "subsystem": s.subsystem,
                "depth": s.depth,
                "candidate": s.candidate,
                "candidates": s.candidates,
                "lra": s.lra.to_expr(),
                "outcome": outcome_name(s.outcome),
            })
        })
        .collect();
    r.set("trace", trace);
    match &out.failure {
        Some(f) => {
            r.line(format!(
                "distributed synthesis failed at {} (depth {}) after {} candidate(s)",
                f.subsystem, f.depth, f.exhausted
            ));
            r.set(
                "failure",
                json!({"subsystem": f.subsystem, "depth": f.depth, "exhausted": f.exhausted}),
            );
        }
        None => {
            r.line("distributed synthesis succeeded");
            r.line("local contracts:");
            for (name, c) in &out.local_contracts {
                r.line(format!("  {name}: {c}"));
            }
        }
    }
    r.set("success", out.success);
}

/// Runs the brute-force search and reports its verdict. `None` when the
/// instance is over budget.
fn run_oracle(r: &mut Report, net: &BooleanNetwork, c: &ContractPair) -> Result<Option<bool>> {
    match brute_force_distributed(net, c, OracleBudget::default()) {
        Ok(found) => {
            let exists = found.is_some();
            r.line(format!(
                "oracle: distributed controllers {}",
                if exists { "exist" } else { "do not exist" }
            ));
            r.set("oracle", json!({"distributed_realizable": exists}));
            Ok(Some(exists))
        }
        Err(OracleError::BudgetExceeded { needed, budget }) => {
            r.line(format!("oracle: skipped, tables need {needed} bits (budget {budget})"));
            r.set("oracle", json!({"skipped": true, "needed": needed, "budget": budget}));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn mismatch(r: &mut Report, what: &str) {
    r.line(format!("oracle mismatch: {what}"));
    r.set("oracle_mismatch", what);
    r.fail();
}

pub fn validate(net: &Path) -> Result<Report> {
    let network = parse_network(&read(net)?).with_context(|| format!("in {}", net.display()))?;
    let mut r = Report::new("validate");
    let violations = network.validate();
    if violations.is_empty() {
        r.line(format!(
            "well-posed: {} subsystem(s), {} link(s)",
            network.subsystems().len(),
            network.wiring().len()
        ));
        let forest = network.system_graph().is_forest();
        r.line(format!("system graph is {}", if forest { "a forest" } else { "not a forest" }));
        r.set("forest", forest);
    } else {
        r.fail();
        for v in &violations {
            r.line(format!("violation: {v}"));
        }
    }
    r.set("violations", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    Ok(r)
}

pub fn synthesize(net: &Path, contract: &Path, central: bool, out: Option<&Path>, oracle: bool) -> Result<Report> {
    let (network, c) = load(net, contract)?;
    let mut r = Report::new("synthesize");
    r.set("mode", if central { "central" } else { "distributed" });

    let file = if central {
        let res = centralized_synthesis(&network, &c)?;
        r.line(format!(
            "central synthesis: {}",
            if res.realizable { "realizable" } else { "unrealizable" }
        ));
        r.set("success", res.realizable);
        if oracle {
            if let Some(exists) = run_oracle(&mut r, &network, &c)? {
                if exists && !res.realizable {
                    mismatch(&mut r, "distributed controllers exist but the flattened problem is unrealizable");
                }
            }
        }
        match res.controller {
            Some(k) => {
                let flat = BooleanNetwork::new(vec![res.system], vec![]);
                check_closed_loop(&mut r, &flat, std::slice::from_ref(&k), &c)?;
                Some(ControllerFile::new(ControllerMode::Central, &[k], &[]))
            }
            None => {
                r.fail();
                None
            }
        }
    } else {
        let res = distributed_synthesis(&network, &c)?;
        report_distributed(&mut r, &res);
        if oracle {
            if let Some(exists) = run_oracle(&mut r, &network, &c)? {
                if res.success && !exists {
                    mismatch(&mut r, "synthesis succeeded but no controllers exist");
                } else if !res.success && exists {
                    r.line("oracle: controllers exist that leaf-by-leaf synthesis does not find");
                }
            }
        }
        if res.success {
            let list = res.controller_list();
            check_closed_loop(&mut r, &network, &list, &c)?;
            let contracts: Vec<(String, ContractPair)> =
                res.local_contracts.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            Some(ControllerFile::new(ControllerMode::Distributed, &list, &contracts))
        } else {
            r.fail();
            None
        }
    };

    if let Some(file) = file {
        let text = file.to_json();
        match out {
            Some(path) => {
                fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
                r.line(format!("controller file written to {}", path.display()));
                r.set("out", path.display().to_string());
            }
            None => {
                let value: Value = serde_json::from_str(&text)?;
                r.attach("controller_file", value, text);
            }
        }
    }
    Ok(r)
}

/// Verifies synthesized controllers; a failure here is a bug, reported as such.
fn check_closed_loop(r: &mut Report, net: &BooleanNetwork, ks: &[Controller], c: &ContractPair) -> Result<()> {
    let v = verify_closed_loop(net, ks, c)?;
    r.set("verified", v.holds);
    if let Some(x) = v.counterexample {
        r.line(format!("closed loop violates the contract at {x}"));
        r.fail();
    } else {
        r.line("closed loop verified");
    }
    Ok(())
}

pub fn verify(net: &Path, contract: &Path, controllers: &Path, oracle: bool) -> Result<Report> {
    let (network, c) = load(net, contract)?;
    let file = ControllerFile::parse(&read(controllers)?).with_context(|| format!("in {}", controllers.display()))?;
    let ks = file.controllers().with_context(|| format!("in {}", controllers.display()))?;
    let target = match file.mode {
        ControllerMode::Distributed => network.clone(),
        ControllerMode::Central => BooleanNetwork::new(vec![network.flatten(CENTRAL_NAME)?], vec![]),
    };
    let mut r = Report::new("verify");
    let v = verify_closed_loop(&target, &ks, &c).context("controllers do not match the network")?;
    r.set("holds", v.holds);
    match &v.counterexample {
        Some(x) => {
            r.line(format!("contract violated at {x}"));
            r.set("counterexample", x.bit_string());
            r.set("counterexample_inputs", x.scope().names());
            r.fail();
        }
        None => r.line(format!(
            "contract holds on all {} admissible external valuation(s)",
            c.assumption.extend_to(&network.external_inputs()).map_or(0, |a| a.count())
        )),
    }
    if oracle {
        if let Some(exists) = run_oracle(&mut r, &network, &c)? {
            if v.holds && file.mode == ControllerMode::Distributed && !exists {
                mismatch(&mut r, "verified controllers exist but the search found none");
            }
        }
    }
    Ok(r)
}

pub fn distribute(net: &Path, contract: &Path, subsystem: &str, oracle: bool) -> Result<Report> {
    let (network, c) = load(net, contract)?;
    if network.subsystem(subsystem).is_none() {
        bail!("no subsystem named '{subsystem}'");
    }
    let mut r = Report::new("distribute");
    r.set("subsystem", subsystem);
    let projected = project_assumption(&c.assumption, &network, subsystem)?;
    r.line(format!("projected assumption at {subsystem}: {}", projected.to_expr()));
    r.set("projected_assumption", projected.to_expr());

    let graph = build_distribution_graph(&c.guarantee, &network, subsystem)?;
    let found = graph.maximal_distributions();
    r.line(format!("{} maximal distribution(s) of {}:", found.len(), c.guarantee.to_expr()));
    let mut list = Vec::new();
    for (k, d) in found.iter().enumerate() {
        r.line(format!("  {}. down {}  up {}", k + 1, d.down.to_expr(), d.up.to_expr()));
        list.push(json!({"down": d.down.to_expr(), "up": d.up.to_expr()}));
    }
    r.set("distributions", list);

    if oracle {
        match enumerate_bicliques_subset(&graph) {
            Ok(bicliques) => {
                let reference: Vec<_> = bicliques.iter().map(|b| graph.to_distribution(b)).collect();
                if reference == found {
                    r.line("oracle: subset enumeration agrees");
                    r.set("oracle", json!({"agrees": true}));
                } else {
                    mismatch(&mut r, "subset enumeration finds a different set of distributions");
                }
            }
            Err(OracleError::GraphTooLarge { left, right }) => {
                r.line(format!("oracle: skipped, graph is {left} x {right}"));
                r.set("oracle", json!({"skipped": true}));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(r)
}

pub fn eps(topology: &Path, partition: Option<&Path>, oracle: bool) -> Result<Report> {
    let t = PowerTopology::parse(&read(topology)?).with_context(|| format!("in {}", topology.display()))?;
    let p = match partition {
        Some(path) => Some(load_partition(&read(path)?).with_context(|| format!("in {}", path.display()))?),
        None => None,
    };
    let compiled = compile_to_network(&t, p.as_ref())?;
    let net = &compiled.network;
    let c = &compiled.contract;

    let mut r = Report::new("eps");
    r.line(format!("topology: {t}"));
    let mut groups = Vec::new();
    for (g, sys) in compiled.groups.iter().zip(net.subsystems()) {
        r.line(format!(
            "  {}: {} | {} control(s), {} environment input(s), {} output(s)",
            g.name,
            g.nodes.join(" "),
            sys.controls().len(),
            sys.env_inputs().len(),
            sys.outputs().len()
        ));
        groups.push(json!({"name": g.name, "nodes": g.nodes}));
    }
    r.set("groups", groups);
    r.line(format!("assumption: {}", c.assumption.to_expr()));
    r.line(format!("guarantee: {}", c.guarantee.to_expr()));

    let faithful = match check_faithfulness(&compiled)? {
        None => {
            r.line("compilation faithful on every health and contactor valuation");
            true
        }
        Some(m) => {
            r.line(format!("compilation mismatch at {}: {}", m.inputs, m.what));
            r.fail();
            false
        }
    };
    r.set("faithful", faithful);

    let certificate = completeness_certificate(net, c)?;
    r.line(format!("completeness certificate: {certificate}"));
    r.set("certificate", certificate);

    let dist = distributed_synthesis(net, c)?;
    report_distributed(&mut r, &dist);
    if dist.success {
        check_closed_loop(&mut r, net, &dist.controller_list(), c)?;
    } else {
        r.fail();
    }

    let central = centralized_synthesis(net, c)?;
    r.line(format!(
        "central synthesis: {}",
        if central.realizable { "realizable" } else { "unrealizable" }
    ));
    r.set("central_realizable", central.realizable);
    if certificate && central.realizable != dist.success {
        r.line("distributed and central verdicts disagree");
        r.fail();
    }

    if oracle {
        if let Some(exists) = run_oracle(&mut r, net, c)? {
            if exists != dist.success && certificate {
                mismatch(&mut r, "engine and search verdicts differ on a certified instance");
            }
        }
    }
    Ok(r)
}
