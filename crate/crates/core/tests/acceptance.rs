//! Acceptance criteria 1-10, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsynth_core::boolean::{BoolFunc, Valuation, Variable, VariableSet};
use dsynth_core::contract::{project_assumption, ContractPair};
use dsynth_core::distribution::{build_distribution_graph, maximal_distributions};
use dsynth_core::eps::{check_faithfulness, compile_to_network, load_partition, PowerTopology};
use dsynth_core::io::{parse_contract, parse_network, ControllerFile, ControllerMode};
use dsynth_core::network::{BooleanNetwork, BooleanSystem, Controller, Link};
use dsynth_core::oracle::{brute_force_distributed, enumerate_bicliques_subset, verify_closed_loop, OracleBudget};
use dsynth_core::synthesis::{
    centralized_synthesis, completeness_certificate, distributed_synthesis, extract_controller,
    rewire_to_parent_outputs, update_contract, SynthesisOutcome,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn example(n: usize) -> (BooleanNetwork, ContractPair) {
    let net = parse_network(&fixture(&format!("example{n}.net.json"))).unwrap();
    let c = parse_contract(&fixture(&format!("example{n}.ctr.json")), &net).unwrap();
    (net, c)
}

fn var(name: &str) -> BoolFunc {
    BoolFunc::var(name).unwrap()
}

fn vs(names: &[String]) -> VariableSet {
    VariableSet::from_names(names).unwrap()
}

/// Controller file plus trace: the bytes criterion 10 compares.
fn digest(out: &SynthesisOutcome) -> String {
    let contracts: Vec<(String, ContractPair)> =
        out.local_contracts.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let file = ControllerFile::new(ControllerMode::Distributed, &out.controller_list(), &contracts);
    format!("{}{:?}{:?}\n", file.to_json(), out.trace, out.failure)
}

/// Runs the closed loop on one external valuation by evaluating subsystems
/// whenever all their inputs are known. Returns every variable's value.
fn simulate(net: &BooleanNetwork, ks: &[Controller], ext: &Valuation) -> BTreeMap<String, bool> {
    let mut known: BTreeMap<String, bool> =
        ext.scope().iter().map(|v| (v.name().to_string(), ext.get(v).unwrap())).collect();
    for l in net.wiring() {
        known.remove(&l.to_input);
    }
    let mut done = vec![false; net.subsystems().len()];
    while done.iter().any(|d| !d) {
        let mut progressed = false;
        for (i, sys) in net.subsystems().iter().enumerate() {
            if done[i] {
                continue;
            }
            for l in net.wiring().iter().filter(|l| l.to_sys == sys.name()) {
                if let Some(&b) = known.get(&l.from_output) {
                    known.insert(l.to_input.clone(), b);
                }
            }
            if !sys.env_inputs().iter().all(|v| known.contains_key(v.name())) {
                continue;
            }
            let k = ks.iter().find(|k| k.subsystem() == sys.name()).unwrap();
            let bits: Vec<bool> = k.inputs().iter().map(|v| known[v.name()]).collect();
            let row = Valuation::new(k.inputs().clone(), bits).unwrap().index();
            let u = Valuation::from_index(k.controls(), k.table()[row]);
            for v in u.scope().iter() {
                known.insert(v.name().to_string(), u.get(v).unwrap());
            }
            for (y, f) in sys.outputs() {
                let value = f.eval_with(|v| known[v.name()]);
                known.insert(y.name().to_string(), value);
            }
            done[i] = true;
            progressed = true;
        }
        assert!(progressed, "network has a cycle");
    }
    known
}

/// Checks `A → G` on every external valuation with [`simulate`].
fn satisfies(net: &BooleanNetwork, ks: &[Controller], c: &ContractPair) -> bool {
    let ext = net.external_inputs();
    (0..ext.valuation_count()).all(|x| {
        let v = Valuation::from_index(&ext, x);
        let values = simulate(net, ks, &v);
        !c.assumption.eval_with(|v| values[v.name()]) || c.guarantee.eval_with(|v| values[v.name()])
    })
}

fn random_table(rng: &mut ChaCha8Rng, scope: &VariableSet, density: f64) -> BoolFunc {
    BoolFunc::from_index_fn(scope, |_| rng.gen_bool(density))
}

/// Random well-posed network with at most three subsystems and at most two
/// controls, environment inputs and outputs each. With `forest`, every
/// subsystem reads from at most one parent.
fn random_network(rng: &mut ChaCha8Rng, forest: bool) -> BooleanNetwork {
    let n = rng.gen_range(1..=3);
    let mut systems = Vec::new();
    let mut wiring = Vec::new();
    let mut outputs: Vec<Vec<String>> = Vec::new();
    for j in 0..n {
        let name = format!("S{}", j + 1);
        let controls: Vec<String> = (0..rng.gen_range(0..=2)).map(|k| format!("u{j}{k}")).collect();
        let env: Vec<String> = (0..rng.gen_range(0..=2)).map(|k| format!("e{j}{k}")).collect();
        let ys: Vec<String> = (0..rng.gen_range(1..=2)).map(|k| format!("y{j}{k}")).collect();
        let parent = (j > 0 && rng.gen_bool(0.7)).then(|| rng.gen_range(0..j));
        for e in &env {
            let from = if forest {
                parent.filter(|_| rng.gen_bool(0.7))
            } else {
                (j > 0 && rng.gen_bool(0.6)).then(|| rng.gen_range(0..j))
            };
            if let Some(p) = from {
                let y = outputs[p].choose(rng).unwrap();
                wiring.push(Link::new(&format!("S{}", p + 1), y, &name, e));
            }
        }
        let (controls, env) = (vs(&controls), vs(&env));
        let scope = controls.union(&env);
        let funcs = ys
            .iter()
            .map(|y| (Variable::new(y.as_str()).unwrap(), random_table(rng, &scope, 0.5)))
            .collect();
        systems.push(BooleanSystem::new(name, controls, env, funcs));
        outputs.push(ys);
    }
    systems.shuffle(rng);
    let net = BooleanNetwork::new(systems, wiring);
    assert!(net.validate().is_empty(), "generator produced an ill-posed network");
    net
}

fn random_contract(rng: &mut ChaCha8Rng, net: &BooleanNetwork) -> ContractPair {
    let a = random_table(rng, &net.external_inputs(), 0.7);
    let g = random_table(rng, &net.all_outputs(), 0.6);
    ContractPair::new(a, g)
}

/// Conjunction of one random factor per subsystem block.
fn random_conjunctive_contract(rng: &mut ChaCha8Rng, net: &BooleanNetwork) -> ContractPair {
    let mut a = BoolFunc::tautology();
    let mut g = BoolFunc::tautology();
    for sys in net.subsystems() {
        let (_, ext) = net.classify_inputs(sys.name()).unwrap();
        a = a.and(&random_table(rng, &ext, 0.8));
        g = g.and(&random_table(rng, &sys.output_vars(), 0.7));
    }
    ContractPair::new(a, g)
}

fn criterion_1() -> Check {
    let (net, c) = example(1);
    let out = distributed_synthesis(&net, &c).map_err(|e| e.to_string())?;
    ensure!(out.success, "synthesis failed");
    let c2 = &out.local_contracts["S2"];
    let a2 = rewire_to_parent_outputs(&c2.assumption.project(&c2.assumption.support()).unwrap(), &net, "S2")
        .map_err(|e| e.to_string())?;
    ensure!(a2.equivalent(&BoolFunc::tautology().and(&var("y1"))), "C2 assumption is {}", c2.assumption);
    ensure!(c2.guarantee.equivalent(&var("y2")), "C2 guarantee is {}", c2.guarantee);
    let c1 = &out.local_contracts["S1"];
    ensure!(c1.assumption.equivalent(&var("e1")), "C1 assumption is {}", c1.assumption);
    ensure!(c1.guarantee.equivalent(&var("y1")), "C1 guarantee is {}", c1.guarantee);
    let ks = out.controller_list();
    let ext = net.external_inputs();
    ensure!(ext.len() == 2, "expected two external inputs");
    for x in 0..4 {
        let values = simulate(&net, &ks, &Valuation::from_index(&ext, x));
        ensure!(!values["e1"] || values["y2"], "e1 -> y2 fails on valuation {x}");
    }
    Ok(digest(&out))
}

fn criterion_2() -> Check {
    let (net, c) = example(2);
    let out = distributed_synthesis(&net, &c).map_err(|e| e.to_string())?;
    ensure!(!out.success, "synthesis unexpectedly succeeded");
    let found = brute_force_distributed(&net, &c, OracleBudget::default()).map_err(|e| e.to_string())?;
    let found = found.ok_or("oracle found no controllers")?;
    ensure!(satisfies(&net, &found, &c), "oracle controllers violate the contract");

    let s1 = net.subsystem("S1").unwrap();
    let s2 = net.subsystem("S2").unwrap();
    let k1 = extract_controller(s1, &var("e1"), &var("y1")).map_err(|e| e.to_string())?;
    let k2 = extract_controller(s2, &var("e2").or(&var("e2_from_y1")), &var("y2")).map_err(|e| e.to_string())?;
    let manual = vec![k1, k2];
    let v = verify_closed_loop(&net, &manual, &c).map_err(|e| e.to_string())?;
    ensure!(v.holds && satisfies(&net, &manual, &c), "manual contracts' controllers rejected");
    Ok(digest(&out))
}

fn criterion_3() -> Check {
    let (net, c) = example(3);
    let ds = maximal_distributions(&c.guarantee, &net, "S2").map_err(|e| e.to_string())?;
    ensure!(ds.len() == 2, "{} distributions", ds.len());
    let has = |down: &BoolFunc, up: &BoolFunc| ds.iter().any(|d| d.down.equivalent(down) && d.up.equivalent(up));
    ensure!(has(&var("y2"), &BoolFunc::tautology()), "missing {{y2, True}}");
    ensure!(has(&BoolFunc::tautology(), &var("y1")), "missing {{True, y1}}");
    let out = distributed_synthesis(&net, &c).map_err(|e| e.to_string())?;
    let oracle = brute_force_distributed(&net, &c, OracleBudget::default()).map_err(|e| e.to_string())?;
    ensure!(out.success == oracle.is_some(), "engine says {}, oracle says {}", out.success, oracle.is_some());
    if out.success {
        ensure!(satisfies(&net, &out.controller_list(), &c), "engine controllers violate the contract");
    }
    Ok(digest(&out))
}

fn criterion_4() -> Check {
    let (net, c) = example(4);
    let ds = maximal_distributions(&c.guarantee, &net, "S3").map_err(|e| e.to_string())?;
    ensure!(ds.len() == 1, "{} distributions at S3", ds.len());
    let s3 = net.subsystem("S3").unwrap();
    let (internal, _) = net.classify_inputs("S3").map_err(|e| e.to_string())?;
    let down = ds[0].down.clone();
    let local = project_assumption(&c.assumption, &net, "S3").map_err(|e| e.to_string())?;
    let lra = dsynth_core::synthesis::find_lra(s3, &local, &down, &internal).map_err(|e| e.to_string())?.lra;
    let rewired = rewire_to_parent_outputs(&lra, &net, "S3").map_err(|e| e.to_string())?;
    let updated = update_contract(&c, &ds[0].up, &rewired);
    ensure!(updated.assumption.is_true(), "updated assumption is {}", updated.assumption);
    ensure!(updated.guarantee.equivalent(&var("y1").or(&var("y2"))), "updated guarantee is {}", updated.guarantee);

    let residual = net.remove_subsystem("S3").map_err(|e| e.to_string())?;
    let (net3, c3) = example(3);
    ensure!(residual == net3, "residual network differs from Example 3");
    ensure!(
        updated.guarantee.equivalent(&c3.guarantee) && updated.assumption.equivalent(&c3.assumption),
        "residual contract differs from Example 3"
    );
    let out = distributed_synthesis(&net, &c).map_err(|e| e.to_string())?;
    Ok(digest(&out))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut log = String::new();
    for case in 0..500 {
        let n_vars = rng.gen_range(1..=6);
        let n_blocks = rng.gen_range(1..=3.min(n_vars));
        let mut blocks: Vec<Vec<String>> = vec![Vec::new(); n_blocks];
        for v in 0..n_vars {
            let b = if v < n_blocks { v } else { rng.gen_range(0..n_blocks) };
            blocks[b].push(format!("x{v}"));
        }
        let systems: Vec<BooleanSystem> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let env = vs(b);
                let out = (Variable::new(format!("o{i}")).unwrap(), BoolFunc::literal(&env, env.get(0).unwrap()).unwrap());
                BooleanSystem::new(format!("S{i}"), VariableSet::new(), env, vec![out])
            })
            .collect();
        let net = BooleanNetwork::new(systems, vec![]);
        let all = net.external_inputs();
        let density = rng.gen_range(0.1..0.9);
        let a = random_table(&mut rng, &all, density);
        let projections: Vec<BoolFunc> = (0..n_blocks)
            .map(|i| project_assumption(&a, &net, &format!("S{i}")).unwrap())
            .collect();
        for x in a.satisfying_valuations() {
            for (i, p) in projections.iter().enumerate() {
                ensure!(p.eval_with(|v| x.get(v).unwrap()), "case {case}: containment fails at block {i}");
            }
        }
        for (i, p) in projections.iter().enumerate() {
            let block = vs(&blocks[i]);
            for local in 0..block.valuation_count() {
                let lv = Valuation::from_index(&block, local);
                let witness = (0..all.valuation_count()).any(|x| {
                    let full = Valuation::from_index(&all, x);
                    a.eval_index(x) && block.iter().all(|v| full.get(v) == lv.get(v))
                });
                ensure!(
                    p.eval_with(|v| lv.get(v).unwrap()) == witness,
                    "case {case}: block {i} valuation {local} has no completion"
                );
            }
        }
        log.push_str(&format!("{:?}\n", projections.iter().map(BoolFunc::to_expr).collect::<Vec<_>>()));
    }
    Ok(log)
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut log = String::new();
    for case in 0..200 {
        let n1 = rng.gen_range(1..=3);
        let n2 = rng.gen_range(1..=3);
        let mk = |name: &str, prefix: &str, n: usize| {
            let env = vs(&[format!("{prefix}_in")]);
            let outs = (0..n)
                .map(|k| (Variable::new(format!("{prefix}{k}")).unwrap(), BoolFunc::literal(&env, env.get(0).unwrap()).unwrap()))
                .collect();
            BooleanSystem::new(name, VariableSet::new(), env, outs)
        };
        let net = BooleanNetwork::new(vec![mk("S1", "a", n1), mk("S2", "b", n2)], vec![]);
        let density = rng.gen_range(0.2..0.95);
        let g = random_table(&mut rng, &net.all_outputs(), density);
        let found = maximal_distributions(&g, &net, "S2").map_err(|e| e.to_string())?;
        let graph = build_distribution_graph(&g, &net, "S2").map_err(|e| e.to_string())?;
        let reference: Vec<_> = enumerate_bicliques_subset(&graph)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|b| graph.to_distribution(b))
            .collect();
        ensure!(found.len() == reference.len(), "case {case}: {} vs {} distributions", found.len(), reference.len());
        for d in &reference {
            ensure!(
                found.iter().any(|f| f.down.equivalent(&d.down) && f.up.equivalent(&d.up)),
                "case {case}: engine misses down {} up {}",
                d.down,
                d.up
            );
        }
        for d in &found {
            ensure!(d.down.and(&d.up).entails(&g), "case {case}: down and up do not imply the guarantee");
            log.push_str(&format!("{} / {}; ", d.down.to_expr(), d.up.to_expr()));
        }
        log.push('\n');
    }
    Ok(log)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut log = String::new();
    let mut successes = 0;
    for case in 0..200 {
        let net = random_network(&mut rng, false);
        let c = random_contract(&mut rng, &net);
        let out = distributed_synthesis(&net, &c).map_err(|e| format!("case {case}: {e}"))?;
        if out.success {
            successes += 1;
            let ks = out.controller_list();
            let v = verify_closed_loop(&net, &ks, &c).map_err(|e| e.to_string())?;
            ensure!(v.holds, "case {case}: controllers fail at {:?}", v.counterexample);
            ensure!(satisfies(&net, &ks, &c), "case {case}: simulation disagrees with verification");
        }
        log.push_str(&digest(&out));
    }
    ensure!(successes >= 20, "only {successes} successes; the suite is nearly vacuous");
    Ok(format!("{successes} successes\n{log}"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut log = String::new();
    let mut realizable = 0;
    for case in 0..200 {
        let net = random_network(&mut rng, true);
        let c = random_conjunctive_contract(&mut rng, &net);
        ensure!(
            completeness_certificate(&net, &c).map_err(|e| e.to_string())?,
            "case {case}: generator produced an uncertified instance"
        );
        let out = distributed_synthesis(&net, &c).map_err(|e| format!("case {case}: {e}"))?;
        let oracle = brute_force_distributed(&net, &c, OracleBudget::default()).map_err(|e| e.to_string())?;
        ensure!(
            out.success == oracle.is_some(),
            "case {case}: engine says {}, oracle says {}",
            out.success,
            oracle.is_some()
        );
        if let Some(ks) = oracle {
            realizable += 1;
            ensure!(satisfies(&net, &ks, &c), "case {case}: oracle controllers violate the contract");
        }
        log.push_str(&digest(&out));
    }
    ensure!((20..=180).contains(&realizable), "{realizable} of 200 realizable; verdicts are too uniform");
    Ok(format!("{realizable} realizable\n{log}"))
}

fn criterion_9() -> Check {
    let t = PowerTopology::parse(&fixture("eps_scaled.topology.json")).map_err(|e| e.to_string())?;
    let compiled = compile_to_network(&t, None).map_err(|e| e.to_string())?;
    if let Some(m) = check_faithfulness(&compiled).map_err(|e| e.to_string())? {
        return Err(format!("unfaithful at {}: {}", m.inputs, m.what));
    }
    let (net, c) = (&compiled.network, &compiled.contract);
    ensure!(net.subsystems().len() == 3, "{} subsystems", net.subsystems().len());
    ensure!(completeness_certificate(net, c).map_err(|e| e.to_string())?, "certificate is false");
    let out = distributed_synthesis(net, c).map_err(|e| e.to_string())?;
    ensure!(out.success, "distributed synthesis failed");
    ensure!(satisfies(net, &out.controller_list(), c), "distributed controllers violate the contract");
    let central = centralized_synthesis(net, c).map_err(|e| e.to_string())?;
    ensure!(central.realizable == out.success, "central synthesis disagrees");
    let flat = BooleanNetwork::new(vec![central.system.clone()], vec![]);
    let k = central.controller.clone().ok_or("no central controller")?;
    ensure!(satisfies(&flat, std::slice::from_ref(&k), c), "central controller violates the contract");

    let single = load_partition(&fixture("eps_single.partition.json")).map_err(|e| e.to_string())?;
    let one = compile_to_network(&t, Some(&single)).map_err(|e| e.to_string())?;
    ensure!(check_faithfulness(&one).map_err(|e| e.to_string())?.is_none(), "single-group compilation unfaithful");
    let one_out = distributed_synthesis(&one.network, &one.contract).map_err(|e| e.to_string())?;
    ensure!(one_out.success == central.realizable, "single-group synthesis disagrees with central");

    let central_file = ControllerFile::new(ControllerMode::Central, &[k], &[]).to_json();
    Ok(format!("{}{}", digest(&out), central_file))
}

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, title: "Example 1 end-to-end", limit: Duration::from_secs(1), run: criterion_1 },
    Criterion { id: 2, title: "Example 2 sound but incomplete", limit: Duration::from_secs(1), run: criterion_2 },
    Criterion { id: 3, title: "Example 3 distributions and verdict", limit: Duration::from_secs(1), run: criterion_3 },
    Criterion { id: 4, title: "Example 4 reduces to Example 3", limit: Duration::from_secs(1), run: criterion_4 },
    Criterion { id: 5, title: "assumption projection, 500 cases", limit: Duration::from_secs(10), run: criterion_5 },
    Criterion { id: 6, title: "distributions vs biclique oracle, 200 cases", limit: Duration::from_secs(30), run: criterion_6 },
    Criterion { id: 7, title: "soundness, 200 random networks", limit: Duration::from_secs(60), run: criterion_7 },
    Criterion { id: 8, title: "completeness, 200 certified instances", limit: Duration::from_secs(120), run: criterion_8 },
    Criterion { id: 9, title: "EPS fixture", limit: Duration::from_secs(60), run: criterion_9 },
];

fn main() {
    let mut failed = 0;
    let mut first = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match &result {
            Ok(_) if elapsed <= c.limit => "PASS".to_string(),
            Ok(_) => format!("FAIL (limit {:?})", c.limit),
            Err(e) => format!("FAIL: {e}"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {:2} {} {} [{:.3}s]", c.id, verdict, c.title, elapsed.as_secs_f64());
        first.push(result.ok());
    }

    let start = Instant::now();
    let differing: Vec<usize> = CRITERIA
        .iter()
        .zip(&first)
        .filter(|(c, before)| (c.run)().ok() != **before)
        .map(|(c, _)| c.id)
        .collect();
    let verdict = if differing.is_empty() {
        "PASS".to_string()
    } else {
        failed += 1;
        format!("FAIL: criteria {differing:?} changed between runs")
    };
    println!(
        "criterion 10 {verdict} determinism of criteria 1-9 [{:.3}s]",
        start.elapsed().as_secs_f64()
    );

    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
