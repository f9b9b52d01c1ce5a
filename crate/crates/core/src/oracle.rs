//! Exhaustive reference procedures for small instances.

use crate::boolean::{BoolFunc, Valuation};
use crate::contract::{ContractError, ContractPair};
use crate::distribution::{Biclique, DistributionGraph};
use crate::network::{BooleanNetwork, Controller, NetworkError, NetworkEval};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("controller tables need {needed} bits, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("graph with {left} x {right} nodes is too large for subset enumeration")]
    GraphTooLarge { left: usize, right: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Contract(#[from] ContractError),
}

/// Limit on `Σ_i |U_i| · 2^|E_i|`, the number of bits in all controller
/// tables together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_total_controller_bits: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_total_controller_bits: 24,
        }
    }
}

pub fn controller_bits(net: &BooleanNetwork) -> usize {
    net.subsystems()
        .iter()
        .map(|s| s.controls().len() << s.env_inputs().len().min(usize::BITS as usize - 1))
        .sum()
}

struct Checker {
    plan: NetworkEval,
    a: BoolFunc,
    g: BoolFunc,
}

impl Checker {
    fn new(net: &BooleanNetwork, c: &ContractPair) -> Result<Self, OracleError> {
        let plan = NetworkEval::new(net)?;
        c.check_scopes(net)?;
        let a = c.assumption.extend_to(&plan.ext_scope).expect("checked scope");
        let g = c.guarantee.extend_to(&plan.out_scope).expect("checked scope");
        Ok(Checker { plan, a, g })
    }

    fn admissible(&self) -> Vec<usize> {
        self.a.satisfying_indices().collect()
    }

    /// Whether some completion of the partial `tables` meets the guarantee on
    /// external valuation `x`. Only entries the run actually reads are
    /// branched on.
    fn completable(&self, tables: &[Vec<Option<usize>>], x: usize, pos: usize, ys: &mut [usize]) -> bool {
        let order = self.plan.order();
        if pos == order.len() {
            return self.g.eval_index(self.plan.global_output_index(ys));
        }
        let i = order[pos];
        let e = self.plan.env_index(i, x, ys);
        let sys = self.plan.system(i);
        let choices = match tables[i][e] {
            Some(u) => u..u + 1,
            None => 0..1 << sys.n_controls,
        };
        for u in choices {
            ys[i] = sys.outputs(u, e);
            if self.completable(tables, x, pos + 1, ys) {
                return true;
            }
        }
        false
    }
}

/// Searches every tuple of controller tables for one whose closed loop
/// satisfies the contract. Tables are filled subsystem by subsystem, row by
/// row, trying control valuations in increasing order, so the first tuple
/// found is the lexicographically least.
pub fn brute_force_distributed(
    net: &BooleanNetwork,
    c: &ContractPair,
    budget: OracleBudget,
) -> Result<Option<Vec<Controller>>, OracleError> {
    let needed = controller_bits(net);
    if needed > budget.max_total_controller_bits {
        return Err(OracleError::BudgetExceeded {
            needed,
            budget: budget.max_total_controller_bits,
        });
    }
    let checker = Checker::new(net, c)?;
    let admissible = checker.admissible();

    let mut tables: Vec<Vec<Option<usize>>> = net
        .subsystems()
        .iter()
        .map(|s| {
            let fixed = if s.controls().is_empty() { Some(0) } else { None };
            vec![fixed; s.env_inputs().valuation_count()]
        })
        .collect();
    let slots: Vec<(usize, usize)> = tables
        .iter()
        .enumerate()
        .flat_map(|(i, t)| (0..t.len()).filter(move |_| !net.subsystems()[i].controls().is_empty()).map(move |e| (i, e)))
        .collect();

    let mut ys = vec![0; net.subsystems().len()];
    let consistent = |tables: &[Vec<Option<usize>>], ys: &mut [usize]| {
        admissible.iter().all(|&x| checker.completable(tables, x, 0, ys))
    };
    if !consistent(&tables, &mut ys) {
        return Ok(None);
    }

    // iterative depth-first search over `slots`
    let mut depth = 0;
    let mut next_value = vec![0usize; slots.len()];
    loop {
        if depth == slots.len() {
            break;
        }
        let (i, e) = slots[depth];
        let width = 1usize << net.subsystems()[i].controls().len();
        let mut advanced = false;
        while next_value[depth] < width {
            let u = next_value[depth];
            next_value[depth] += 1;
            tables[i][e] = Some(u);
            if consistent(&tables, &mut ys) {
                advanced = true;
                break;
            }
        }
        if advanced {
            depth += 1;
            if depth < slots.len() {
                next_value[depth] = 0;
            }
        } else {
            tables[i][e] = None;
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }

    let controllers = net
        .subsystems()
        .iter()
        .zip(tables)
        .map(|(s, t)| Controller::from_fn(s, |e| t[e].expect("all slots filled")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(controllers))
}

/// Outcome of checking a closed loop against a contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    /// The least external valuation violating the contract.
    pub counterexample: Option<Valuation>,
}

/// Checks `A → G` on every external valuation of the closed loop.
pub fn verify_closed_loop(
    net: &BooleanNetwork,
    controllers: &[Controller],
    c: &ContractPair,
) -> Result<Verification, OracleError> {
    let checker = Checker::new(net, c)?;
    let tables = net.match_controllers(controllers)?;
    for x in checker.admissible() {
        let ys = checker
            .plan
            .run(x, |i, e| Some(tables[i].control_index(e)))
            .expect("total controllers");
        if !checker.g.eval_index(checker.plan.global_output_index(&ys)) {
            return Ok(Verification {
                holds: false,
                counterexample: Some(Valuation::from_index(&checker.plan.ext_scope, x)),
            });
        }
    }
    Ok(Verification {
        holds: true,
        counterexample: None,
    })
}

/// Maximal bicliques with both sides nonempty, found by closing every
/// subset of the smaller side. Canonical order.
pub fn enumerate_bicliques_subset(g: &DistributionGraph) -> Result<Vec<Biclique>, OracleError> {
    let (nl, nr) = (g.left_count(), g.right_count());
    if nl * nr > 1024 || nl.min(nr) > 16 {
        return Err(OracleError::GraphTooLarge { left: nl, right: nr });
    }
    let left_side = nl <= nr;
    let (small, large) = if left_side { (nl, nr) } else { (nr, nl) };
    let adj = |s: usize, t: usize| if left_side { g.has_edge(s, t) } else { g.has_edge(t, s) };

    let mut out = Vec::new();
    for mask in 1usize..1 << small {
        let side: Vec<usize> = (0..small).filter(|s| mask >> s & 1 == 1).collect();
        let common: Vec<usize> = (0..large).filter(|&t| side.iter().all(|&s| adj(s, t))).collect();
        if common.is_empty() {
            continue;
        }
        let closure: Vec<usize> = (0..small).filter(|&s| common.iter().all(|&t| adj(s, t))).collect();
        if closure != side {
            continue;
        }
        out.push(if left_side {
            Biclique { left: side, right: common }
        } else {
            Biclique { left: common, right: side }
        });
    }
    out.sort_by(Biclique::canonical_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::VariableSet;
    use crate::io::{parse_contract, parse_network};

    fn example(net: &str, ctr: &str) -> (BooleanNetwork, ContractPair) {
        let net = parse_network(net).unwrap();
        let c = parse_contract(ctr, &net).unwrap();
        (net, c)
    }

    fn example1() -> (BooleanNetwork, ContractPair) {
        example(
            include_str!("../fixtures/example1.net.json"),
            include_str!("../fixtures/example1.ctr.json"),
        )
    }

    fn example2() -> (BooleanNetwork, ContractPair) {
        example(
            include_str!("../fixtures/example2.net.json"),
            include_str!("../fixtures/example2.ctr.json"),
        )
    }

    #[test]
    fn brute_force_examples() {
        let (net, c) = example1();
        let found = brute_force_distributed(&net, &c, OracleBudget::default()).unwrap().unwrap();
        assert!(verify_closed_loop(&net, &found, &c).unwrap().holds);

        let (net, c) = example2();
        let found = brute_force_distributed(&net, &c, OracleBudget::default()).unwrap().unwrap();
        assert!(verify_closed_loop(&net, &found, &c).unwrap().holds);

        let never = ContractPair::new(BoolFunc::tautology(), BoolFunc::var("y2").unwrap().and(&BoolFunc::var("y2").unwrap().not()));
        assert_eq!(brute_force_distributed(&net, &never, OracleBudget::default()).unwrap(), None);

        let tiny = OracleBudget { max_total_controller_bits: 3 };
        assert!(matches!(
            brute_force_distributed(&net, &c, tiny),
            Err(OracleError::BudgetExceeded { needed: 6, budget: 3 })
        ));
    }

    #[test]
    fn first_solution_is_least() {
        // with G = True every tuple works; the least is all zeros
        let (net, _) = example1();
        let c = ContractPair::trivial();
        let found = brute_force_distributed(&net, &c, OracleBudget::default()).unwrap().unwrap();
        assert!(found.iter().all(|k| k.table().iter().all(|&u| u == 0)));
    }

    #[test]
    fn verification_examples() {
        let (net, c) = example1();
        let on: Vec<Controller> = net.subsystems().iter().map(|s| Controller::constant(s, 1).unwrap()).collect();
        assert!(verify_closed_loop(&net, &on, &c).unwrap().holds);

        let mixed = vec![
            Controller::constant(&net.subsystems()[0], 0).unwrap(),
            Controller::constant(&net.subsystems()[1], 1).unwrap(),
        ];
        let v = verify_closed_loop(&net, &mixed, &c).unwrap();
        assert!(!v.holds);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.get_name("e1"), Some(true));
        assert_eq!(cex.get_name("e2"), Some(false));

        assert!(verify_closed_loop(&net, &mixed, &ContractPair::trivial()).unwrap().holds);
    }

    #[test]
    fn subset_bicliques() {
        let vs = |n: &[&str]| VariableSet::from_names(n).unwrap();
        let g = crate::boolean::parse_expr("y1 | y2", &vs(&["y1", "y2"])).unwrap();
        let h = DistributionGraph::new(&g, &vs(&["y2"]));
        assert_eq!(enumerate_bicliques_subset(&h).unwrap().len(), 2);

        let full = DistributionGraph::new(&BoolFunc::tautology(), &vs(&["a", "b"]));
        let all = enumerate_bicliques_subset(&full).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].left.len(), 4);

        let empty = DistributionGraph::from_adjacency(vs(&["a"]), vs(&["b"]), &[]);
        assert!(enumerate_bicliques_subset(&empty).unwrap().is_empty());

        let big = DistributionGraph::from_adjacency(vs(&["a", "b", "c", "d", "e", "f"]), vs(&["g", "h", "i", "j", "k"]), &[]);
        assert!(matches!(enumerate_bicliques_subset(&big), Err(OracleError::GraphTooLarge { .. })));
    }
}
