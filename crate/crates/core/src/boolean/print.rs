use super::BoolFunc;

/// Support sizes above this are printed as minterm sums instead of a
/// prime-implicant cover.
const MINIMIZE_LIMIT: usize = 10;

/// A cube over `n` support variables: `mask` marks the fixed positions and
/// `value` their polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cube {
    mask: u32,
    value: u32,
}

impl Cube {
    fn covers(&self, minterm: u32) -> bool {
        minterm & self.mask == self.value
    }
}

pub(super) fn to_expr(f: &BoolFunc) -> String {
    if f.is_false() {
        return "false".into();
    }
    if f.is_true() {
        return "true".into();
    }
    let support = f.support();
    let reduced = f.project(&support).expect("support is a subset of scope");
    let n = support.len();
    let minterms: Vec<u32> = reduced.satisfying_indices().map(|i| i as u32).collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    let cover = if n <= MINIMIZE_LIMIT {
        greedy_cover(&prime_implicants(&minterms, full), &minterms)
    } else {
        minterms.iter().map(|&m| Cube { mask: full, value: m }).collect()
    };

    let names = support.names();
    let terms: Vec<String> = cover
        .iter()
        .map(|c| {
            let lits: Vec<String> = (0..n)
                .filter(|k| c.mask >> (n - 1 - k) & 1 == 1)
                .map(|k| {
                    if c.value >> (n - 1 - k) & 1 == 1 {
                        names[k].clone()
                    } else {
                        format!("!{}", names[k])
                    }
                })
                .collect();
            lits.join(" & ")
        })
        .collect();
    terms.join(" | ")
}

fn prime_implicants(minterms: &[u32], full: u32) -> Vec<Cube> {
    let mut current: Vec<Cube> = minterms.iter().map(|&m| Cube { mask: full, value: m }).collect();
    let mut primes = Vec::new();
    while !current.is_empty() {
        let mut merged = vec![false; current.len()];
        let mut next = Vec::new();
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                let (a, b) = (current[i], current[j]);
                if a.mask != b.mask {
                    continue;
                }
                let diff = a.value ^ b.value;
                if diff.count_ones() == 1 {
                    merged[i] = true;
                    merged[j] = true;
                    next.push(Cube {
                        mask: a.mask & !diff,
                        value: a.value & !diff,
                    });
                }
            }
        }
        for (c, m) in current.iter().zip(&merged) {
            if !m {
                primes.push(*c);
            }
        }
        next.sort();
        next.dedup();
        current = next;
    }
    primes.sort_by_key(|c| (std::cmp::Reverse(full.count_ones() - c.mask.count_ones()), *c));
    primes
}

fn greedy_cover(primes: &[Cube], minterms: &[u32]) -> Vec<Cube> {
    let mut uncovered: Vec<u32> = minterms.to_vec();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .max_by_key(|p| {
                let gain = uncovered.iter().filter(|&&m| p.covers(m)).count();
                // max_by_key keeps the last maximum; reverse the index to prefer the first
                (gain, std::cmp::Reverse(primes.iter().position(|q| q == *p)))
            })
            .copied()
            .expect("primes cover every minterm");
        uncovered.retain(|&m| !best.covers(m));
        chosen.push(best);
    }
    chosen.sort_by(|a, b| b.value.cmp(&a.value).then(b.mask.cmp(&a.mask)));
    chosen
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, VariableSet};

    #[test]
    fn compact_forms() {
        let s = VariableSet::from_names(&["y1", "y2", "y3"]).unwrap();
        let p = |t: &str| parse_expr(t, &s).unwrap().to_expr();
        assert_eq!(p("y1"), "y1");
        assert_eq!(p("!y2"), "!y2");
        assert_eq!(p("y1 | y2"), "y1 | y2");
        assert_eq!(p("y1 & y3 | y1 & !y3"), "y1");
        assert_eq!(p("true"), "true");
        assert_eq!(p("y1 & !y1"), "false");
    }
}
