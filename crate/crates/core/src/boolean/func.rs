use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{BoolError, Valuation, Variable, VariableSet};

/// Largest scope a truth table may span.
pub const MAX_VARS: usize = 26;

/// Logical connectives accepted by [`BoolFunc::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

/// A Boolean function over an ordered scope, stored as its satisfying set.
///
/// Bit `i` of the table is set iff the valuation with index `i` (see
/// [`Valuation`]) satisfies the function. Functions over identical scopes are
/// equal iff their tables are equal; [`BoolFunc::equivalent`] compares across
/// differing scopes by cylindrical extension.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolFunc {
    scope: VariableSet,
    table: FixedBitSet,
}

fn check_width(n: usize) {
    assert!(
        n <= MAX_VARS,
        "scope of {n} variables exceeds the {MAX_VARS}-variable truth-table limit"
    );
}

/// Moves bits of `index` (over a scope of `n_from` variables) into a new index
/// whose `k`-th variable sits at position `positions[k]` of the source scope.
#[inline]
pub(crate) fn gather(index: usize, n_from: usize, positions: &[usize]) -> usize {
    let n_out = positions.len();
    let mut out = 0usize;
    for (k, &p) in positions.iter().enumerate() {
        let bit = (index >> (n_from - 1 - p)) & 1;
        out |= bit << (n_out - 1 - k);
    }
    out
}

impl BoolFunc {
    pub fn constant(scope: &VariableSet, value: bool) -> Self {
        check_width(scope.len());
        let n = scope.valuation_count();
        let mut table = FixedBitSet::with_capacity(n);
        if value {
            table.insert_range(..);
        }
        BoolFunc {
            scope: scope.clone(),
            table,
        }
    }

    pub fn tautology() -> Self {
        Self::constant(&VariableSet::new(), true)
    }

    pub fn contradiction() -> Self {
        Self::constant(&VariableSet::new(), false)
    }

    /// The literal `var` over `scope`.
    pub fn literal(scope: &VariableSet, var: &Variable) -> Result<Self, BoolError> {
        let p = scope
            .position(var)
            .ok_or_else(|| BoolError::UnknownVariable(var.name().to_string()))?;
        let shift = scope.len() - 1 - p;
        Ok(Self::from_index_fn(scope, |i| (i >> shift) & 1 == 1))
    }

    /// The literal over the single-variable scope `{name}`.
    pub fn var(name: &str) -> Result<Self, BoolError> {
        let v = Variable::new(name)?;
        let scope = VariableSet::from_vars([v.clone()])?;
        Self::literal(&scope, &v)
    }

    /// Tabulates `f` over all valuation indices of `scope`.
    pub fn from_index_fn(scope: &VariableSet, mut f: impl FnMut(usize) -> bool) -> Self {
        check_width(scope.len());
        let n = scope.valuation_count();
        let mut table = FixedBitSet::with_capacity(n);
        for i in 0..n {
            if f(i) {
                table.insert(i);
            }
        }
        BoolFunc {
            scope: scope.clone(),
            table,
        }
    }

    /// Tabulates `f` over all valuations of `scope`, bits in scope order.
    pub fn from_fn(scope: &VariableSet, mut f: impl FnMut(&[bool]) -> bool) -> Self {
        let n = scope.len();
        let mut bits = vec![false; n];
        Self::from_index_fn(scope, |i| {
            for (k, b) in bits.iter_mut().enumerate() {
                *b = (i >> (n - 1 - k)) & 1 == 1;
            }
            f(&bits)
        })
    }

    /// Builds the function whose satisfying set is exactly `indices`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(scope: &VariableSet, indices: I) -> Self {
        let mut f = Self::constant(scope, false);
        let n = scope.valuation_count();
        for i in indices {
            assert!(i < n, "valuation index {i} out of range for {scope}");
            f.table.insert(i);
        }
        f
    }

    pub fn scope(&self) -> &VariableSet {
        &self.scope
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    #[inline]
    pub fn eval_index(&self, index: usize) -> bool {
        self.table.contains(index)
    }

    /// Evaluates on a valuation whose scope covers this function's scope.
    pub fn eval(&self, valuation: &Valuation) -> Result<bool, BoolError> {
        let positions = self.positions_in(valuation.scope())?;
        Ok(self.eval_index(gather(valuation.index(), valuation.scope().len(), &positions)))
    }

    /// Evaluates with variable values supplied by `lookup`.
    pub fn eval_with(&self, mut lookup: impl FnMut(&Variable) -> bool) -> bool {
        let idx = self
            .scope
            .iter()
            .fold(0usize, |acc, v| (acc << 1) | lookup(v) as usize);
        self.eval_index(idx)
    }

    /// Position in `outer` of each variable of this function's scope.
    pub(crate) fn positions_in(&self, outer: &VariableSet) -> Result<Vec<usize>, BoolError> {
        self.scope
            .iter()
            .map(|v| {
                outer
                    .position(v)
                    .ok_or_else(|| BoolError::UnknownVariable(v.name().to_string()))
            })
            .collect()
    }

    pub fn count(&self) -> usize {
        self.table.count_ones(..)
    }

    /// Valid (true on every valuation).
    pub fn is_true(&self) -> bool {
        self.count() == self.scope.valuation_count()
    }

    /// Unsatisfiable.
    pub fn is_false(&self) -> bool {
        self.table.is_clear()
    }

    pub fn satisfying_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.table.ones()
    }

    /// The satisfying set in lexicographic order.
    pub fn satisfying_valuations(&self) -> Vec<Valuation> {
        self.table
            .ones()
            .map(|i| Valuation::from_index(&self.scope, i))
            .collect()
    }

    /// Cylindrical extension onto `target`, which must contain this scope.
    pub fn extend_to(&self, target: &VariableSet) -> Result<BoolFunc, BoolError> {
        if *target == self.scope {
            return Ok(self.clone());
        }
        let positions = self.positions_in(target)?;
        let n_t = target.len();
        Ok(Self::from_index_fn(target, |i| {
            self.table.contains(gather(i, n_t, &positions))
        }))
    }

    fn aligned(&self, other: &BoolFunc) -> (VariableSet, FixedBitSet, FixedBitSet) {
        let scope = self.scope.union(&other.scope);
        check_width(scope.len());
        let a = self.extend_to(&scope).expect("union covers operand");
        let b = other.extend_to(&scope).expect("union covers operand");
        (scope, a.table, b.table)
    }

    pub fn not(&self) -> BoolFunc {
        let mut table = self.table.clone();
        table.toggle_range(..);
        BoolFunc {
            scope: self.scope.clone(),
            table,
        }
    }

    pub fn and(&self, other: &BoolFunc) -> BoolFunc {
        let (scope, a, b) = self.aligned(other);
        BoolFunc { scope, table: &a & &b }
    }

    pub fn or(&self, other: &BoolFunc) -> BoolFunc {
        let (scope, a, b) = self.aligned(other);
        BoolFunc { scope, table: &a | &b }
    }

    pub fn xor(&self, other: &BoolFunc) -> BoolFunc {
        let (scope, a, b) = self.aligned(other);
        BoolFunc { scope, table: &a ^ &b }
    }

    pub fn implies(&self, other: &BoolFunc) -> BoolFunc {
        self.not().or(other)
    }

    pub fn iff(&self, other: &BoolFunc) -> BoolFunc {
        self.xor(other).not()
    }

    /// Applies a connective. `Not` takes one operand; `Implies` and `Iff`
    /// exactly two; `And`, `Or` and `Xor` fold over two or more.
    pub fn apply(op: Op, operands: &[&BoolFunc]) -> Result<BoolFunc, BoolError> {
        let arity_err = |expected: &'static str| BoolError::Arity {
            op,
            expected,
            found: operands.len(),
        };
        match op {
            Op::Not => match operands {
                [f] => Ok(f.not()),
                _ => Err(arity_err("1")),
            },
            Op::Implies | Op::Iff => match operands {
                [a, b] if op == Op::Implies => Ok(a.implies(b)),
                [a, b] => Ok(a.iff(b)),
                _ => Err(arity_err("2")),
            },
            Op::And | Op::Or | Op::Xor => {
                let (first, rest) = match operands {
                    [first, rest @ ..] if !rest.is_empty() => (first, rest),
                    _ => return Err(arity_err("at least 2")),
                };
                Ok(rest.iter().fold((*first).clone(), |acc, f| match op {
                    Op::And => acc.and(f),
                    Op::Or => acc.or(f),
                    _ => acc.xor(f),
                }))
            }
        }
    }

    /// Semantic equality after extending both functions to the union scope.
    pub fn equivalent(&self, other: &BoolFunc) -> bool {
        let (_, a, b) = self.aligned(other);
        a == b
    }

    /// `⟦self⟧ ⊆ ⟦other⟧` after scope alignment.
    pub fn entails(&self, other: &BoolFunc) -> bool {
        let (_, a, b) = self.aligned(other);
        a.is_subset(&b)
    }

    /// Existential projection onto `keep`, a subset of this scope.
    ///
    /// The result is scoped exactly over `keep` (in `keep`'s order) and holds
    /// on `x` iff some assignment to the dropped variables completes `x` to a
    /// satisfying valuation.
    pub fn project(&self, keep: &VariableSet) -> Result<BoolFunc, BoolError> {
        let positions = keep
            .iter()
            .map(|v| {
                self.scope
                    .position(v)
                    .ok_or_else(|| BoolError::UnknownVariable(v.name().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = self.scope.len();
        let mut out = BoolFunc::constant(keep, false);
        for i in self.table.ones() {
            out.table.insert(gather(i, n, &positions));
        }
        Ok(out)
    }

    /// Existentially quantifies away `vars` (ignoring names not in scope).
    pub fn exists(&self, vars: &VariableSet) -> BoolFunc {
        self.project(&self.scope.difference(vars))
            .expect("difference is a subset of scope")
    }

    /// Universally quantifies away `vars` (ignoring names not in scope).
    pub fn forall(&self, vars: &VariableSet) -> BoolFunc {
        self.not().exists(vars).not()
    }

    /// Fixes the variables of `assignment` that occur in scope and drops them.
    pub fn restrict(&self, assignment: &Valuation) -> BoolFunc {
        let fixed: Vec<(usize, bool)> = assignment
            .scope()
            .iter()
            .zip(assignment.bits())
            .filter_map(|(v, &b)| self.scope.position(v).map(|p| (p, b)))
            .collect();
        let n = self.scope.len();
        let remaining = VariableSet::from_vars(
            self.scope
                .iter()
                .enumerate()
                .filter(|(p, _)| !fixed.iter().any(|(q, _)| q == p))
                .map(|(_, v)| v.clone()),
        )
        .expect("subset of a valid scope");
        let free: Vec<usize> = (0..n).filter(|p| !fixed.iter().any(|(q, _)| q == p)).collect();
        let m = free.len();
        let mut base = 0usize;
        for &(p, b) in &fixed {
            base |= (b as usize) << (n - 1 - p);
        }
        Self::from_index_fn(&remaining, |j| {
            let mut idx = base;
            for (k, &p) in free.iter().enumerate() {
                idx |= ((j >> (m - 1 - k)) & 1) << (n - 1 - p);
            }
            self.table.contains(idx)
        })
    }

    /// Relabels variables. The mapping must be injective on the scope and
    /// may not map onto a name that stays in scope under another variable.
    /// Entries for names outside the scope are ignored.
    pub fn rename(&self, mapping: &BTreeMap<Variable, Variable>) -> Result<BoolFunc, BoolError> {
        let mut scope = VariableSet::new();
        for v in self.scope.iter() {
            let target = mapping.get(v).unwrap_or(v).clone();
            if !scope.insert(target.clone()) {
                return Err(BoolError::RenameCollision(target.name().to_string()));
            }
        }
        Ok(BoolFunc {
            scope,
            table: self.table.clone(),
        })
    }

    /// Like [`BoolFunc::rename`], but several variables may map to the same
    /// target; the result is then the restriction to valuations in which the
    /// merged variables agree.
    pub fn substitute(&self, mapping: &BTreeMap<Variable, Variable>) -> BoolFunc {
        let mut scope = VariableSet::new();
        for v in self.scope.iter() {
            scope.insert(mapping.get(v).unwrap_or(v).clone());
        }
        let positions: Vec<usize> = self
            .scope
            .iter()
            .map(|v| scope.position(mapping.get(v).unwrap_or(v)).unwrap())
            .collect();
        let n_t = scope.len();
        let n_s = self.scope.len();
        Self::from_index_fn(&scope, |j| {
            let mut idx = 0usize;
            for (k, &p) in positions.iter().enumerate() {
                idx |= ((j >> (n_t - 1 - p)) & 1) << (n_s - 1 - k);
            }
            self.table.contains(idx)
        })
    }

    /// Variables the function actually depends on, in scope order.
    pub fn support(&self) -> VariableSet {
        let n = self.scope.len();
        let vars = self.scope.iter().enumerate().filter(|(p, _)| {
            let bit = 1usize << (n - 1 - p);
            (0..self.scope.valuation_count())
                .filter(|i| i & bit == 0)
                .any(|i| self.table.contains(i) != self.table.contains(i | bit))
        });
        VariableSet::from_vars(vars.map(|(_, v)| v.clone())).expect("subset of a valid scope")
    }

    /// A disjunctive-normal-form expression in the text grammar accepted by
    /// [`super::parse_expr`].
    pub fn to_expr(&self) -> String {
        super::print::to_expr(self)
    }
}

impl fmt::Debug for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFunc({} over {})", self.to_expr(), self.scope)
    }
}

impl fmt::Display for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}
