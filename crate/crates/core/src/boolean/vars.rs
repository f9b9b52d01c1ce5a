use std::fmt;

use indexmap::IndexSet;

use super::BoolError;

/// A named Boolean variable. Names follow `[A-Za-z_][A-Za-z0-9_]*` and may
/// not collide with the expression keywords `true` and `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self, BoolError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Variable(name))
        } else {
            Err(BoolError::InvalidName(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && s != "true" && s != "false"
}

/// An ordered set of variables. The order fixes the bit layout of every
/// valuation and truth table defined over the set.
#[derive(Debug, Clone, Default)]
pub struct VariableSet {
    vars: IndexSet<Variable>,
}

impl VariableSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from variables, rejecting duplicates.
    pub fn from_vars<I: IntoIterator<Item = Variable>>(vars: I) -> Result<Self, BoolError> {
        let mut set = IndexSet::new();
        for v in vars {
            if !set.insert(v.clone()) {
                return Err(BoolError::DuplicateVariable(v.0));
            }
        }
        Ok(VariableSet { vars: set })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, BoolError> {
        let vars = names
            .iter()
            .map(|n| Variable::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_vars(vars)
    }

    /// Appends `var` unless already present; returns whether it was inserted.
    pub fn insert(&mut self, var: Variable) -> bool {
        self.vars.insert(var)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Variable> + '_ {
        self.vars.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.0.clone()).collect()
    }

    pub fn get(&self, index: usize) -> Option<&Variable> {
        self.vars.get_index(index)
    }

    pub fn contains(&self, var: &Variable) -> bool {
        self.vars.contains(var)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.0 == name)
    }

    pub fn position(&self, var: &Variable) -> Option<usize> {
        self.vars.get_index_of(var)
    }

    pub fn position_of_name(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.0 == name)
    }

    /// `self` followed by the members of `other` not already in `self`.
    pub fn union(&self, other: &VariableSet) -> VariableSet {
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().cloned());
        VariableSet { vars }
    }

    /// Members of `self` that are also in `other`, in `self`'s order.
    pub fn intersection(&self, other: &VariableSet) -> VariableSet {
        VariableSet {
            vars: self.vars.iter().filter(|v| other.contains(v)).cloned().collect(),
        }
    }

    /// Members of `self` not in `other`, in `self`'s order.
    pub fn difference(&self, other: &VariableSet) -> VariableSet {
        VariableSet {
            vars: self.vars.iter().filter(|v| !other.contains(v)).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &VariableSet) -> bool {
        self.vars.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VariableSet) -> bool {
        self.vars.iter().all(|v| !other.contains(v))
    }

    /// Same members, ignoring order.
    pub fn same_members(&self, other: &VariableSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    /// Number of valuations, `2^len`.
    pub fn valuation_count(&self) -> usize {
        1usize << self.len()
    }
}

/// Equality is ordered: two scopes are identical only if they list the same
/// variables in the same order.
impl PartialEq for VariableSet {
    fn eq(&self, other: &Self) -> bool {
        self.vars.len() == other.vars.len() && self.vars.iter().eq(other.vars.iter())
    }
}

impl Eq for VariableSet {}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&v.0)?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a VariableSet {
    type Item = &'a Variable;
    type IntoIter = indexmap::set::Iter<'a, Variable>;

    fn into_iter(self) -> Self::IntoIter {
        self.vars.iter()
    }
}

/// An assignment of one Boolean to every variable of a scope.
///
/// Valuations over a scope are numbered by reading the bits in scope order as
/// a binary number, first variable most significant. Numeric order is
/// therefore lexicographic order with `false < true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    scope: VariableSet,
    bits: Vec<bool>,
}

impl Valuation {
    pub fn new(scope: VariableSet, bits: Vec<bool>) -> Result<Self, BoolError> {
        if bits.len() != scope.len() {
            return Err(BoolError::ValuationLength {
                expected: scope.len(),
                found: bits.len(),
            });
        }
        Ok(Valuation { scope, bits })
    }

    pub fn from_index(scope: &VariableSet, index: usize) -> Self {
        let n = scope.len();
        let bits = (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect();
        Valuation {
            scope: scope.clone(),
            bits,
        }
    }

    /// Builds a valuation over `scope` from name/value pairs; every scope
    /// variable must be assigned.
    pub fn from_assignment<'a, I>(scope: &VariableSet, pairs: I) -> Result<Self, BoolError>
    where
        I: IntoIterator<Item = (&'a str, bool)>,
    {
        let mut bits = vec![None; scope.len()];
        for (name, value) in pairs {
            let pos = scope
                .position_of_name(name)
                .ok_or_else(|| BoolError::UnknownVariable(name.to_string()))?;
            bits[pos] = Some(value);
        }
        let bits = bits
            .into_iter()
            .enumerate()
            .map(|(k, b)| b.ok_or_else(|| BoolError::UnknownVariable(scope.get(k).unwrap().0.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Valuation {
            scope: scope.clone(),
            bits,
        })
    }

    pub fn scope(&self) -> &VariableSet {
        &self.scope
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn get(&self, var: &Variable) -> Option<bool> {
        self.scope.position(var).map(|p| self.bits[p])
    }

    pub fn get_name(&self, name: &str) -> Option<bool> {
        self.scope.position_of_name(name).map(|p| self.bits[p])
    }

    /// Bits as a `0`/`1` string in scope order.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, b)) in self.scope.iter().zip(&self.bits).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={}", v, if *b { 'T' } else { 'F' })?;
        }
        Ok(())
    }
}
