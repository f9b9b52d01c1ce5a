//! Boolean functions over named variables in explicit truth-table form.

mod expr;
mod func;
mod print;
mod vars;

pub use expr::{parse_expr, Expr};
pub use func::{BoolFunc, Op, MAX_VARS};
pub use vars::{Valuation, Variable, VariableSet};

pub(crate) use func::gather;
pub(crate) use vars::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoolError {
    #[error("invalid variable name '{0}'")]
    InvalidName(String),
    #[error("duplicate variable '{0}'")]
    DuplicateVariable(String),
    #[error("variable '{0}' is not in scope")]
    UnknownVariable(String),
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("valuation has {found} bits, scope has {expected} variables")]
    ValuationLength { expected: usize, found: usize },
    #[error("{op:?} expects {expected} operand(s), got {found}")]
    Arity {
        op: Op,
        expected: &'static str,
        found: usize,
    },
    #[error("renaming maps two variables onto '{0}'")]
    RenameCollision(String),
}
