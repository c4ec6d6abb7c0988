use thiserror::Error;

use crate::expr::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `offset` is the 1-based character column where parsing stopped.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("symbol `{symbol}` has arity {expected} but was given {found} argument(s)")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("symbol `{name}` is used with arities {first} and {second}")]
    InconsistentArity {
        name: String,
        first: usize,
        second: usize,
    },

    #[error("symbol `{symbol}` must be nullary")]
    NotNullary { symbol: String },

    #[error("unknown symbol `{symbol}`")]
    UnknownSymbol { symbol: String },

    #[error("label `{label}` matches more than one symbol")]
    AmbiguousLabel { label: String },

    #[error("`{symbol}` is not a position of the expression")]
    UnknownPosition { symbol: String },

    #[error("`$` is reserved for root augmentation")]
    ReservedSymbol,

    #[error("invalid expression: {}", join_violations(.0))]
    InvalidExpression(Vec<Violation>),

    #[error("expression is not linear: `{symbol}` occurs more than once")]
    NonLinear { symbol: String },

    #[error("unknown state `{state}`")]
    UnknownState { state: String },

    #[error("duplicate state `{state}`")]
    DuplicateState { state: String },

    #[error("automaton is not deterministic")]
    NonDeterministic,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition is not a bottom-up congruence: {0}")]
    NotCongruence(String),

    #[error("morphism maps `{from}` (arity {from_arity}) to `{to}` (arity {to_arity})")]
    NotArityPreserving {
        from: String,
        from_arity: usize,
        to: String,
        to_arity: usize,
    },

    #[error("morphism is undefined on `{symbol}`")]
    PartialMorphism { symbol: String },

    #[error("star enumeration did not reach a fixpoint within {cap} iterations")]
    StarCapExceeded { cap: usize },

    #[error("alphabet has no nullary symbol")]
    NoNullarySymbol,

    #[error("invalid bound: {0}")]
    InvalidBound(String),

    #[error("malformed automaton description: {0}")]
    Malformed(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
