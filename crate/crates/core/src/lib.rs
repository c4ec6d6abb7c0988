//! Bottom-up tree automata built from regular tree expressions through their
//! Root and Father position functions.

pub mod automaton;
pub mod compressed;
pub mod constructions;
pub mod error;
pub mod export;
pub mod oracle;
pub mod expr;
mod iso;
pub mod positions;
mod syntax;
pub mod trees;

pub use automaton::{StateId, StatePartition, StateSet, TreeAutomaton};
pub use compressed::CompressedTreeAutomaton;
pub use constructions::{Built, ConstructionKind};
pub use error::{Error, Result};
pub use expr::{linearize, validate, Expr, LinearExpr, Violation};
pub use positions::PositionTable;
pub use trees::{FatherPair, RankedAlphabet, Symbol, Tree};
