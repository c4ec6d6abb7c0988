//! Position, Father and compressed automata of an expression.
//!
//! Linear builders work on a [`LinearExpr`] and read its positions straight
//! from a [`PositionTable`]; general builders linearize first and map the
//! result back through the delinearizer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::automaton::{StatePartition, StateSet, TreeAutomaton};
use crate::compressed::CompressedTreeAutomaton;
use crate::error::{Error, Result};
use crate::export;
use crate::expr::{linearize, Expr, LinearExpr};
use crate::positions::{FatherSet, PositionTable};
use crate::trees::{cartesian, FatherPair, Symbol, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructionKind {
    Position,
    Father,
    CompressedPosition,
    CompressedFather,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 4] = [
        ConstructionKind::Position,
        ConstructionKind::Father,
        ConstructionKind::CompressedPosition,
        ConstructionKind::CompressedFather,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Position => "position",
            ConstructionKind::Father => "father",
            ConstructionKind::CompressedPosition => "cposition",
            ConstructionKind::CompressedFather => "cfather",
        }
    }

    pub fn is_compressed(self) -> bool {
        matches!(self, ConstructionKind::CompressedPosition | ConstructionKind::CompressedFather)
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ConstructionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown construction `{s}` (expected position, father, cposition or cfather)"))
    }
}

fn labels<'a>(symbols: impl IntoIterator<Item = &'a Symbol>) -> Vec<String> {
    symbols.into_iter().map(Symbol::label).collect()
}

/// Positions `g` with `(f,i)` in the Father set of `g`, for each slot `i` of `f`.
fn slot_sources(table: &PositionTable, f: &Symbol) -> Vec<Vec<Symbol>> {
    (1..=f.arity())
        .map(|i| {
            let pair = FatherPair::new(f.clone(), i);
            table
                .father_sets()
                .filter(|(_, set)| set.contains(&pair))
                .map(|(g, _)| g.clone())
                .collect()
        })
        .collect()
}

pub fn position_automaton(e: &LinearExpr) -> TreeAutomaton {
    position_automaton_from_table(e, &PositionTable::new(e))
}

pub fn position_automaton_from_table(e: &LinearExpr, table: &PositionTable) -> TreeAutomaton {
    let mut builder = TreeAutomaton::builder(e.alphabet());
    for p in table.positions() {
        builder.state(p.label());
    }
    for r in table.root_set() {
        builder.final_state(r.label());
    }
    for g in table.positions() {
        for origins in cartesian(&slot_sources(table, g)) {
            builder.transition(&labels(&origins), g.clone(), g.label());
        }
    }
    builder.build().expect("positions are states of their own automaton")
}

pub fn compressed_position_automaton(e: &LinearExpr) -> CompressedTreeAutomaton {
    compressed_position_automaton_from_table(e, &PositionTable::new(e))
}

pub fn compressed_position_automaton_from_table(e: &LinearExpr, table: &PositionTable) -> CompressedTreeAutomaton {
    let mut builder = CompressedTreeAutomaton::builder(e.alphabet());
    for p in table.positions() {
        builder.state(p.label());
    }
    for r in table.root_set() {
        builder.final_state(r.label());
    }
    for f in table.positions() {
        let slots: Vec<Vec<String>> = slot_sources(table, f).iter().map(|s| labels(s)).collect();
        let slots: Vec<&[String]> = slots.iter().map(Vec::as_slice).collect();
        builder.transition(&slots, f.clone(), &[f.label()]);
    }
    builder.build().expect("positions are states of their own automaton")
}

/// Positions grouped by augmented Father set.
struct FatherClasses {
    class_of: BTreeMap<Symbol, String>,
    sets: BTreeMap<String, FatherSet>,
    partition: StatePartition,
}

impl FatherClasses {
    fn new(table: &PositionTable) -> FatherClasses {
        let mut groups: BTreeMap<FatherSet, BTreeSet<String>> = BTreeMap::new();
        for p in table.positions() {
            let set = table.augmented_father_set(p).expect("p is a position");
            groups.entry(set).or_default().insert(p.label());
        }
        let mut class_of = BTreeMap::new();
        let mut sets = BTreeMap::new();
        for (set, block) in &groups {
            let name = StatePartition::name_of_block(block);
            for p in table.positions() {
                if block.contains(&p.label()) {
                    class_of.insert(p.clone(), name.clone());
                }
            }
            sets.insert(name, set.clone());
        }
        let partition = StatePartition::from_blocks(groups.into_values()).expect("groups are disjoint");
        FatherClasses {
            class_of,
            sets,
            partition,
        }
    }

    fn finals(&self) -> impl Iterator<Item = &String> {
        self.sets
            .iter()
            .filter(|(_, set)| set.contains(&FatherPair::dollar()))
            .map(|(name, _)| name)
    }

    /// Classes whose Father set contains `(f,i)`, for each slot `i` of `f`.
    fn slot_classes(&self, f: &Symbol) -> Vec<Vec<String>> {
        (1..=f.arity())
            .map(|i| {
                let pair = FatherPair::new(f.clone(), i);
                self.sets
                    .iter()
                    .filter(|(_, set)| set.contains(&pair))
                    .map(|(name, _)| name.clone())
                    .collect()
            })
            .collect()
    }
}

/// Positions share a block iff their augmented Father sets are equal.
pub fn father_congruence(e: &LinearExpr) -> StatePartition {
    father_congruence_from_table(&PositionTable::new(e))
}

pub fn father_congruence_from_table(table: &PositionTable) -> StatePartition {
    FatherClasses::new(table).partition
}

pub fn father_automaton(e: &LinearExpr) -> TreeAutomaton {
    father_automaton_from_table(e, &PositionTable::new(e))
}

pub fn father_automaton_from_table(e: &LinearExpr, table: &PositionTable) -> TreeAutomaton {
    let classes = FatherClasses::new(table);
    let mut builder = TreeAutomaton::builder(e.alphabet());
    for name in classes.sets.keys() {
        builder.state(name.clone());
    }
    for name in classes.finals() {
        builder.final_state(name.clone());
    }
    for g in table.positions() {
        for origins in cartesian(&classes.slot_classes(g)) {
            builder.transition(&origins, g.clone(), classes.class_of[g].clone());
        }
    }
    builder.build().expect("classes are states of their own automaton")
}

pub fn compressed_father_automaton(e: &LinearExpr) -> CompressedTreeAutomaton {
    compressed_father_automaton_from_table(e, &PositionTable::new(e))
}

pub fn compressed_father_automaton_from_table(e: &LinearExpr, table: &PositionTable) -> CompressedTreeAutomaton {
    let classes = FatherClasses::new(table);
    let mut builder = CompressedTreeAutomaton::builder(e.alphabet());
    for name in classes.sets.keys() {
        builder.state(name.clone());
    }
    for name in classes.finals() {
        builder.final_state(name.clone());
    }
    for f in table.positions() {
        let slots = classes.slot_classes(f);
        let slots: Vec<&[String]> = slots.iter().map(Vec::as_slice).collect();
        builder.transition(&slots, f.clone(), &[classes.class_of[f].clone()]);
    }
    builder.build().expect("classes are states of their own automaton")
}

pub fn position_automaton_general(e: &Expr) -> Result<TreeAutomaton> {
    let lin = linearize(e)?;
    position_automaton(&lin).alphabetical_image(lin.delinearizer())
}

pub fn father_automaton_general(e: &Expr) -> Result<TreeAutomaton> {
    let lin = linearize(e)?;
    father_automaton(&lin).alphabetical_image(lin.delinearizer())
}

pub fn compressed_position_automaton_general(e: &Expr) -> Result<CompressedTreeAutomaton> {
    let lin = linearize(e)?;
    compressed_position_automaton(&lin).alphabetical_image(lin.delinearizer())
}

pub fn compressed_father_automaton_general(e: &Expr) -> Result<CompressedTreeAutomaton> {
    let lin = linearize(e)?;
    compressed_father_automaton(&lin).alphabetical_image(lin.delinearizer())
}

/// Output of any of the four constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Built {
    Plain(TreeAutomaton),
    Compressed(CompressedTreeAutomaton),
}

impl Built {
    pub fn from_table(kind: ConstructionKind, e: &LinearExpr, table: &PositionTable) -> Built {
        match kind {
            ConstructionKind::Position => Built::Plain(position_automaton_from_table(e, table)),
            ConstructionKind::Father => Built::Plain(father_automaton_from_table(e, table)),
            ConstructionKind::CompressedPosition => Built::Compressed(compressed_position_automaton_from_table(e, table)),
            ConstructionKind::CompressedFather => Built::Compressed(compressed_father_automaton_from_table(e, table)),
        }
    }

    pub fn image(&self, phi: &BTreeMap<Symbol, Symbol>) -> Result<Built> {
        Ok(match self {
            Built::Plain(a) => Built::Plain(a.alphabetical_image(phi)?),
            Built::Compressed(c) => Built::Compressed(c.alphabetical_image(phi)?),
        })
    }

    pub fn alphabet(&self) -> &crate::trees::RankedAlphabet {
        match self {
            Built::Plain(a) => a.alphabet(),
            Built::Compressed(c) => c.alphabet(),
        }
    }

    pub fn run(&self, t: &Tree) -> Result<StateSet> {
        match self {
            Built::Plain(a) => a.run(t),
            Built::Compressed(c) => c.run(t),
        }
    }

    pub fn accepts(&self, t: &Tree) -> Result<bool> {
        match self {
            Built::Plain(a) => a.accepts(t),
            Built::Compressed(c) => c.accepts(t),
        }
    }

    pub fn state_name(&self, q: crate::automaton::StateId) -> &str {
        match self {
            Built::Plain(a) => a.state_name(q),
            Built::Compressed(c) => c.state_name(q),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Built::Plain(a) => export::automaton_json(a),
            Built::Compressed(c) => export::compressed_json(c),
        }
    }

    pub fn to_dot(&self) -> String {
        match self {
            Built::Plain(a) => export::automaton_dot(a),
            Built::Compressed(c) => export::compressed_dot(c),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Built::Plain(a) => export::automaton_text(a),
            Built::Compressed(c) => export::compressed_text(c),
        }
    }
}

/// Builds `kind` for `e`. With `general` the result is over the original
/// symbols; otherwise it is over the positions of the linearized expression.
pub fn build(kind: ConstructionKind, e: &Expr, general: bool) -> Result<Built> {
    let lin = linearize(e)?;
    let built = Built::from_table(kind, &lin, &PositionTable::new(&lin));
    if general {
        built.image(lin.delinearizer())
    } else {
        Ok(built)
    }
}

/// Rejects a tree that mentions symbols outside the expression's positions.
pub fn check_positions(e: &LinearExpr, t: &Tree) -> Result<()> {
    match t.symbols().find(|s| !e.is_position(s)) {
        Some(s) => Err(Error::UnknownPosition { symbol: s.label() }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "(f(a,a)+g(b))*a.bf(g(a),b)";

    fn running() -> LinearExpr {
        linearize(&Expr::parse(RUNNING).unwrap()).unwrap()
    }

    fn transitions(a: &TreeAutomaton) -> BTreeSet<String> {
        a.transitions()
            .iter()
            .map(|t| {
                let origins: Vec<&str> = t.origins.iter().map(|&q| a.state_name(q)).collect();
                format!("(({}),{},{})", origins.join(","), t.symbol, a.state_name(t.target))
            })
            .collect()
    }

    #[test]
    fn kinds_parse() {
        for k in ConstructionKind::ALL {
            assert_eq!(k.name().parse::<ConstructionKind>().unwrap(), k);
        }
        assert!("glushkov".parse::<ConstructionKind>().is_err());
    }

    #[test]
    fn position_automaton_of_running_example() {
        let a = position_automaton(&running());
        assert_eq!(a.state_count(), 6);
        assert_eq!(a.names_of(a.finals()).collect::<Vec<_>>(), ["a", "f1", "g2"]);
        let got = transitions(&a);
        assert_eq!(got.len(), 14);
        for t in ["((g2,g2),f1,f1)", "((g4,b),f3,f3)", "((),a,a)", "((f3),g2,g2)", "((a),g4,g4)"] {
            assert!(got.contains(t), "{t}");
        }
        assert!(a.is_deterministic());
    }

    #[test]
    fn single_leaf() {
        let lin = linearize(&Expr::parse("a").unwrap()).unwrap();
        let p = position_automaton(&lin);
        assert_eq!(transitions(&p), BTreeSet::from(["((),a,a)".to_string()]));
        assert_eq!(p.finals().len(), 1);
        let f = father_automaton(&lin);
        assert!(f.alphabet() == p.alphabet() && f.state_count() == 1 && f.transitions().len() == 1);
    }

    #[test]
    fn father_congruence_of_running_example() {
        let blocks: Vec<String> = father_congruence(&running()).blocks().map(StatePartition::name_of_block).collect();
        assert_eq!(blocks, ["{a}", "{b}", "{f1,g2}", "{f3}", "{g4}"]);
    }

    #[test]
    fn father_automaton_of_running_example() {
        let e = running();
        let f = father_automaton(&e);
        assert_eq!(f.state_count(), 5);
        assert_eq!(f.names_of(f.finals()).collect::<Vec<_>>(), ["{a}", "{f1,g2}"]);
        let expected: BTreeSet<String> = [
            "((),a,{a})",
            "((),b,{b})",
            "(({a},{a}),f1,{f1,g2})",
            "(({a},{f1,g2}),f1,{f1,g2})",
            "(({f1,g2},{a}),f1,{f1,g2})",
            "(({f1,g2},{f1,g2}),f1,{f1,g2})",
            "(({f3}),g2,{f1,g2})",
            "(({g4},{b}),f3,{f3})",
            "(({a}),g4,{g4})",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(transitions(&f), expected);
        let quotient = position_automaton(&e).quotient(&father_congruence(&e)).unwrap();
        assert!(f.is_isomorphic(&quotient));
        assert!(!f.is_isomorphic(&position_automaton(&e)));
    }

    #[test]
    fn compressed_position_of_running_example() {
        let e = running();
        let c = compressed_position_automaton(&e);
        assert_eq!(c.transitions().len(), 6);
        assert_eq!(c.expand(), position_automaton(&e));
        assert_eq!(c.dead_transitions().count(), 0);
    }

    #[test]
    fn compressed_father_of_running_example() {
        let e = running();
        let c = compressed_father_automaton(&e);
        assert_eq!(c.state_count(), 5);
        let f1 = c.transitions().iter().find(|t| t.symbol.label() == "f1").unwrap();
        for slot in &f1.origin_sets {
            assert_eq!(c.names_of(slot).collect::<Vec<_>>(), ["{a}", "{f1,g2}"]);
        }
        let g2 = c.transitions().iter().find(|t| t.symbol.label() == "g2").unwrap();
        assert_eq!(c.names_of(&g2.origin_sets[0]).collect::<Vec<_>>(), ["{f3}"]);
        assert_eq!(c.names_of(&g2.targets).collect::<Vec<_>>(), ["{f1,g2}"]);
        let quotient = compressed_position_automaton(&e).quotient(&father_congruence(&e)).unwrap();
        assert!(c.is_isomorphic(&quotient));
    }

    #[test]
    fn general_versions_strip_indices() {
        let e = Expr::parse(RUNNING).unwrap();
        let p = position_automaton_general(&e).unwrap();
        assert_eq!(p.state_count(), 6);
        let symbols: BTreeSet<String> = p.transitions().iter().map(|t| t.symbol.label()).collect();
        assert_eq!(symbols, BTreeSet::from(["a", "b", "f", "g"].map(String::from)));
        let cp = compressed_position_automaton_general(&e).unwrap();
        assert_eq!(cp.transitions().iter().filter(|t| t.symbol.label() == "f").count(), 2);
        let f = father_automaton_general(&e).unwrap();
        assert_eq!(f.state_count(), 5);
        let t = Tree::parse("f(f(a,a),a)").unwrap();
        for kind in ConstructionKind::ALL {
            assert!(build(kind, &e, true).unwrap().accepts(&t).unwrap(), "{kind}");
        }
    }

    #[test]
    fn cfather_accepts_cli_example() {
        let e = Expr::parse(RUNNING).unwrap();
        let t = Tree::parse("g(f(g(a),b))").unwrap();
        assert!(compressed_father_automaton_general(&e).unwrap().accepts(&t).unwrap());
    }
}
