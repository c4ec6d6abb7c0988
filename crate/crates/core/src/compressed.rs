//! Compressed bottom-up automata: each origin slot holds a set of states.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automaton::{image_alphabet, StateId, StateNames, StatePartition, StateSet, Transition, TreeAutomaton};
use crate::error::{Error, Result};
use crate::iso::{self, Edge, Shape};
use crate::trees::{cartesian, RankedAlphabet, Symbol, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompressedTransition {
    pub origin_sets: Vec<StateSet>,
    pub symbol: Symbol,
    pub targets: StateSet,
}

impl CompressedTransition {
    /// A transition with an empty origin slot can never fire.
    pub fn is_dead(&self) -> bool {
        self.origin_sets.iter().any(BTreeSet::is_empty)
    }
}

#[derive(Clone, Debug)]
pub struct CompressedTreeAutomaton {
    alphabet: RankedAlphabet,
    states: StateNames,
    finals: StateSet,
    transitions: BTreeSet<CompressedTransition>,
    by_symbol: HashMap<Symbol, Vec<CompressedTransition>>,
}

impl PartialEq for CompressedTreeAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.finals == other.finals
            && self.transitions == other.transitions
    }
}

impl Eq for CompressedTreeAutomaton {}

#[derive(Clone, Debug, Default)]
pub struct CompressedBuilder {
    alphabet: RankedAlphabet,
    states: BTreeSet<String>,
    finals: BTreeSet<String>,
    transitions: Vec<(Vec<Vec<String>>, Symbol, Vec<String>)>,
}

impl CompressedBuilder {
    pub fn new(alphabet: RankedAlphabet) -> Self {
        CompressedBuilder {
            alphabet,
            ..Default::default()
        }
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.insert(name.into());
        self
    }

    pub fn final_state(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        self.states.insert(name.clone());
        self.finals.insert(name);
        self
    }

    pub fn transition<S: AsRef<str>>(&mut self, origin_sets: &[&[S]], symbol: Symbol, targets: &[S]) -> &mut Self {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        self.transitions
            .push((origin_sets.iter().map(|s| own(s)).collect(), symbol, own(targets)));
        self
    }

    pub fn build(&self) -> Result<CompressedTreeAutomaton> {
        let states = StateNames::new(self.states.clone());
        let ids = |names: &[String]| names.iter().map(|n| states.id(n)).collect::<Result<StateSet>>();
        let finals = self.finals.iter().map(|f| states.id(f)).collect::<Result<StateSet>>()?;
        let mut transitions = BTreeSet::new();
        for (origin_sets, symbol, targets) in &self.transitions {
            if !self.alphabet.contains(symbol) {
                return Err(Error::UnknownSymbol { symbol: symbol.label() });
            }
            if origin_sets.len() != symbol.arity() {
                return Err(Error::ArityMismatch {
                    symbol: symbol.label(),
                    expected: symbol.arity(),
                    found: origin_sets.len(),
                });
            }
            transitions.insert(CompressedTransition {
                origin_sets: origin_sets.iter().map(|s| ids(s)).collect::<Result<_>>()?,
                symbol: symbol.clone(),
                targets: ids(targets)?,
            });
        }
        Ok(CompressedTreeAutomaton::assemble(self.alphabet.clone(), states, finals, transitions))
    }
}

impl CompressedTreeAutomaton {
    pub fn builder(alphabet: RankedAlphabet) -> CompressedBuilder {
        CompressedBuilder::new(alphabet)
    }

    pub(crate) fn assemble(
        alphabet: RankedAlphabet,
        states: StateNames,
        finals: StateSet,
        transitions: BTreeSet<CompressedTransition>,
    ) -> CompressedTreeAutomaton {
        let mut by_symbol: HashMap<Symbol, Vec<CompressedTransition>> = HashMap::new();
        for t in &transitions {
            by_symbol.entry(t.symbol.clone()).or_default().push(t.clone());
        }
        CompressedTreeAutomaton {
            alphabet,
            states,
            finals,
            transitions,
            by_symbol,
        }
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.states.name(q)
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states.id(name)
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    pub fn transitions(&self) -> &BTreeSet<CompressedTransition> {
        &self.transitions
    }

    pub fn names_of<'a>(&'a self, set: &'a StateSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(|&q| self.state_name(q))
    }

    /// Transitions that cannot fire because some origin slot is empty.
    pub fn dead_transitions(&self) -> impl Iterator<Item = &CompressedTransition> {
        self.transitions.iter().filter(|t| t.is_dead())
    }

    /// Union of the targets of every transition whose origin sets contain
    /// the given origins slot by slot.
    pub fn restricted_delta(&self, origins: &[StateId], f: &Symbol) -> Result<StateSet> {
        if origins.len() != f.arity() {
            return Err(Error::ArityMismatch {
                symbol: f.label(),
                expected: f.arity(),
                found: origins.len(),
            });
        }
        Ok(self
            .candidates(f)
            .iter()
            .filter(|t| t.origin_sets.iter().zip(origins).all(|(set, q)| set.contains(q)))
            .flat_map(|t| t.targets.iter().copied())
            .collect())
    }

    fn candidates(&self, f: &Symbol) -> &[CompressedTransition] {
        self.by_symbol.get(f).map(Vec::as_slice).unwrap_or_default()
    }

    /// One bottom-up step: a transition fires iff each child's state set
    /// meets the corresponding origin set.
    pub fn step(&self, children: &[StateSet], f: &Symbol) -> StateSet {
        self.candidates(f)
            .iter()
            .filter(|t| t.origin_sets.iter().zip(children).all(|(set, got)| !set.is_disjoint(got)))
            .flat_map(|t| t.targets.iter().copied())
            .collect()
    }

    pub fn run(&self, t: &Tree) -> Result<StateSet> {
        if !self.alphabet.contains(t.root()) {
            return Err(Error::UnknownSymbol { symbol: t.root().label() });
        }
        let children = t.children().iter().map(|c| self.run(c)).collect::<Result<Vec<_>>>()?;
        Ok(self.step(&children, t.root()))
    }

    pub fn accepts(&self, t: &Tree) -> Result<bool> {
        Ok(!self.run(t)?.is_disjoint(&self.finals))
    }

    pub fn alphabetical_image(&self, phi: &BTreeMap<Symbol, Symbol>) -> Result<CompressedTreeAutomaton> {
        let alphabet = image_alphabet(&self.alphabet, phi)?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| CompressedTransition {
                origin_sets: t.origin_sets.clone(),
                symbol: phi[&t.symbol].clone(),
                targets: t.targets.clone(),
            })
            .collect();
        Ok(CompressedTreeAutomaton::assemble(alphabet, self.states.clone(), self.finals.clone(), transitions))
    }

    /// The plain automaton with one transition per origin tuple and target.
    pub fn expand(&self) -> TreeAutomaton {
        let mut transitions = BTreeSet::new();
        for t in &self.transitions {
            let slots: Vec<Vec<StateId>> = t.origin_sets.iter().map(|s| s.iter().copied().collect()).collect();
            for origins in cartesian(&slots) {
                for &target in &t.targets {
                    transitions.insert(Transition {
                        origins: origins.clone(),
                        symbol: t.symbol.clone(),
                        target,
                    });
                }
            }
        }
        TreeAutomaton::assemble(self.alphabet.clone(), self.states.clone(), self.finals.clone(), transitions)
    }

    /// Maps origin sets and targets blockwise and merges duplicates. The
    /// partition must be a bottom-up congruence of the expansion.
    pub fn quotient(&self, partition: &StatePartition) -> Result<CompressedTreeAutomaton> {
        let expanded = self.expand();
        if !expanded.is_bottom_up_congruence(partition)? {
            let reason = expanded
                .quotient(partition)
                .err()
                .map(|e| e.to_string())
                .unwrap_or_default();
            return Err(Error::NotCongruence(reason));
        }
        let mut names = BTreeSet::new();
        let mut block_of: HashMap<&str, String> = HashMap::new();
        for block in partition.blocks() {
            let name = StatePartition::name_of_block(block);
            for member in block {
                block_of.insert(member.as_str(), name.clone());
            }
            names.insert(name);
        }
        let names = StateNames::new(names);
        let map = |set: &StateSet| -> StateSet {
            set.iter()
                .map(|&q| names.id(&block_of[self.state_name(q)]).expect("block is named"))
                .collect()
        };
        let finals = map(&self.finals);
        let transitions = self
            .transitions
            .iter()
            .map(|t| CompressedTransition {
                origin_sets: t.origin_sets.iter().map(map).collect(),
                symbol: t.symbol.clone(),
                targets: map(&t.targets),
            })
            .collect();
        Ok(CompressedTreeAutomaton::assemble(self.alphabet.clone(), names, finals, transitions))
    }

    fn shape(&self) -> Shape {
        let ids = |s: &StateSet| s.iter().map(|q| q.0).collect::<Vec<_>>();
        Shape {
            states: self.states.len(),
            finals: self.states().map(|q| self.is_final(q)).collect(),
            edges: self
                .transitions
                .iter()
                .map(|t| Edge {
                    symbol: t.symbol.label(),
                    slots: t.origin_sets.iter().map(ids).collect(),
                    targets: ids(&t.targets),
                })
                .collect(),
        }
    }

    /// True iff a state bijection maps finals onto finals and compressed
    /// transitions onto compressed transitions.
    pub fn is_isomorphic(&self, other: &CompressedTreeAutomaton) -> bool {
        self.alphabet == other.alphabet && iso::isomorphic(&self.shape(), &other.shape())
    }
}
