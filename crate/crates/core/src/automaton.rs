//! Bottom-up tree automata with tuple origins.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::iso::{self, Edge, Shape};
use crate::trees::{cartesian, RankedAlphabet, Symbol, Tree};

/// Dense state handle; ids follow the lexicographic order of state names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type StateSet = BTreeSet<StateId>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub origins: Vec<StateId>,
    pub symbol: Symbol,
    pub target: StateId,
}

/// Sorted, deduplicated state names with name lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct StateNames {
    names: Vec<String>,
    ids: HashMap<String, StateId>,
}

impl StateNames {
    pub(crate) fn new(names: BTreeSet<String>) -> Self {
        let names: Vec<String> = names.into_iter().collect();
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), StateId(i as u32)))
            .collect();
        StateNames { names, ids }
    }

    pub(crate) fn id(&self, name: &str) -> Result<StateId> {
        self.ids.get(name).copied().ok_or_else(|| Error::UnknownState { state: name.to_string() })
    }

    pub(crate) fn name(&self, id: StateId) -> &str {
        &self.names[id.index()]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (StateId, &str)> {
        self.names.iter().enumerate().map(|(i, n)| (StateId(i as u32), n.as_str()))
    }
}

#[derive(Clone, Debug)]
pub struct TreeAutomaton {
    alphabet: RankedAlphabet,
    states: StateNames,
    finals: StateSet,
    transitions: BTreeSet<Transition>,
    index: HashMap<(Symbol, Vec<StateId>), StateSet>,
    by_symbol: HashMap<Symbol, Vec<Transition>>,
}

impl PartialEq for TreeAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.finals == other.finals
            && self.transitions == other.transitions
    }
}

impl Eq for TreeAutomaton {}

/// Collects states, finals and transitions by name.
#[derive(Clone, Debug, Default)]
pub struct TreeAutomatonBuilder {
    alphabet: RankedAlphabet,
    states: BTreeSet<String>,
    finals: BTreeSet<String>,
    transitions: Vec<(Vec<String>, Symbol, String)>,
}

impl TreeAutomatonBuilder {
    pub fn new(alphabet: RankedAlphabet) -> Self {
        TreeAutomatonBuilder {
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

    pub fn transition<S: AsRef<str>>(&mut self, origins: &[S], symbol: Symbol, target: impl Into<String>) -> &mut Self {
        self.transitions.push((
            origins.iter().map(|s| s.as_ref().to_string()).collect(),
            symbol,
            target.into(),
        ));
        self
    }

    pub fn build(&self) -> Result<TreeAutomaton> {
        let states = StateNames::new(self.states.clone());
        let finals = self.finals.iter().map(|f| states.id(f)).collect::<Result<StateSet>>()?;
        let mut transitions = BTreeSet::new();
        for (origins, symbol, target) in &self.transitions {
            if !self.alphabet.contains(symbol) {
                return Err(Error::UnknownSymbol { symbol: symbol.label() });
            }
            if origins.len() != symbol.arity() {
                return Err(Error::ArityMismatch {
                    symbol: symbol.label(),
                    expected: symbol.arity(),
                    found: origins.len(),
                });
            }
            transitions.insert(Transition {
                origins: origins.iter().map(|o| states.id(o)).collect::<Result<_>>()?,
                symbol: symbol.clone(),
                target: states.id(target)?,
            });
        }
        Ok(TreeAutomaton::assemble(self.alphabet.clone(), states, finals, transitions))
    }
}

impl TreeAutomaton {
    pub fn builder(alphabet: RankedAlphabet) -> TreeAutomatonBuilder {
        TreeAutomatonBuilder::new(alphabet)
    }

    pub(crate) fn assemble(
        alphabet: RankedAlphabet,
        states: StateNames,
        finals: StateSet,
        transitions: BTreeSet<Transition>,
    ) -> TreeAutomaton {
        let mut index: HashMap<(Symbol, Vec<StateId>), StateSet> = HashMap::new();
        let mut by_symbol: HashMap<Symbol, Vec<Transition>> = HashMap::new();
        for t in &transitions {
            index
                .entry((t.symbol.clone(), t.origins.clone()))
                .or_default()
                .insert(t.target);
            by_symbol.entry(t.symbol.clone()).or_default().push(t.clone());
        }
        TreeAutomaton {
            alphabet,
            states,
            finals,
            transitions,
            index,
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

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    /// Names for a set of states, in id order.
    pub fn names_of<'a>(&'a self, set: &'a StateSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(|&q| self.state_name(q))
    }

    fn check_arity(f: &Symbol, found: usize) -> Result<()> {
        if f.arity() != found {
            return Err(Error::ArityMismatch {
                symbol: f.label(),
                expected: f.arity(),
                found,
            });
        }
        Ok(())
    }

    /// `δ(q1,…,qn,f)`.
    pub fn delta(&self, origins: &[StateId], f: &Symbol) -> StateSet {
        self.index
            .get(&(f.clone(), origins.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Union of `δ(q1,…,qn,f)` over the cartesian product of `origin_sets`.
    pub fn delta_on_sets(&self, origin_sets: &[StateSet], f: &Symbol) -> Result<StateSet> {
        Self::check_arity(f, origin_sets.len())?;
        Ok(self.step(origin_sets, f))
    }

    /// [`Self::delta_on_sets`] without the arity check.
    pub fn step(&self, origin_sets: &[StateSet], f: &Symbol) -> StateSet {
        let Some(candidates) = self.by_symbol.get(f) else {
            return StateSet::new();
        };
        candidates
            .iter()
            .filter(|t| t.origins.iter().zip(origin_sets).all(|(q, set)| set.contains(q)))
            .map(|t| t.target)
            .collect()
    }

    /// `Δ(t)`, computed bottom-up.
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

    pub fn is_deterministic(&self) -> bool {
        self.index.values().all(|targets| targets.len() <= 1)
    }

    /// Relabels every transition through `phi`, which must be total on the
    /// alphabet and preserve arities.
    pub fn alphabetical_image(&self, phi: &BTreeMap<Symbol, Symbol>) -> Result<TreeAutomaton> {
        let alphabet = image_alphabet(&self.alphabet, phi)?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                origins: t.origins.clone(),
                symbol: phi[&t.symbol].clone(),
                target: t.target,
            })
            .collect();
        Ok(TreeAutomaton::assemble(alphabet, self.states.clone(), self.finals.clone(), transitions))
    }

    pub fn identity_partition(&self) -> StatePartition {
        StatePartition::discrete(self.states.iter().map(|(_, n)| n.to_string()))
    }

    /// Decides whether `partition` is a bottom-up congruence: blocks agree on
    /// finality, and swapping one origin for an equivalent state in any
    /// transition context yields equivalent (possibly empty) targets.
    ///
    /// Every context is enumerated, so the cost is `O(|Q|^(k+1))` per symbol
    /// of arity `k`.
    pub fn is_bottom_up_congruence(&self, partition: &StatePartition) -> Result<bool> {
        if !self.is_deterministic() {
            return Err(Error::NonDeterministic);
        }
        let block = partition.block_map(&self.states)?;
        Ok(congruence_violation(self, &block).is_none())
    }

    /// The automaton over the blocks of a bottom-up congruence.
    pub fn quotient(&self, partition: &StatePartition) -> Result<TreeAutomaton> {
        if !self.is_deterministic() {
            return Err(Error::NonDeterministic);
        }
        let block = partition.block_map(&self.states)?;
        if let Some(reason) = congruence_violation(self, &block) {
            return Err(Error::NotCongruence(reason));
        }
        let names = StateNames::new(partition.block_names().collect());
        let to_block = |q: StateId| names.id(&partition.block_name(block[q.index()])).expect("block is named");
        let finals = self.finals.iter().map(|&q| to_block(q)).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                origins: t.origins.iter().map(|&q| to_block(q)).collect(),
                symbol: t.symbol.clone(),
                target: to_block(t.target),
            })
            .collect();
        Ok(TreeAutomaton::assemble(self.alphabet.clone(), names, finals, transitions))
    }

    pub(crate) fn shape(&self) -> Shape {
        Shape {
            states: self.states.len(),
            finals: self.states().map(|q| self.is_final(q)).collect(),
            edges: self
                .transitions
                .iter()
                .map(|t| Edge {
                    symbol: t.symbol.label(),
                    slots: t.origins.iter().map(|q| vec![q.0]).collect(),
                    targets: vec![t.target.0],
                })
                .collect(),
        }
    }

    /// True iff a state bijection maps finals onto finals and transitions
    /// onto transitions, with symbols kept as they are.
    pub fn is_isomorphic(&self, other: &TreeAutomaton) -> bool {
        self.alphabet == other.alphabet && iso::isomorphic(&self.shape(), &other.shape())
    }
}

pub(crate) fn image_alphabet(alphabet: &RankedAlphabet, phi: &BTreeMap<Symbol, Symbol>) -> Result<RankedAlphabet> {
    let mut image = RankedAlphabet::new();
    for symbol in alphabet {
        let to = phi.get(symbol).ok_or_else(|| Error::PartialMorphism { symbol: symbol.label() })?;
        if to.arity() != symbol.arity() {
            return Err(Error::NotArityPreserving {
                from: symbol.label(),
                from_arity: symbol.arity(),
                to: to.label(),
                to_arity: to.arity(),
            });
        }
        image.insert(to.clone())?;
    }
    Ok(image)
}

fn congruence_violation(a: &TreeAutomaton, block: &[usize]) -> Option<String> {
    for q in a.states() {
        for p in a.states() {
            if block[p.index()] == block[q.index()] && a.is_final(p) != a.is_final(q) {
                return Some(format!(
                    "`{}` and `{}` share a block but differ in finality",
                    a.state_name(p),
                    a.state_name(q)
                ));
            }
        }
    }
    let all: Vec<StateId> = a.states().collect();
    let same = |x: &StateSet, y: &StateSet| match (x.first(), y.first()) {
        (None, None) => true,
        (Some(p), Some(q)) => block[p.index()] == block[q.index()],
        _ => false,
    };
    for symbol in &a.alphabet {
        let k = symbol.arity();
        if k == 0 {
            continue;
        }
        let contexts = cartesian(&vec![all.clone(); k - 1]);
        for slot in 0..k {
            for context in &contexts {
                for &p in &all {
                    for &q in &all {
                        if p >= q || block[p.index()] != block[q.index()] {
                            continue;
                        }
                        let mut with_p = context.clone();
                        with_p.insert(slot, p);
                        let mut with_q = context.clone();
                        with_q.insert(slot, q);
                        let (dp, dq) = (a.delta(&with_p, symbol), a.delta(&with_q, symbol));
                        if !same(&dp, &dq) {
                            return Some(format!(
                                "`{}` and `{}` lead to inequivalent targets under `{}` at slot {}",
                                a.state_name(p),
                                a.state_name(q),
                                symbol,
                                slot + 1
                            ));
                        }
                    }
                }
            }
        }
    }
    None
}

/// A partition of state names into blocks. A block is printed as its sorted
/// members between braces, e.g. `{f1,g2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePartition {
    blocks: BTreeSet<BTreeSet<String>>,
}

impl StatePartition {
    pub fn from_blocks<B, S>(blocks: impl IntoIterator<Item = B>) -> Result<StatePartition>
    where
        B: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        for block in blocks {
            let block: BTreeSet<String> = block.into_iter().map(Into::into).collect();
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for name in &block {
                if !seen.insert(name.clone()) {
                    return Err(Error::InvalidPartition(format!("`{name}` appears in two blocks")));
                }
            }
            out.insert(block);
        }
        Ok(StatePartition { blocks: out })
    }

    /// One singleton block per name.
    pub fn discrete(names: impl IntoIterator<Item = String>) -> StatePartition {
        StatePartition {
            blocks: names.into_iter().map(|n| BTreeSet::from([n])).collect(),
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &BTreeSet<String>> {
        self.blocks.iter()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_containing(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.blocks.iter().find(|b| b.contains(name))
    }

    pub fn name_of_block(block: &BTreeSet<String>) -> String {
        format!("{{{}}}", block.iter().cloned().collect::<Vec<_>>().join(","))
    }

    fn block_names(&self) -> impl Iterator<Item = String> + '_ {
        self.blocks.iter().map(Self::name_of_block)
    }

    fn block_name(&self, i: usize) -> String {
        Self::name_of_block(self.blocks.iter().nth(i).expect("block index in range"))
    }

    /// Block index of every state, checking that the blocks cover exactly
    /// the given states.
    fn block_map(&self, states: &StateNames) -> Result<Vec<usize>> {
        let mut map = vec![usize::MAX; states.len()];
        let mut covered = 0;
        for (i, block) in self.blocks.iter().enumerate() {
            for name in block {
                let id = states
                    .id(name)
                    .map_err(|_| Error::InvalidPartition(format!("`{name}` is not a state")))?;
                map[id.index()] = i;
                covered += 1;
            }
        }
        if covered != states.len() {
            let missing = states.iter().find(|(q, _)| map[q.index()] == usize::MAX).map(|(_, n)| n);
            return Err(Error::InvalidPartition(format!(
                "state `{}` is in no block",
                missing.unwrap_or_default()
            )));
        }
        Ok(map)
    }
}

impl fmt::Display for StatePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.block_names().collect();
        write!(f, "{{{}}}", blocks.join(","))
    }
}
