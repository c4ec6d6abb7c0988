//! Ground truth by brute force: bounded language enumeration, an independent
//! membership test, random expressions, and a harness that checks every
//! construction against enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::ops::ControlFlow;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::StateSet;
use crate::compressed::CompressedTreeAutomaton;
use crate::constructions::{
    compressed_father_automaton_from_table, compressed_position_automaton_from_table, father_automaton_from_table,
    position_automaton_from_table, ConstructionKind,
};
use crate::automaton::TreeAutomaton;
use crate::error::{Error, Result};
use crate::expr::{ensure_valid, linearize, nullary_occurs, validate, Expr};
use crate::positions::PositionTable;
use crate::trees::{cartesian, FatherPair, RankedAlphabet, Symbol, Tree};

/// Node budget for enumeration, and the number of star rounds allowed before
/// a fixpoint must be reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBound {
    pub max_nodes: usize,
    pub max_star_iterations: usize,
}

impl EnumerationBound {
    /// Star rounds default to `max_nodes`; a tree first produced in round
    /// `k` has at least `k` nodes.
    pub fn new(max_nodes: usize) -> Result<EnumerationBound> {
        EnumerationBound::with_star_iterations(max_nodes, max_nodes)
    }

    pub fn with_star_iterations(max_nodes: usize, max_star_iterations: usize) -> Result<EnumerationBound> {
        if max_nodes == 0 || max_star_iterations == 0 {
            return Err(Error::InvalidBound("bounds must be at least 1".into()));
        }
        Ok(EnumerationBound {
            max_nodes,
            max_star_iterations,
        })
    }

    /// `max(9, 2 × |positions|)` nodes.
    pub fn calibrated(positions: usize) -> EnumerationBound {
        let n = 9.max(2 * positions);
        EnumerationBound {
            max_nodes: n,
            max_star_iterations: n,
        }
    }
}

/// Trees bucketed by node count; index 0 is unused.
type Buckets = Vec<BTreeSet<Tree>>;

struct Enumerator {
    max: usize,
    cap: usize,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if total < parts {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Enumerator {
    fn empty(&self) -> Buckets {
        vec![BTreeSet::new(); self.max + 1]
    }

    fn lang(&self, e: &Expr) -> Result<Buckets> {
        match e {
            Expr::Apply { symbol, args } => {
                let kids = args.iter().map(|a| self.lang(a)).collect::<Result<Vec<_>>>()?;
                let mut out = self.empty();
                if kids.is_empty() {
                    out[1].insert(Tree::node(symbol.clone(), Vec::new()));
                    return Ok(out);
                }
                for size in kids.len() + 1..=self.max {
                    for comp in compositions(size - 1, kids.len()) {
                        let slots: Vec<Vec<&Tree>> =
                            comp.iter().zip(&kids).map(|(&s, b)| b[s].iter().collect()).collect();
                        for children in cartesian(&slots) {
                            out[size].insert(Tree::node(symbol.clone(), children.into_iter().cloned().collect()));
                        }
                    }
                }
                Ok(out)
            }
            Expr::Sum(l, r) => {
                let mut out = self.lang(l)?;
                for (bucket, more) in out.iter_mut().zip(self.lang(r)?) {
                    bucket.extend(more);
                }
                Ok(out)
            }
            Expr::Product {
                left,
                subscript,
                right,
            } => {
                let l = self.lang(left)?;
                let r = self.lang(right)?;
                Ok(self.substitute(&l, subscript, &r))
            }
            Expr::Star { inner, subscript } => {
                let l = self.lang(inner)?;
                let mut base = self.empty();
                base[1].insert(Tree::node(subscript.clone(), Vec::new()));
                let mut current = base.clone();
                let mut rounds = 0;
                loop {
                    let mut next = self.substitute(&l, subscript, &current);
                    for (bucket, b) in next.iter_mut().zip(&base) {
                        bucket.extend(b.iter().cloned());
                    }
                    if next == current {
                        return Ok(current);
                    }
                    rounds += 1;
                    if rounds > self.cap {
                        return Err(Error::StarCapExceeded { cap: self.cap });
                    }
                    current = next;
                }
            }
        }
    }

    /// `left ·c right`, keeping only results within the node budget.
    fn substitute(&self, left: &Buckets, c: &Symbol, right: &Buckets) -> Buckets {
        let min_r = (1..=self.max).find(|&s| !right[s].is_empty());
        let mut out = self.empty();
        for bucket in left.iter() {
            for t in bucket {
                for (tree, size) in substitute_bounded(t, c, right, min_r, self.max) {
                    out[size].insert(tree);
                }
            }
        }
        out
    }
}

/// Smallest size of any substitution result, or `None` if there is none.
fn min_size(t: &Tree, c: &Symbol, min_r: Option<usize>) -> Option<usize> {
    if t.children().is_empty() {
        return if t.root() == c { min_r } else { Some(1) };
    }
    t.children()
        .iter()
        .map(|child| min_size(child, c, min_r))
        .sum::<Option<usize>>()
        .map(|s| s + 1)
}

fn substitute_bounded(t: &Tree, c: &Symbol, right: &Buckets, min_r: Option<usize>, budget: usize) -> Vec<(Tree, usize)> {
    if t.children().is_empty() {
        if t.root() == c {
            return (1..=budget.min(right.len() - 1))
                .flat_map(|s| right[s].iter().map(move |r| (r.clone(), s)))
                .collect();
        }
        return if budget >= 1 { vec![(t.clone(), 1)] } else { Vec::new() };
    }
    if !t.contains_symbol(c) {
        let size = t.size();
        return if size <= budget { vec![(t.clone(), size)] } else { Vec::new() };
    }
    let mins: Option<Vec<usize>> = t.children().iter().map(|ch| min_size(ch, c, min_r)).collect();
    let Some(mins) = mins else {
        return Vec::new();
    };
    let total_min: usize = mins.iter().sum();
    if 1 + total_min > budget {
        return Vec::new();
    }
    let mut partial: Vec<(Vec<Tree>, usize)> = vec![(Vec::new(), 1)];
    let mut rest_min = total_min;
    for (child, &m) in t.children().iter().zip(&mins) {
        rest_min -= m;
        let options = substitute_bounded(child, c, right, min_r, budget - 1 - (total_min - m));
        let mut next = Vec::new();
        for (kids, used) in &partial {
            for (option, size) in &options {
                if used + size + rest_min <= budget {
                    let mut kids = kids.clone();
                    kids.push(option.clone());
                    next.push((kids, used + size));
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(kids, size)| (Tree::node(t.root().clone(), kids), size))
        .collect()
}

/// Every tree of `L(e)` with at most `bound.max_nodes` nodes.
pub fn enumerate_language(e: &Expr, bound: EnumerationBound) -> Result<BTreeSet<Tree>> {
    ensure_valid(e)?;
    let enumerator = Enumerator {
        max: bound.max_nodes,
        cap: bound.max_star_iterations,
    };
    Ok(enumerator.lang(e)?.into_iter().flatten().collect())
}

/// Union of the tree-level father sets of `f` over the bounded language.
pub fn father_via_enumeration(e: &Expr, f: &Symbol, bound: EnumerationBound) -> Result<BTreeSet<FatherPair>> {
    Ok(enumerate_language(e, bound)?
        .iter()
        .flat_map(|t| t.father_of(f))
        .collect())
}

pub fn root_via_enumeration(e: &Expr, bound: EnumerationBound) -> Result<BTreeSet<Symbol>> {
    Ok(enumerate_language(e, bound)?.iter().map(|t| t.root().clone()).collect())
}

/// Every tree over `alphabet` with at most `max_nodes` nodes.
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_nodes: usize) -> Vec<Tree> {
    let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(); max_nodes + 1];
    for size in 1..=max_nodes {
        for symbol in alphabet {
            let k = symbol.arity();
            if k == 0 {
                if size == 1 {
                    by_size[1].push(Tree::node(symbol.clone(), Vec::new()));
                }
                continue;
            }
            for comp in compositions(size - 1, k) {
                let slots: Vec<Vec<&Tree>> = comp.iter().map(|&s| by_size[s].iter().collect()).collect();
                let built: Vec<Tree> = cartesian(&slots)
                    .into_iter()
                    .map(|kids| Tree::node(symbol.clone(), kids.into_iter().cloned().collect()))
                    .collect();
                by_size[size].extend(built);
            }
        }
    }
    by_size.into_iter().flatten().collect()
}

/// Nullary `a`, `b`, `c`; unary `g`; binary `f`; ternary `h`.
pub fn default_random_alphabet() -> RankedAlphabet {
    RankedAlphabet::from_symbols([
        Symbol::nullary("a"),
        Symbol::nullary("b"),
        Symbol::nullary("c"),
        Symbol::new("g", 1),
        Symbol::new("f", 2),
        Symbol::new("h", 3),
    ])
    .expect("distinct labels")
}

const MAX_DEPTH: usize = 5;

struct Generator<'a> {
    rng: ChaCha8Rng,
    nullary: Vec<&'a Symbol>,
    ranked: Vec<&'a Symbol>,
    budget: usize,
}

impl Generator<'_> {
    fn leaf(&mut self) -> Expr {
        let s = *self.nullary.choose(&mut self.rng).expect("nullary symbols exist");
        Expr::apply(s.clone(), Vec::new())
    }

    fn expr(&mut self, depth: usize) -> Expr {
        if depth >= MAX_DEPTH {
            return self.leaf();
        }
        let apply_weight = if self.budget > 0 && !self.ranked.is_empty() { 5 } else { 0 };
        let weights = [2, apply_weight, 2, 2, 2];
        let total: u32 = weights.iter().sum();
        let mut roll = self.rng.gen_range(0..total);
        let mut kind = 0;
        while roll >= weights[kind] {
            roll -= weights[kind];
            kind += 1;
        }
        match kind {
            0 => self.leaf(),
            1 => {
                self.budget -= 1;
                let s = *self.ranked.choose(&mut self.rng).expect("checked above");
                let args = (0..s.arity()).map(|_| self.expr(depth + 1)).collect();
                Expr::apply(s.clone(), args)
            }
            2 => {
                let l = self.expr(depth + 1);
                Expr::sum(l, self.expr(depth + 1))
            }
            3 => {
                let inner = self.expr(depth + 1);
                let present: Vec<&Symbol> = self.nullary.iter().copied().filter(|c| nullary_occurs(&inner, c)).collect();
                let c = if !present.is_empty() && self.rng.gen_bool(0.8) {
                    *present.choose(&mut self.rng).expect("non-empty")
                } else {
                    *self.nullary.choose(&mut self.rng).expect("nullary symbols exist")
                };
                Expr::star(inner, c.clone())
            }
            _ => {
                let left = self.expr(depth + 1);
                let present: Vec<&Symbol> = self.nullary.iter().copied().filter(|c| nullary_occurs(&left, c)).collect();
                match present.choose(&mut self.rng) {
                    Some(&c) => Expr::product(left, c.clone(), self.expr(depth + 1)),
                    None => left,
                }
            }
        }
    }
}

/// A valid expression with at most `max_positions` occurrences of symbols of
/// positive arity, reproducible from `seed`.
pub fn random_expression(seed: u64, max_positions: usize, alphabet: &RankedAlphabet) -> Result<Expr> {
    let nullary: Vec<&Symbol> = alphabet.nullary().filter(|s| !s.is_dollar()).collect();
    if nullary.is_empty() {
        return Err(Error::NoNullarySymbol);
    }
    let ranked = alphabet.iter().filter(|s| s.arity() > 0 && !s.is_dollar()).collect();
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(seed),
        nullary,
        ranked,
        budget: max_positions,
    };
    loop {
        gen.budget = max_positions;
        let e = gen.expr(0);
        if validate(&e).is_empty() {
            return Ok(e);
        }
    }
}

enum Binding<'e> {
    /// A product's right operand, evaluated in the product's environment.
    Operand(&'e Expr, Env<'e>),
    /// A star node, re-entered in its own environment.
    Star(&'e Expr, Env<'e>),
}

struct Frame<'e> {
    symbol: &'e Symbol,
    binding: Binding<'e>,
    next: Env<'e>,
}

type Env<'e> = Option<Rc<Frame<'e>>>;

fn env_key(env: &Env<'_>) -> usize {
    env.as_ref().map_or(0, |f| Rc::as_ptr(f) as usize)
}

struct Membership {
    active: HashSet<(usize, usize, usize)>,
}

impl Membership {
    fn holds<'e>(&mut self, e: &'e Expr, env: &Env<'e>, t: &Tree) -> bool {
        let key = (e as *const Expr as usize, env_key(env), t as *const Tree as usize);
        // Re-entering a goal already on the stack cannot contribute to the
        // least fixpoint.
        if !self.active.insert(key) {
            return false;
        }
        let result = match e {
            Expr::Apply { symbol, args } if args.is_empty() => self.leaf(symbol, env, t),
            Expr::Apply { symbol, args } => {
                t.root() == symbol && args.iter().zip(t.children()).all(|(a, child)| self.holds(a, env, child))
            }
            Expr::Sum(l, r) => self.holds(l, env, t) || self.holds(r, env, t),
            Expr::Product {
                left,
                subscript,
                right,
            } => {
                let inner = Some(Rc::new(Frame {
                    symbol: subscript,
                    binding: Binding::Operand(right, env.clone()),
                    next: env.clone(),
                }));
                self.holds(left, &inner, t)
            }
            Expr::Star { inner, subscript } => {
                let extended = Some(Rc::new(Frame {
                    symbol: subscript,
                    binding: Binding::Star(e, env.clone()),
                    next: env.clone(),
                }));
                self.holds(inner, &extended, t) || self.leaf(subscript, env, t)
            }
        };
        self.active.remove(&key);
        result
    }

    fn leaf<'e>(&mut self, c: &'e Symbol, env: &Env<'e>, t: &Tree) -> bool {
        let mut frame = env.clone();
        while let Some(f) = frame {
            if f.symbol == c {
                return match &f.binding {
                    Binding::Operand(r, renv) => self.holds(r, renv, t),
                    Binding::Star(s, senv) => self.holds(s, senv, t),
                };
            }
            frame = f.next.clone();
        }
        t.root() == c && t.children().is_empty()
    }
}

/// Decides `t ∈ L(e)` directly from the language semantics, without
/// enumeration or position functions.
pub fn semantic_member(e: &Expr, t: &Tree) -> Result<bool> {
    ensure_valid(e)?;
    let mut m = Membership { active: HashSet::new() };
    Ok(m.holds(e, &None, t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub expression: Expr,
    pub bound: EnumerationBound,
    /// Trees over the linearized and the original symbols combined.
    pub trees_checked: u64,
    pub language_size: usize,
    pub per_construction: BTreeMap<ConstructionKind, bool>,
    pub characterization_agreement: bool,
    /// Plain and compressed runs produce identical state sets.
    pub delta_agreement: bool,
    /// Root and Father sets contain everything the bounded language shows.
    pub position_function_agreement: bool,
    pub first_counterexample: Option<Tree>,
}

impl ValidationReport {
    pub fn all_agree(&self) -> bool {
        self.per_construction.values().all(|&ok| ok)
            && self.characterization_agreement
            && self.delta_agreement
            && self.position_function_agreement
    }

    fn note(&mut self, t: &Tree) {
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(t.clone());
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
        write!(
            f,
            "{}  nodes<={}  trees={}  language={}",
            self.expression, self.bound.max_nodes, self.trees_checked, self.language_size
        )?;
        for (kind, ok) in &self.per_construction {
            write!(f, "  {kind}={}", flag(*ok))?;
        }
        write!(
            f,
            "  characterization={}  delta={}  positions={}",
            flag(self.characterization_agreement),
            flag(self.delta_agreement),
            flag(self.position_function_agreement)
        )?;
        if let Some(t) = &self.first_counterexample {
            write!(f, "  counterexample={t}")?;
        }
        Ok(())
    }
}

struct Class {
    count: u64,
    witness: Tree,
    productions: Vec<(Symbol, Vec<(usize, usize)>)>,
}

/// All trees up to a size, grouped by a compositional signature. Only the
/// count, one witness and the ways of building each class are kept.
struct Universe<S> {
    signatures: Vec<S>,
    ids: HashMap<S, usize>,
    levels: Vec<BTreeMap<usize, Class>>,
}

impl<S: Clone + Eq + Hash> Universe<S> {
    fn build(alphabet: &RankedAlphabet, max_nodes: usize, combine: &impl Fn(&Symbol, &[&S]) -> S) -> Self {
        let mut u = Universe {
            signatures: Vec::new(),
            ids: HashMap::new(),
            levels: (0..=max_nodes).map(|_| BTreeMap::new()).collect(),
        };
        for size in 1..=max_nodes {
            let mut level: BTreeMap<usize, Class> = BTreeMap::new();
            for symbol in alphabet {
                let k = symbol.arity();
                let comps = if k == 0 {
                    if size == 1 { vec![Vec::new()] } else { Vec::new() }
                } else {
                    compositions(size - 1, k)
                };
                for comp in comps {
                    let slots: Vec<Vec<usize>> = comp.iter().map(|&s| u.levels[s].keys().copied().collect()).collect();
                    for kids in cartesian(&slots) {
                        let child_sigs: Vec<&S> = kids.iter().map(|&id| &u.signatures[id]).collect();
                        let sig = combine(symbol, &child_sigs);
                        let count: u64 = comp.iter().zip(&kids).map(|(&s, &id)| u.levels[s][&id].count).product();
                        let id = match u.ids.get(&sig) {
                            Some(&id) => id,
                            None => {
                                u.signatures.push(sig.clone());
                                u.ids.insert(sig, u.signatures.len() - 1);
                                u.signatures.len() - 1
                            }
                        };
                        let production = (symbol.clone(), comp.iter().copied().zip(kids.iter().copied()).collect());
                        match level.get_mut(&id) {
                            Some(class) => {
                                class.count += count;
                                class.productions.push(production);
                            }
                            None => {
                                let witness = Tree::node(
                                    symbol.clone(),
                                    comp.iter().zip(&kids).map(|(&s, id)| u.levels[s][id].witness.clone()).collect(),
                                );
                                level.insert(
                                    id,
                                    Class {
                                        count,
                                        witness,
                                        productions: vec![production],
                                    },
                                );
                            }
                        }
                    }
                }
            }
            u.levels[size] = level;
        }
        u
    }

    fn total(&self) -> u64 {
        self.levels.iter().flat_map(|l| l.values()).map(|c| c.count).sum()
    }

    fn classes(&self) -> impl Iterator<Item = (usize, usize, &Class)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(size, l)| l.iter().map(move |(&id, c)| (size, id, c)))
    }

    /// Visits every tree of a class until `visit` breaks.
    fn each_tree(&self, size: usize, id: usize, visit: &mut dyn FnMut(Tree) -> ControlFlow<()>) -> ControlFlow<()> {
        for (symbol, kids) in &self.levels[size][&id].productions {
            self.each_tuple(symbol, kids, &mut Vec::new(), visit)?;
        }
        ControlFlow::Continue(())
    }

    fn each_tuple(
        &self,
        symbol: &Symbol,
        kids: &[(usize, usize)],
        acc: &mut Vec<Tree>,
        visit: &mut dyn FnMut(Tree) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(&(size, id)) = kids.get(acc.len()) else {
            return visit(Tree::node(symbol.clone(), acc.clone()));
        };
        self.each_tree(size, id, &mut |t| {
            acc.push(t);
            let flow = self.each_tuple(symbol, kids, acc, visit);
            acc.pop();
            flow
        })
    }
}

fn signature_of<S>(t: &Tree, combine: &impl Fn(&Symbol, &[&S]) -> S) -> S {
    let kids: Vec<S> = t.children().iter().map(|c| signature_of(c, combine)).collect();
    combine(t.root(), &kids.iter().collect::<Vec<_>>())
}

/// Checks that `accepts` holds on exactly the trees of `language` within
/// the universe. Returns a counterexample when it does not.
fn check_acceptor<S: Clone + Eq + Hash>(
    universe: &Universe<S>,
    language: &BTreeSet<Tree>,
    language_sigs: &[S],
    accepts: impl Fn(&S) -> bool,
) -> Option<Tree> {
    if let Some((t, _)) = language.iter().zip(language_sigs).find(|(_, s)| !accepts(s)) {
        return Some(t.clone());
    }
    let accepted: u64 = universe
        .classes()
        .filter(|(_, id, _)| accepts(&universe.signatures[*id]))
        .map(|(_, _, c)| c.count)
        .sum();
    if accepted == language.len() as u64 {
        return None;
    }
    let mut members: HashMap<(usize, &S), u64> = HashMap::new();
    for (t, s) in language.iter().zip(language_sigs) {
        *members.entry((t.size(), s)).or_default() += 1;
    }
    for (size, id, class) in universe.classes() {
        let sig = &universe.signatures[id];
        if !accepts(sig) || members.get(&(size, sig)).copied().unwrap_or(0) == class.count {
            continue;
        }
        let mut found = None;
        let _ = universe.each_tree(size, id, &mut |t| {
            if language.contains(&t) {
                ControlFlow::Continue(())
            } else {
                found = Some(t);
                ControlFlow::Break(())
            }
        });
        if found.is_some() {
            return found;
        }
    }
    unreachable!("accepted count exceeds the language but every accepted class is covered")
}

fn accepting(set: &StateSet, finals: &StateSet) -> bool {
    !set.is_disjoint(finals)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct LinearSig {
    runs: [StateSet; 4],
    root: Symbol,
    edges_ok: bool,
}

/// Runs of the position, father, compressed position and compressed father
/// automata, in that order.
struct Four {
    plain: [TreeAutomaton; 2],
    compressed: [CompressedTreeAutomaton; 2],
}

impl Four {
    fn step(&self, symbol: &Symbol, kids: &[&[StateSet; 4]]) -> [StateSet; 4] {
        let slot = |i: usize| kids.iter().map(|k| k[i].clone()).collect::<Vec<_>>();
        [
            self.plain[0].step(&slot(0), symbol),
            self.plain[1].step(&slot(1), symbol),
            self.compressed[0].step(&slot(2), symbol),
            self.compressed[1].step(&slot(3), symbol),
        ]
    }

    fn finals(&self, i: usize) -> &StateSet {
        match i {
            0 | 1 => self.plain[i].finals(),
            _ => self.compressed[i - 2].finals(),
        }
    }

    fn image(&self, phi: &BTreeMap<Symbol, Symbol>) -> Result<Four> {
        Ok(Four {
            plain: [self.plain[0].alphabetical_image(phi)?, self.plain[1].alphabetical_image(phi)?],
            compressed: [
                self.compressed[0].alphabetical_image(phi)?,
                self.compressed[1].alphabetical_image(phi)?,
            ],
        })
    }
}

const KINDS: [ConstructionKind; 4] = [
    ConstructionKind::Position,
    ConstructionKind::Father,
    ConstructionKind::CompressedPosition,
    ConstructionKind::CompressedFather,
];

/// Checks every construction, the membership characterization and the
/// position functions against bounded enumeration, over all trees up to
/// `bound.max_nodes` nodes built from the symbols of `e`.
pub fn cross_validate(e: &Expr, bound: EnumerationBound) -> Result<ValidationReport> {
    cross_validate_with(e, bound, |_| {})
}

/// [`cross_validate`] with a hook that may alter the position table before
/// any automaton is built.
pub fn cross_validate_with(
    e: &Expr,
    bound: EnumerationBound,
    alter: impl FnOnce(&mut PositionTable),
) -> Result<ValidationReport> {
    let lin = linearize(e)?;
    let mut table = PositionTable::new(&lin);
    alter(&mut table);
    let linear = Four {
        plain: [
            position_automaton_from_table(&lin, &table),
            father_automaton_from_table(&lin, &table),
        ],
        compressed: [
            compressed_position_automaton_from_table(&lin, &table),
            compressed_father_automaton_from_table(&lin, &table),
        ],
    };
    let general = linear.image(lin.delinearizer())?;
    let linear_language = enumerate_language(lin.expr(), bound)?;
    let general_language = enumerate_language(e, bound)?;

    let mut report = ValidationReport {
        expression: e.clone(),
        bound,
        trees_checked: 0,
        language_size: general_language.len(),
        per_construction: KINDS.iter().map(|&k| (k, true)).collect(),
        characterization_agreement: true,
        delta_agreement: true,
        position_function_agreement: true,
        first_counterexample: None,
    };

    for t in &linear_language {
        let root_ok = table.root_set().contains(t.root());
        let fathers_ok = t.subtrees().all(|node| {
            node.children().iter().enumerate().all(|(i, child)| {
                table
                    .father_set(child.root())
                    .is_ok_and(|s| s.contains(&FatherPair::new(node.root().clone(), i + 1)))
            })
        });
        if !(root_ok && fathers_ok) {
            report.position_function_agreement = false;
            report.note(t);
            break;
        }
    }

    let linear_combine = |symbol: &Symbol, kids: &[&LinearSig]| LinearSig {
        runs: linear.step(symbol, &kids.iter().map(|k| &k.runs).collect::<Vec<_>>()),
        root: symbol.clone(),
        edges_ok: kids.iter().enumerate().all(|(i, k)| {
            k.edges_ok
                && table
                    .father_set(&k.root)
                    .is_ok_and(|s| s.contains(&FatherPair::new(symbol.clone(), i + 1)))
        }),
    };
    let universe = Universe::build(&lin.alphabet(), bound.max_nodes, &linear_combine);
    report.trees_checked += universe.total();
    if let Some((_, _, class)) = universe.classes().find(|(_, id, _)| {
        let s = &universe.signatures[*id];
        s.runs[0] != s.runs[2] || s.runs[1] != s.runs[3]
    }) {
        report.delta_agreement = false;
        report.note(&class.witness);
    }
    let sigs: Vec<LinearSig> = linear_language.iter().map(|t| signature_of(t, &linear_combine)).collect();
    let characterized = |s: &LinearSig| s.edges_ok && table.root_set().contains(&s.root);
    if let Some(t) = check_acceptor(&universe, &linear_language, &sigs, characterized) {
        report.characterization_agreement = false;
        report.note(&t);
    }
    for (i, kind) in KINDS.iter().enumerate() {
        if let Some(t) = check_acceptor(&universe, &linear_language, &sigs, |s| accepting(&s.runs[i], linear.finals(i))) {
            report.per_construction.insert(*kind, false);
            report.note(&t);
        }
    }
    drop(universe);

    let general_combine = |symbol: &Symbol, kids: &[&[StateSet; 4]]| general.step(symbol, kids);
    let universe = Universe::build(&e.alphabet()?, bound.max_nodes, &general_combine);
    report.trees_checked += universe.total();
    if let Some((_, _, class)) = universe.classes().find(|(_, id, _)| {
        let s = &universe.signatures[*id];
        s[0] != s[2] || s[1] != s[3]
    }) {
        report.delta_agreement = false;
        report.note(&class.witness);
    }
    let sigs: Vec<[StateSet; 4]> = general_language.iter().map(|t| signature_of(t, &general_combine)).collect();
    for (i, kind) in KINDS.iter().enumerate() {
        if let Some(t) = check_acceptor(&universe, &general_language, &sigs, |s| accepting(&s[i], general.finals(i))) {
            report.per_construction.insert(*kind, false);
            report.note(&t);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bound(n: usize) -> EnumerationBound {
        EnumerationBound::new(n).unwrap()
    }

    fn trees(texts: &[&str]) -> BTreeSet<Tree> {
        texts.iter().map(|t| Tree::parse(t).unwrap()).collect()
    }

    #[test]
    fn bounds_must_be_positive() {
        assert!(EnumerationBound::new(0).is_err());
        assert!(EnumerationBound::with_star_iterations(3, 0).is_err());
        assert_eq!(EnumerationBound::calibrated(6).max_nodes, 12);
        assert_eq!(EnumerationBound::calibrated(2).max_nodes, 9);
    }

    #[test]
    fn compositions_cover_every_split() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(1, 2).is_empty());
    }

    #[test]
    fn leaf_language() {
        let e = Expr::parse("a").unwrap();
        assert_eq!(enumerate_language(&e, bound(5)).unwrap(), trees(&["a"]));
    }

    #[test]
    fn star_language_up_to_three_nodes() {
        let e = Expr::parse("f(a,a)*a").unwrap();
        assert_eq!(enumerate_language(&e, bound(3)).unwrap(), trees(&["a", "f(a,a)"]));
        let five = enumerate_language(&e, bound(5)).unwrap();
        assert_eq!(five, trees(&["a", "f(a,a)", "f(f(a,a),a)", "f(a,f(a,a))"]));
    }

    #[test]
    fn product_substitutes_each_occurrence_independently() {
        let e = Expr::parse("f(c,c).c(a+b)").unwrap();
        assert_eq!(
            enumerate_language(&e, bound(3)).unwrap(),
            trees(&["f(a,a)", "f(a,b)", "f(b,a)", "f(b,b)"])
        );
    }

    #[test]
    fn star_cap_is_enforced() {
        let e = Expr::parse("g(a)*a").unwrap();
        let tight = EnumerationBound::with_star_iterations(6, 2).unwrap();
        assert!(matches!(enumerate_language(&e, tight), Err(Error::StarCapExceeded { cap: 2 })));
        assert_eq!(enumerate_language(&e, bound(6)).unwrap().len(), 6);
    }

    #[test]
    fn enumeration_rejects_invalid_expressions() {
        let bad = Expr::product(Expr::leaf("a"), Symbol::nullary("b"), Expr::leaf("b"));
        assert!(matches!(enumerate_language(&bad, bound(3)), Err(Error::InvalidExpression(_))));
    }

    #[test]
    fn semantic_membership_examples() {
        let e = Expr::parse("(f(a,a)+g(b))*a.bf(g(a),b)").unwrap();
        for yes in ["a", "f(a,a)", "f(f(a,a),a)", "g(f(g(a),b))", "f(g(f(g(a),b)),a)"] {
            assert!(semantic_member(&e, &Tree::parse(yes).unwrap()).unwrap(), "{yes}");
        }
        for no in ["b", "g(b)", "f(g(a),b)", "g(a)", "f(a,b)"] {
            assert!(!semantic_member(&e, &Tree::parse(no).unwrap()).unwrap(), "{no}");
        }
        let loopy = Expr::parse("(a+f(a,a))*a").unwrap();
        assert!(semantic_member(&loopy, &Tree::parse("f(a,f(a,a))").unwrap()).unwrap());
        assert!(!semantic_member(&loopy, &Tree::parse("f(a,b)").unwrap()).unwrap());
    }

    #[test]
    fn enumeration_trees_count() {
        let sigma = RankedAlphabet::from_symbols([Symbol::nullary("a"), Symbol::new("f", 2)]).unwrap();
        // Catalan numbers: 1, 1, 2 full binary trees with 1, 3, 5 nodes.
        assert_eq!(enumerate_trees(&sigma, 5).len(), 4);
    }

    #[test]
    fn universe_counts_match_explicit_enumeration() {
        let sigma = default_random_alphabet();
        let combine = |s: &Symbol, _: &[&()]| {
            let _ = s;
        };
        let u = Universe::build(&sigma, 5, &combine);
        assert_eq!(u.total(), enumerate_trees(&sigma, 5).len() as u64);
        let mut seen = 0;
        for (size, id, _) in u.classes() {
            let _ = u.each_tree(size, id, &mut |_| {
                seen += 1;
                ControlFlow::Continue(())
            });
        }
        assert_eq!(seen, u.total());
    }

    #[test]
    fn random_expressions_are_reproducible_and_valid() {
        let sigma = default_random_alphabet();
        for seed in 0..50 {
            let e = random_expression(seed, 6, &sigma).unwrap();
            assert_eq!(e, random_expression(seed, 6, &sigma).unwrap());
            assert!(validate(&e).is_empty());
            assert!(e.position_count() <= 6);
        }
        let no_leaf = RankedAlphabet::from_symbols([Symbol::new("g", 1)]).unwrap();
        assert!(matches!(random_expression(1, 3, &no_leaf), Err(Error::NoNullarySymbol)));
    }

    #[test]
    fn cross_validation_of_small_expressions() {
        for text in ["a", "g(a)*a", "f(c,c).c(a+b)", "(f(a,a)+g(b))*a.bf(g(a),b)"] {
            let e = Expr::parse(text).unwrap();
            let report = cross_validate(&e, bound(7)).unwrap();
            assert!(report.all_agree(), "{report}");
            assert!(report.first_counterexample.is_none());
        }
        let single = cross_validate(&Expr::parse("a").unwrap(), bound(4)).unwrap();
        assert_eq!(single.language_size, 1);
    }
}
