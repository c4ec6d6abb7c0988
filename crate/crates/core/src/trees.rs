//! Ranked alphabets, finite ranked trees, and the tree-level father relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::Cursor;

/// A ranked symbol. Linearized symbols of arity ≥ 1 carry a position index
/// and print as `name` followed by the index (`f1`, `g2`, ...).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    index: Option<u32>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            index: None,
            arity,
        }
    }

    pub fn nullary(name: &str) -> Self {
        Symbol::new(name, 0)
    }

    pub fn indexed(name: &str, arity: usize, index: u32) -> Self {
        Symbol {
            name: name.into(),
            index: Some(index),
            arity,
        }
    }

    /// The reserved unary symbol placed above an expression so that root
    /// membership reads as the father pair `($,1)`.
    pub fn dollar() -> Self {
        Symbol::new("$", 1)
    }

    pub fn is_dollar(&self) -> bool {
        &*self.name == "$"
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn index(&self) -> Option<u32> {
        self.index
    }

    /// The same symbol with its position index dropped.
    pub fn unindexed(&self) -> Symbol {
        Symbol {
            name: self.name.clone(),
            index: None,
            arity: self.arity,
        }
    }

    pub(crate) fn with_index(&self, index: u32) -> Symbol {
        Symbol {
            name: self.name.clone(),
            index: Some(index),
            arity: self.arity,
        }
    }

    /// Printed form, used as the key in alphabets and serialized output.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}{}", self.name, i),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.arity)
    }
}

/// A finite ranked alphabet, keyed by printed label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankedAlphabet {
    symbols: BTreeMap<String, Symbol>,
}

impl RankedAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Result<Self> {
        let mut alphabet = RankedAlphabet::new();
        for symbol in symbols {
            alphabet.insert(symbol)?;
        }
        Ok(alphabet)
    }

    /// Adds a symbol; re-adding an identical symbol is a no-op.
    pub fn insert(&mut self, symbol: Symbol) -> Result<()> {
        let label = symbol.label();
        if label.is_empty() {
            return Err(Error::Malformed("empty symbol name".into()));
        }
        match self.symbols.get(&label) {
            Some(existing) if *existing == symbol => Ok(()),
            Some(existing) if existing.arity() != symbol.arity() => {
                Err(Error::InconsistentArity {
                    name: label,
                    first: existing.arity(),
                    second: symbol.arity(),
                })
            }
            Some(_) => Err(Error::AmbiguousLabel { label }),
            None => {
                self.symbols.insert(label, symbol);
                Ok(())
            }
        }
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.symbols.get(&symbol.label()) == Some(symbol)
    }

    pub fn get(&self, label: &str) -> Option<&Symbol> {
        self.symbols.get(label)
    }

    pub fn resolve(&self, label: &str) -> Result<&Symbol> {
        self.get(label).ok_or_else(|| Error::UnknownSymbol {
            symbol: label.to_string(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn nullary(&self) -> impl Iterator<Item = &Symbol> {
        self.iter().filter(|s| s.arity() == 0)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.iter().map(Symbol::arity).max().unwrap_or(0)
    }
}

impl<'a> IntoIterator for &'a RankedAlphabet {
    type Item = &'a Symbol;
    type IntoIter = std::collections::btree_map::Values<'a, String, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.symbols.values()
    }
}

/// A pair `(g, i)`: a `g`-node whose `i`-th child (1-based) is the symbol of interest.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FatherPair {
    pub parent: Symbol,
    pub index: usize,
}

impl FatherPair {
    pub fn new(parent: Symbol, index: usize) -> Self {
        debug_assert!(index >= 1 && index <= parent.arity());
        FatherPair { parent, index }
    }

    pub fn dollar() -> Self {
        FatherPair::new(Symbol::dollar(), 1)
    }
}

impl fmt::Display for FatherPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.parent, self.index)
    }
}

impl fmt::Debug for FatherPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite ordered ranked tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    label: Symbol,
    children: Vec<Tree>,
}

impl Tree {
    pub fn new(label: Symbol, children: Vec<Tree>) -> Result<Self> {
        if label.arity() != children.len() {
            return Err(Error::ArityMismatch {
                symbol: label.label(),
                expected: label.arity(),
                found: children.len(),
            });
        }
        Ok(Tree { label, children })
    }

    pub(crate) fn node(label: Symbol, children: Vec<Tree>) -> Self {
        debug_assert_eq!(label.arity(), children.len());
        Tree { label, children }
    }

    pub fn leaf(label: Symbol) -> Result<Self> {
        Tree::new(label, Vec::new())
    }

    /// Parses `f(g(a),b)`, inferring each symbol's arity from its use.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cursor = Cursor::new(text);
        let tree = parse_tree(&mut cursor, &mut |name, arity| Ok(Symbol::new(name, arity)))?;
        if !cursor.at_end() {
            return Err(cursor.unexpected("end of input"));
        }
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for symbol in tree.symbols() {
            if let Some(&first) = arities.get(symbol.name()) {
                if first != symbol.arity() {
                    return Err(Error::InconsistentArity {
                        name: symbol.name().to_string(),
                        first,
                        second: symbol.arity(),
                    });
                }
            }
            arities.insert(symbol.name(), symbol.arity());
        }
        Ok(tree)
    }

    /// Parses a tree whose labels are resolved against `alphabet` by printed
    /// label, so `f1(a,a)` names the position `f1` of a linearized expression.
    pub fn parse_over(alphabet: &RankedAlphabet, text: &str) -> Result<Self> {
        let mut cursor = Cursor::new(text);
        let tree = parse_tree(&mut cursor, &mut |name, arity| {
            let symbol = alphabet.resolve(name)?;
            if symbol.arity() != arity {
                return Err(Error::ArityMismatch {
                    symbol: name.to_string(),
                    expected: symbol.arity(),
                    found: arity,
                });
            }
            Ok(symbol.clone())
        })?;
        if !cursor.at_end() {
            return Err(cursor.unexpected("end of input"));
        }
        Ok(tree)
    }

    pub fn label(&self) -> &Symbol {
        &self.label
    }

    /// `root(f(t1,…,tk)) = f`.
    pub fn root(&self) -> &Symbol {
        &self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// All subtrees in pre-order, the tree itself first.
    pub fn subtrees(&self) -> Subtrees<'_> {
        Subtrees { stack: vec![self] }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.subtrees().map(Tree::label)
    }

    pub fn contains_symbol(&self, symbol: &Symbol) -> bool {
        self.symbols().any(|s| s == symbol)
    }

    pub fn count_symbol(&self, symbol: &Symbol) -> usize {
        self.symbols().filter(|s| *s == symbol).count()
    }

    /// `father(t, f)`, computed by the recursive decomposition over the
    /// children of the root.
    pub fn father_of(&self, f: &Symbol) -> BTreeSet<FatherPair> {
        let mut out = BTreeSet::new();
        self.collect_fathers(f, &mut out);
        out
    }

    fn collect_fathers(&self, f: &Symbol, out: &mut BTreeSet<FatherPair>) {
        for (i, child) in self.children.iter().enumerate() {
            child.collect_fathers(f, out);
            if child.root() == f {
                out.insert(FatherPair::new(self.label.clone(), i + 1));
            }
        }
    }

    /// Relabels every node through an arity-preserving map.
    pub fn map_symbols(&self, phi: &BTreeMap<Symbol, Symbol>) -> Result<Tree> {
        let label = phi.get(&self.label).ok_or_else(|| Error::PartialMorphism {
            symbol: self.label.label(),
        })?;
        if label.arity() != self.label.arity() {
            return Err(Error::NotArityPreserving {
                from: self.label.label(),
                from_arity: self.label.arity(),
                to: label.label(),
                to_arity: label.arity(),
            });
        }
        let children = self
            .children
            .iter()
            .map(|c| c.map_symbols(phi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tree::node(label.clone(), children))
    }

    /// Every tree obtained by replacing each occurrence of the nullary `c`
    /// independently by some member of `candidates`.
    pub fn substitute_all(&self, c: &Symbol, candidates: &BTreeSet<Tree>) -> Result<BTreeSet<Tree>> {
        if c.arity() != 0 {
            return Err(Error::NotNullary { symbol: c.label() });
        }
        Ok(self.substitute(c, candidates).into_iter().collect())
    }

    fn substitute(&self, c: &Symbol, candidates: &BTreeSet<Tree>) -> Vec<Tree> {
        if self.children.is_empty() {
            return if &self.label == c {
                candidates.iter().cloned().collect()
            } else {
                vec![self.clone()]
            };
        }
        let options: Vec<Vec<Tree>> = self
            .children
            .iter()
            .map(|child| child.substitute(c, candidates))
            .collect();
        cartesian(&options)
            .into_iter()
            .map(|children| Tree::node(self.label.clone(), children))
            .collect()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, child) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{child}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub struct Subtrees<'a> {
    stack: Vec<&'a Tree>,
}

impl<'a> Iterator for Subtrees<'a> {
    type Item = &'a Tree;

    fn next(&mut self) -> Option<&'a Tree> {
        let tree = self.stack.pop()?;
        self.stack.extend(tree.children.iter().rev());
        Some(tree)
    }
}

/// Free-function form of [`Tree::root`].
pub fn root_of(t: &Tree) -> &Symbol {
    t.root()
}

/// Free-function form of [`Tree::father_of`].
pub fn father_of_tree(t: &Tree, f: &Symbol) -> BTreeSet<FatherPair> {
    t.father_of(f)
}

/// Free-function form of [`Tree::substitute_all`].
pub fn substitute_all(t: &Tree, c: &Symbol, candidates: &BTreeSet<Tree>) -> Result<BTreeSet<Tree>> {
    t.substitute_all(c, candidates)
}

fn parse_tree(
    cursor: &mut Cursor,
    resolve: &mut dyn FnMut(&str, usize) -> Result<Symbol>,
) -> Result<Tree> {
    cursor.skip_ws();
    let offset = cursor.offset();
    let name = cursor
        .ident()
        .ok_or_else(|| cursor.unexpected("a symbol"))?;
    let mut children = Vec::new();
    if cursor.eat('(') {
        loop {
            children.push(parse_tree(cursor, resolve)?);
            if cursor.eat(',') {
                continue;
            }
            cursor.expect(')')?;
            break;
        }
    }
    let label = resolve(&name, children.len()).map_err(|e| match e {
        Error::UnknownSymbol { symbol } => Error::Syntax {
            offset,
            message: format!("unknown symbol `{symbol}`"),
        },
        e => e,
    })?;
    Ok(Tree::node(label, children))
}

/// Cartesian product of a sequence of option lists, in lexicographic order.
pub(crate) fn cartesian<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::with_capacity(options.len())];
    for slot in options {
        let mut next = Vec::with_capacity(out.len() * slot.len());
        for prefix in &out {
            for item in slot {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn set(trees: &[&str]) -> BTreeSet<Tree> {
        trees.iter().map(|s| t(s)).collect()
    }

    #[test]
    fn root_of_trees() {
        assert_eq!(t("a").root(), &Symbol::nullary("a"));
        assert_eq!(t("f(a,a)").root(), &Symbol::new("f", 2));
    }

    #[test]
    fn father_of_binary_node() {
        let alphabet = RankedAlphabet::from_symbols([Symbol::indexed("f", 2, 1), Symbol::nullary("a")]).unwrap();
        let tree = Tree::parse_over(&alphabet, "f1(a,a)").unwrap();
        let f1 = Symbol::indexed("f", 2, 1);
        let expected: BTreeSet<_> = [FatherPair::new(f1.clone(), 1), FatherPair::new(f1, 2)].into();
        assert_eq!(tree.father_of(&Symbol::nullary("a")), expected);
    }

    #[test]
    fn father_of_root_is_empty() {
        assert!(t("a").father_of(&Symbol::nullary("a")).is_empty());
    }

    #[test]
    fn substitution_examples() {
        let c = Symbol::nullary("c");
        let ab = set(&["a", "b"]);
        assert_eq!(t("c").substitute_all(&c, &ab).unwrap(), ab);
        assert_eq!(
            t("f(c,c)").substitute_all(&c, &ab).unwrap(),
            set(&["f(a,a)", "f(a,b)", "f(b,a)", "f(b,b)"])
        );
        assert_eq!(t("g(b)").substitute_all(&c, &set(&["a"])).unwrap(), set(&["g(b)"]));
    }

    #[test]
    fn substitution_with_no_candidates() {
        let c = Symbol::nullary("c");
        assert!(t("f(c,a)").substitute_all(&c, &BTreeSet::new()).unwrap().is_empty());
        assert_eq!(t("f(a,a)").substitute_all(&c, &BTreeSet::new()).unwrap(), set(&["f(a,a)"]));
    }

    #[test]
    fn substitution_requires_nullary() {
        let err = t("g(a)").substitute_all(&Symbol::new("g", 1), &set(&["a"])).unwrap_err();
        assert!(matches!(err, Error::NotNullary { .. }));
    }

    #[test]
    fn tree_parse_errors() {
        assert!(matches!(Tree::parse("f(a"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(Tree::parse("f(a) b"), Err(Error::Syntax { .. })));
        assert!(matches!(Tree::parse("f(a,g(a,a))"), Ok(_)));
        assert!(matches!(Tree::parse("f(f(a),a)"), Err(Error::InconsistentArity { .. })));
        assert!(matches!(Tree::parse(""), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn parse_over_rejects_foreign_and_misused_symbols() {
        let alphabet = RankedAlphabet::from_symbols([Symbol::new("f", 2), Symbol::nullary("a")]).unwrap();
        assert!(matches!(Tree::parse_over(&alphabet, "f(a,b)"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(Tree::parse_over(&alphabet, "f(a)"), Err(Error::ArityMismatch { .. })));
        assert_eq!(Tree::parse_over(&alphabet, " f( a , a ) ").unwrap(), t("f(a,a)"));
    }

    #[test]
    fn display_round_trips() {
        for s in ["a", "f(g(a),b)", "h(a,b,g(c))"] {
            assert_eq!(t(s).to_string(), s);
        }
    }

    #[test]
    fn alphabet_rejects_conflicts() {
        let mut alphabet = RankedAlphabet::new();
        alphabet.insert(Symbol::new("f", 2)).unwrap();
        alphabet.insert(Symbol::new("f", 2)).unwrap();
        assert!(matches!(alphabet.insert(Symbol::new("f", 1)), Err(Error::InconsistentArity { .. })));
        assert_eq!(alphabet.len(), 1);
    }

    #[test]
    fn size_and_subtrees() {
        let tree = t("f(g(a),b)");
        assert_eq!(tree.size(), 4);
        assert_eq!(tree.depth(), 3);
        let order: Vec<String> = tree.subtrees().map(|s| s.root().to_string()).collect();
        assert_eq!(order, ["f", "g", "a", "b"]);
    }
}
