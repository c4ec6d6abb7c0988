//! Root and Father sets of a linear expression, and the membership
//! characterization they induce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{has_nullary, Expr, LinearExpr};
use crate::trees::{FatherPair, Symbol, Tree};

pub type FatherSet = BTreeSet<FatherPair>;

/// Root set and per-position Father sets, computed in one bottom-up pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionTable {
    positions: BTreeSet<Symbol>,
    root: BTreeSet<Symbol>,
    father: BTreeMap<Symbol, FatherSet>,
}

struct Partial {
    root: BTreeSet<Symbol>,
    father: BTreeMap<Symbol, FatherSet>,
}

impl Partial {
    fn father_of(&self, f: &Symbol) -> FatherSet {
        self.father.get(f).cloned().unwrap_or_default()
    }

    fn merge_father(&mut self, f: &Symbol, pairs: impl IntoIterator<Item = FatherPair>) {
        let mut pairs = pairs.into_iter().peekable();
        if pairs.peek().is_some() {
            self.father.entry(f.clone()).or_default().extend(pairs);
        }
    }
}

fn compute(e: &Expr) -> Partial {
    match e {
        Expr::Apply { symbol, args } => {
            let mut out = Partial {
                root: BTreeSet::from([symbol.clone()]),
                father: BTreeMap::new(),
            };
            for (i, arg) in args.iter().enumerate() {
                let sub = compute(arg);
                for (f, pairs) in sub.father {
                    out.merge_father(&f, pairs);
                }
                for f in &sub.root {
                    out.merge_father(f, [FatherPair::new(symbol.clone(), i + 1)]);
                }
            }
            out
        }
        Expr::Sum(l, r) => {
            let mut out = compute(l);
            let right = compute(r);
            out.root.extend(right.root);
            for (f, pairs) in right.father {
                out.merge_father(&f, pairs);
            }
            out
        }
        Expr::Product {
            left,
            subscript: c,
            right,
        } => {
            let l = compute(left);
            let r = compute(right);
            let root = if has_nullary(left, c) {
                let mut root: BTreeSet<Symbol> = l.root.iter().filter(|s| *s != c).cloned().collect();
                root.extend(r.root.iter().cloned());
                root
            } else {
                l.root.clone()
            };
            let father_c = l.father_of(c);
            let mut out = Partial {
                root,
                father: BTreeMap::new(),
            };
            for (f, pairs) in &l.father {
                if f != c {
                    out.merge_father(f, pairs.iter().cloned());
                }
            }
            for (f, pairs) in &r.father {
                out.merge_father(f, pairs.iter().cloned());
            }
            for f in &r.root {
                out.merge_father(f, father_c.iter().cloned());
            }
            out
        }
        Expr::Star { inner, subscript: c } => {
            let l = compute(inner);
            let father_c = l.father_of(c);
            let mut out = Partial {
                root: l.root.clone(),
                father: l.father.clone(),
            };
            out.root.insert(c.clone());
            for f in &l.root {
                out.merge_father(f, father_c.iter().cloned());
            }
            out
        }
    }
}

impl PositionTable {
    pub fn new(e: &LinearExpr) -> PositionTable {
        let partial = compute(e.expr());
        let father = e
            .positions()
            .iter()
            .map(|p| (p.clone(), partial.father.get(p).cloned().unwrap_or_default()))
            .collect();
        PositionTable {
            positions: e.positions().clone(),
            root: partial.root,
            father,
        }
    }

    pub fn positions(&self) -> &BTreeSet<Symbol> {
        &self.positions
    }

    pub fn root_set(&self) -> &BTreeSet<Symbol> {
        &self.root
    }

    pub fn father_set(&self, f: &Symbol) -> Result<&FatherSet> {
        self.father.get(f).ok_or_else(|| Error::UnknownPosition { symbol: f.label() })
    }

    /// Father set with `($,1)` added when `f` is a root.
    pub fn augmented_father_set(&self, f: &Symbol) -> Result<FatherSet> {
        let mut set = self.father_set(f)?.clone();
        if self.root.contains(f) {
            set.insert(FatherPair::dollar());
        }
        Ok(set)
    }

    pub fn father_sets(&self) -> impl Iterator<Item = (&Symbol, &FatherSet)> {
        self.father.iter()
    }

    /// Replaces the Father set of `f`. Used to inject faults when testing
    /// the cross-validation harness.
    pub fn override_father_set(&mut self, f: &Symbol, pairs: FatherSet) -> Result<()> {
        let slot = self
            .father
            .get_mut(f)
            .ok_or_else(|| Error::UnknownPosition { symbol: f.label() })?;
        *slot = pairs;
        Ok(())
    }

    pub fn override_root_set(&mut self, root: BTreeSet<Symbol>) {
        self.root = root;
    }

    fn check_symbols(&self, t: &Tree) -> Result<()> {
        match t.symbols().find(|s| !self.positions.contains(*s)) {
            Some(s) => Err(Error::UnknownPosition { symbol: s.label() }),
            None => Ok(()),
        }
    }

    /// Every edge `f(…, t_i, …)` of `t` satisfies `(f,i) ∈ Father(root(t_i))`.
    pub fn satisfies_p(&self, t: &Tree) -> Result<bool> {
        self.check_symbols(t)?;
        Ok(t.subtrees().all(|node| {
            node.children().iter().enumerate().all(|(i, child)| {
                self.father[child.root()].contains(&FatherPair::new(node.root().clone(), i + 1))
            })
        }))
    }

    pub fn membership_by_characterization(&self, t: &Tree) -> Result<bool> {
        Ok(self.satisfies_p(t)? && self.root.contains(t.root()))
    }

    /// `{"father": {symbol: [[parent, index], …]}, "positions": […], "root": […]}`.
    pub fn to_json(&self) -> Value {
        let father: serde_json::Map<String, Value> = self
            .father
            .iter()
            .map(|(f, pairs)| {
                let pairs: Vec<Value> = pairs.iter().map(|p| json!([p.parent.label(), p.index])).collect();
                (f.label(), Value::Array(pairs))
            })
            .collect();
        json!({
            "father": father,
            "positions": self.positions.iter().map(Symbol::label).collect::<Vec<_>>(),
            "root": self.root.iter().map(Symbol::label).collect::<Vec<_>>(),
        })
    }

    /// Aligned two-column listing, one line per position.
    pub fn to_text(&self) -> String {
        let width = self.positions.iter().map(|p| p.label().len()).max().unwrap_or(0).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {}", "Root", braced(self.root.iter().map(Symbol::label)));
        for (f, pairs) in &self.father {
            let _ = writeln!(out, "{:<width$}  {}", f.label(), braced(pairs.iter().map(|p| p.to_string())));
        }
        out
    }
}

fn braced(items: impl Iterator<Item = String>) -> String {
    format!("{{{}}}", items.collect::<Vec<_>>().join(","))
}

pub fn root_set(e: &LinearExpr) -> BTreeSet<Symbol> {
    PositionTable::new(e).root.clone()
}

pub fn father_set(e: &LinearExpr, f: &Symbol) -> Result<FatherSet> {
    PositionTable::new(e).father_set(f).cloned()
}

pub fn augmented_father_set(e: &LinearExpr, f: &Symbol) -> Result<FatherSet> {
    PositionTable::new(e).augmented_father_set(f)
}

pub fn satisfies_p(e: &LinearExpr, t: &Tree) -> Result<bool> {
    PositionTable::new(e).satisfies_p(t)
}

pub fn membership_by_characterization(e: &LinearExpr, t: &Tree) -> Result<bool> {
    PositionTable::new(e).membership_by_characterization(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::linearize;

    fn running() -> LinearExpr {
        linearize(&Expr::parse("(f(a,a)+g(b))*a.bf(g(a),b)").unwrap()).unwrap()
    }

    fn sym(e: &LinearExpr, label: &str) -> Symbol {
        e.alphabet().resolve(label).unwrap().clone()
    }

    fn pairs(e: &LinearExpr, entries: &[(&str, usize)]) -> FatherSet {
        entries.iter()
            .map(|(p, i)| {
                if *p == "$" {
                    FatherPair::dollar()
                } else {
                    FatherPair::new(sym(e, p), *i)
                }
            })
            .collect()
    }

    fn tree(e: &LinearExpr, text: &str) -> Tree {
        Tree::parse_over(&e.alphabet(), text).unwrap()
    }

    #[test]
    fn running_example_table() {
        let e = running();
        let table = PositionTable::new(&e);
        let roots: Vec<String> = table.root_set().iter().map(Symbol::label).collect();
        assert_eq!(roots, ["a", "f1", "g2"]);
        let expected = [
            ("f1", vec![("f1", 1), ("f1", 2)]),
            ("g2", vec![("f1", 1), ("f1", 2)]),
            ("a", vec![("f1", 1), ("f1", 2), ("g4", 1)]),
            ("b", vec![("f3", 2)]),
            ("f3", vec![("g2", 1)]),
            ("g4", vec![("f3", 1)]),
        ];
        for (f, entries) in expected {
            assert_eq!(table.father_set(&sym(&e, f)).unwrap(), &pairs(&e, &entries), "Father of {f}");
        }
    }

    #[test]
    fn augmented_sets() {
        let e = running();
        let table = PositionTable::new(&e);
        assert_eq!(
            table.augmented_father_set(&sym(&e, "f1")).unwrap(),
            pairs(&e, &[("f1", 1), ("f1", 2), ("$", 1)])
        );
        assert_eq!(table.augmented_father_set(&sym(&e, "b")).unwrap(), pairs(&e, &[("f3", 2)]));
        assert_eq!(
            table.augmented_father_set(&sym(&e, "a")).unwrap(),
            pairs(&e, &[("f1", 1), ("f1", 2), ("g4", 1), ("$", 1)])
        );
    }

    #[test]
    fn small_cases() {
        let e = LinearExpr::from_linear(Expr::parse("f(a,a)").unwrap()).unwrap();
        assert_eq!(root_set(&e), BTreeSet::from([Symbol::new("f", 2)]));
        let e = LinearExpr::from_linear(Expr::parse("g(b)*b").unwrap()).unwrap();
        assert_eq!(root_set(&e), BTreeSet::from([Symbol::new("g", 1), Symbol::nullary("b")]));
        let e = LinearExpr::from_linear(Expr::parse("g(a)").unwrap()).unwrap();
        assert_eq!(
            father_set(&e, &Symbol::nullary("a")).unwrap(),
            BTreeSet::from([FatherPair::new(Symbol::new("g", 1), 1)])
        );
    }

    #[test]
    fn product_drops_left_father_of_subscript() {
        // In f(c,a).c g(b), no `c` survives the substitution.
        let e = LinearExpr::from_linear(Expr::parse("f(c,a).cg(b)").unwrap()).unwrap();
        let table = PositionTable::new(&e);
        assert!(table.father_set(&Symbol::nullary("c")).unwrap().is_empty());
        assert_eq!(
            table.father_set(&Symbol::new("g", 1)).unwrap(),
            &BTreeSet::from([FatherPair::new(Symbol::new("f", 2), 1)])
        );
    }

    #[test]
    fn unknown_position_is_an_error() {
        let e = running();
        assert!(matches!(
            father_set(&e, &Symbol::new("f", 2)),
            Err(Error::UnknownPosition { .. })
        ));
        let foreign = Tree::parse("f(a,a)").unwrap();
        assert!(matches!(satisfies_p(&e, &foreign), Err(Error::UnknownPosition { .. })));
    }

    #[test]
    fn property_p_examples() {
        let e = running();
        assert!(satisfies_p(&e, &tree(&e, "f1(a,a)")).unwrap());
        assert!(satisfies_p(&e, &tree(&e, "a")).unwrap());
        assert!(!satisfies_p(&e, &tree(&e, "f3(b,b)")).unwrap());
        assert!(membership_by_characterization(&e, &tree(&e, "g2(f3(g4(a),b))")).unwrap());
        assert!(!membership_by_characterization(&e, &tree(&e, "b")).unwrap());
    }

    #[test]
    fn text_and_json_listing() {
        let table = PositionTable::new(&running());
        let text = table.to_text();
        assert!(text.starts_with("Root  {a,f1,g2}\n"));
        assert!(text.contains("a     {(f1,1),(f1,2),(g4,1)}\n"));
        let json = table.to_json();
        assert_eq!(json["father"]["b"], json!([["f3", 2]]));
        assert_eq!(json["root"], json!(["a", "f1", "g2"]));
    }
}
