//! Regular tree expressions: AST, concrete syntax, validation and linearization.
//!
//! Concrete syntax:
//!
//! ```text
//! sum     := product ('+' product)*
//! product := postfix ('.' SUB postfix)*
//! postfix := atom ('*' SUB)*
//! atom    := '(' sum ')' | IDENT ( '(' sum (',' sum)* ')' )?
//! SUB     := LETTER | '{' IDENT '}'
//! ```
//!
//! A subscript is a single letter unless braced, so `(f(a,a)+g(b))*a.bf(g(a),b)`
//! reads as `((f(a,a)+g(b))*a) .b f(g(a),b)`. Arities are inferred from use.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::syntax::Cursor;
use crate::trees::{RankedAlphabet, Symbol, Tree};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Apply { symbol: Symbol, args: Vec<Expr> },
    Sum(Box<Expr>, Box<Expr>),
    /// `left ·c right`: every `c` in a tree of `left` is replaced independently
    /// by a tree of `right`.
    Product {
        left: Box<Expr>,
        subscript: Symbol,
        right: Box<Expr>,
    },
    /// `inner *c`.
    Star { inner: Box<Expr>, subscript: Symbol },
}

impl Expr {
    pub fn apply(symbol: Symbol, args: Vec<Expr>) -> Expr {
        Expr::Apply { symbol, args }
    }

    pub fn leaf(name: &str) -> Expr {
        Expr::apply(Symbol::nullary(name), Vec::new())
    }

    pub fn sum(left: Expr, right: Expr) -> Expr {
        Expr::Sum(Box::new(left), Box::new(right))
    }

    pub fn product(left: Expr, subscript: Symbol, right: Expr) -> Expr {
        Expr::Product {
            left: Box::new(left),
            subscript,
            right: Box::new(right),
        }
    }

    pub fn star(inner: Expr, subscript: Symbol) -> Expr {
        Expr::Star {
            inner: Box::new(inner),
            subscript,
        }
    }

    pub fn parse(text: &str) -> Result<Expr> {
        let mut parser = Parser {
            cursor: Cursor::new(text),
        };
        let expr = parser.sum()?;
        if !parser.cursor.at_end() {
            return Err(parser.cursor.unexpected("an operator or end of input"));
        }
        check_arities(&expr)?;
        Ok(expr)
    }

    /// Every symbol that occurs, subscripts included.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Apply { symbol, .. } => {
                out.insert(symbol.clone());
            }
            Expr::Product { subscript, .. } | Expr::Star { subscript, .. } => {
                out.insert(subscript.clone());
            }
            Expr::Sum(..) => {}
        });
        out
    }

    pub fn alphabet(&self) -> Result<RankedAlphabet> {
        RankedAlphabet::from_symbols(self.symbols())
    }

    /// Number of occurrences of symbols of arity ≥ 1.
    pub fn position_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if let Expr::Apply { symbol, .. } = e {
                if symbol.arity() > 0 {
                    n += 1;
                }
            }
        });
        n
    }

    /// Pre-order walk over every sub-expression.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Apply { args, .. } => args.iter().for_each(|a| a.visit(f)),
            Expr::Sum(l, r) | Expr::Product { left: l, right: r, .. } => {
                l.visit(f);
                r.visit(f);
            }
            Expr::Star { inner, .. } => inner.visit(f),
        }
    }

    /// Rebuilds the expression with every symbol passed through `map`.
    pub fn map_symbols(&self, map: &impl Fn(&Symbol) -> Symbol) -> Expr {
        match self {
            Expr::Apply { symbol, args } => Expr::Apply {
                symbol: map(symbol),
                args: args.iter().map(|a| a.map_symbols(map)).collect(),
            },
            Expr::Sum(l, r) => Expr::sum(l.map_symbols(map), r.map_symbols(map)),
            Expr::Product {
                left,
                subscript,
                right,
            } => Expr::product(left.map_symbols(map), map(subscript), right.map_symbols(map)),
            Expr::Star { inner, subscript } => Expr::star(inner.map_symbols(map), map(subscript)),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Expr::Apply { .. } => "apply",
            Expr::Sum(..) => "sum",
            Expr::Product { .. } => "product",
            Expr::Star { .. } => "star",
        }
    }

    /// JSON AST: `{"kind": ..., ...}` with children nested.
    pub fn to_json(&self) -> Value {
        match self {
            Expr::Apply { symbol, args } => json!({
                "kind": "apply",
                "symbol": symbol.label(),
                "arity": symbol.arity(),
                "args": args.iter().map(Expr::to_json).collect::<Vec<_>>(),
            }),
            Expr::Sum(l, r) => json!({
                "kind": "sum",
                "left": l.to_json(),
                "right": r.to_json(),
            }),
            Expr::Product {
                left,
                subscript,
                right,
            } => json!({
                "kind": "product",
                "subscript": subscript.label(),
                "left": left.to_json(),
                "right": right.to_json(),
            }),
            Expr::Star { inner, subscript } => json!({
                "kind": "star",
                "subscript": subscript.label(),
                "inner": inner.to_json(),
            }),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Sum(..) => 0,
            Expr::Product { .. } => 1,
            Expr::Star { .. } => 2,
            Expr::Apply { .. } => 3,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            Expr::Apply { symbol, args } => {
                write!(f, "{symbol}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, arg) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        arg.fmt_at(0, f)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Sum(l, r) => {
                l.fmt_at(0, f)?;
                f.write_str("+")?;
                r.fmt_at(1, f)
            }
            Expr::Product {
                left,
                subscript,
                right,
            } => {
                left.fmt_at(1, f)?;
                write!(f, ".{}", Subscript(subscript))?;
                right.fmt_at(2, f)
            }
            Expr::Star { inner, subscript } => {
                inner.fmt_at(2, f)?;
                write!(f, "*{}", Subscript(subscript))
            }
        }
    }
}

struct Subscript<'a>(&'a Symbol);

impl fmt::Display for Subscript<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.0.label();
        let mut chars = label.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_alphabetic() => f.write_str(&label),
            _ => write!(f, "{{{label}}}"),
        }
    }
}

/// Prints in the concrete syntax accepted by [`Expr::parse`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct Parser {
    cursor: Cursor,
}

impl Parser {
    fn sum(&mut self) -> Result<Expr> {
        let mut left = self.product()?;
        while self.cursor.eat('+') {
            let right = self.product()?;
            left = Expr::sum(left, right);
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut left = self.postfix()?;
        while self.cursor.eat('.') {
            let subscript = self.subscript()?;
            let right = self.postfix()?;
            left = Expr::product(left, subscript, right);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut inner = self.atom()?;
        while self.cursor.eat('*') {
            let subscript = self.subscript()?;
            inner = Expr::star(inner, subscript);
        }
        Ok(inner)
    }

    fn atom(&mut self) -> Result<Expr> {
        if self.cursor.eat('(') {
            let inner = self.sum()?;
            self.cursor.expect(')')?;
            return Ok(inner);
        }
        let name = self
            .cursor
            .ident()
            .ok_or_else(|| self.cursor.unexpected("a symbol or `(`"))?;
        let mut args = Vec::new();
        if self.cursor.eat('(') {
            loop {
                args.push(self.sum()?);
                if self.cursor.eat(',') {
                    continue;
                }
                self.cursor.expect(')')?;
                break;
            }
        }
        Ok(Expr::apply(Symbol::new(&name, args.len()), args))
    }

    fn subscript(&mut self) -> Result<Symbol> {
        if self.cursor.eat('{') {
            let name = self
                .cursor
                .ident()
                .ok_or_else(|| self.cursor.unexpected("a subscript symbol"))?;
            self.cursor.expect('}')?;
            return Ok(Symbol::nullary(&name));
        }
        match self.cursor.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                self.cursor.bump();
                Ok(Symbol::nullary(&c.to_string()))
            }
            _ => Err(self.cursor.unexpected("a subscript letter or `{name}`")),
        }
    }
}

fn check_arities(expr: &Expr) -> Result<()> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for symbol in expr.symbols() {
        let label = symbol.label();
        if let Some(&first) = seen.get(&label) {
            if first != symbol.arity() {
                let subscripts = subscripts(expr);
                if subscripts.iter().any(|s| s.label() == label) {
                    return Err(Error::NotNullary { symbol: label });
                }
                return Err(Error::InconsistentArity {
                    name: label,
                    first,
                    second: symbol.arity(),
                });
            }
        }
        seen.insert(label, symbol.arity());
    }
    Ok(())
}

fn subscripts(expr: &Expr) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    expr.visit(&mut |e| {
        if let Expr::Product { subscript, .. } | Expr::Star { subscript, .. } = e {
            out.insert(subscript.clone());
        }
    });
    out
}

/// A well-formedness problem reported by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    InconsistentArity {
        name: String,
        arities: Vec<usize>,
    },
    SubscriptNotNullary {
        symbol: String,
    },
    /// `left ·c right` where `c` does not occur in `left` at all.
    SubscriptAbsent {
        subscript: String,
    },
    /// `left ·c right` where `c` occurs in `left` but in no tree of its language.
    SubscriptUnreachable {
        subscript: String,
    },
    ReservedSymbol,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ArityMismatch {
                symbol,
                expected,
                found,
            } => write!(f, "`{symbol}` of arity {expected} applied to {found} argument(s)"),
            Violation::InconsistentArity { name, arities } => {
                write!(f, "`{name}` used with arities {arities:?}")
            }
            Violation::SubscriptNotNullary { symbol } => {
                write!(f, "subscript `{symbol}` is not nullary")
            }
            Violation::SubscriptAbsent { subscript } => {
                write!(f, "`{subscript}` is absent from the left operand of its product")
            }
            Violation::SubscriptUnreachable { subscript } => write!(
                f,
                "`{subscript}` occurs in no tree denoted by the left operand of its product"
            ),
            Violation::ReservedSymbol => f.write_str("`$` is reserved"),
        }
    }
}

/// Reports every well-formedness problem; an empty list means valid.
pub fn validate(e: &Expr) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut arities: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut reserved = false;
    e.visit(&mut |node| {
        let mut note = |s: &Symbol| {
            reserved |= s.is_dollar();
            arities.entry(s.label()).or_default().insert(s.arity());
        };
        match node {
            Expr::Apply { symbol, args } => {
                note(symbol);
                if symbol.arity() != args.len() {
                    out.push(Violation::ArityMismatch {
                        symbol: symbol.label(),
                        expected: symbol.arity(),
                        found: args.len(),
                    });
                }
            }
            Expr::Sum(..) => {}
            Expr::Product {
                left, subscript, ..
            } => {
                note(subscript);
                if subscript.arity() != 0 {
                    out.push(Violation::SubscriptNotNullary {
                        symbol: subscript.label(),
                    });
                } else if !left.symbols().contains(subscript) {
                    out.push(Violation::SubscriptAbsent {
                        subscript: subscript.label(),
                    });
                } else if !nullary_occurs(left, subscript) {
                    out.push(Violation::SubscriptUnreachable {
                        subscript: subscript.label(),
                    });
                }
            }
            Expr::Star { subscript, .. } => {
                note(subscript);
                if subscript.arity() != 0 {
                    out.push(Violation::SubscriptNotNullary {
                        symbol: subscript.label(),
                    });
                }
            }
        }
    });
    for (name, set) in arities {
        if set.len() > 1 {
            out.push(Violation::InconsistentArity {
                name,
                arities: set.into_iter().collect(),
            });
        }
    }
    if reserved {
        out.push(Violation::ReservedSymbol);
    }
    out
}

pub fn ensure_valid(e: &Expr) -> Result<()> {
    let violations = validate(e);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidExpression(violations))
    }
}

/// True iff every symbol of arity ≥ 1 occurs at most once.
pub fn is_linear(e: &Expr) -> bool {
    first_repeated(e).is_none()
}

fn first_repeated(e: &Expr) -> Option<Symbol> {
    let mut seen = BTreeSet::new();
    let mut repeated = None;
    e.visit(&mut |node| {
        if let Expr::Apply { symbol, .. } = node {
            if symbol.arity() > 0 && !seen.insert(symbol.clone()) && repeated.is_none() {
                repeated = Some(symbol.clone());
            }
        }
    });
    repeated
}

/// Decides `c ∈ L(e)` syntactically.
pub fn contains_nullary(e: &Expr, c: &Symbol) -> Result<bool> {
    if c.arity() != 0 {
        return Err(Error::NotNullary { symbol: c.label() });
    }
    Ok(has_nullary(e, c))
}

pub(crate) fn has_nullary(e: &Expr, c: &Symbol) -> bool {
    match e {
        Expr::Apply { symbol, args } => args.is_empty() && symbol == c,
        Expr::Sum(l, r) => has_nullary(l, c) || has_nullary(r, c),
        Expr::Product {
            left,
            subscript,
            right,
        } => (c != subscript && has_nullary(left, c)) || (has_nullary(left, subscript) && has_nullary(right, c)),
        Expr::Star { inner, subscript } => c == subscript || has_nullary(inner, c),
    }
}

/// True iff some tree of `L(e)` has a leaf labelled `c`.
pub fn nullary_occurs(e: &Expr, c: &Symbol) -> bool {
    match e {
        Expr::Apply { symbol, args } => {
            if args.is_empty() {
                symbol == c
            } else {
                args.iter().any(|a| nullary_occurs(a, c))
            }
        }
        Expr::Sum(l, r) => nullary_occurs(l, c) || nullary_occurs(r, c),
        Expr::Product {
            left,
            subscript,
            right,
        } => {
            (c != subscript && nullary_occurs(left, c))
                || (nullary_occurs(left, subscript) && nullary_occurs(right, c))
        }
        Expr::Star { inner, subscript } => c == subscript || nullary_occurs(inner, c),
    }
}

/// A linear expression together with its positions and the delinearization
/// morphism `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExpr {
    expr: Expr,
    positions: BTreeSet<Symbol>,
    delinearizer: BTreeMap<Symbol, Symbol>,
}

impl LinearExpr {
    /// Wraps an expression that is already linear; `h` is the identity.
    pub fn from_linear(expr: Expr) -> Result<LinearExpr> {
        ensure_valid(&expr)?;
        if let Some(symbol) = first_repeated(&expr) {
            return Err(Error::NonLinear {
                symbol: symbol.label(),
            });
        }
        let positions = expr.symbols();
        let delinearizer = positions.iter().map(|s| (s.clone(), s.clone())).collect();
        Ok(LinearExpr {
            expr,
            positions,
            delinearizer,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn positions(&self) -> &BTreeSet<Symbol> {
        &self.positions
    }

    pub fn is_position(&self, symbol: &Symbol) -> bool {
        self.positions.contains(symbol)
    }

    pub fn delinearizer(&self) -> &BTreeMap<Symbol, Symbol> {
        &self.delinearizer
    }

    pub fn alphabet(&self) -> RankedAlphabet {
        RankedAlphabet::from_symbols(self.positions.iter().cloned())
            .expect("positions have distinct labels")
    }

    /// `h(e)`: the original, unindexed expression.
    pub fn delinearize(&self) -> Expr {
        self.expr.map_symbols(&|s| self.delinearizer[s].clone())
    }

    pub fn delinearize_tree(&self, t: &Tree) -> Result<Tree> {
        t.map_symbols(&self.delinearizer)
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.expr, f)
    }
}

/// Indexes each occurrence of a symbol of arity ≥ 1 by its 1-based rank in a
/// left-to-right pre-order reading; nullary symbols stay unindexed.
pub fn linearize(e: &Expr) -> Result<LinearExpr> {
    ensure_valid(e)?;
    let mut counter = 0u32;
    let expr = index_occurrences(e, &mut counter);
    let positions = expr.symbols();
    let delinearizer = positions.iter().map(|s| (s.clone(), s.unindexed())).collect();
    Ok(LinearExpr {
        expr,
        positions,
        delinearizer,
    })
}

fn index_occurrences(e: &Expr, counter: &mut u32) -> Expr {
    match e {
        Expr::Apply { symbol, args } => {
            let symbol = if symbol.arity() > 0 {
                *counter += 1;
                symbol.with_index(*counter)
            } else {
                symbol.clone()
            };
            let args = args.iter().map(|a| index_occurrences(a, counter)).collect();
            Expr::Apply { symbol, args }
        }
        Expr::Sum(l, r) => {
            let l = index_occurrences(l, counter);
            Expr::sum(l, index_occurrences(r, counter))
        }
        Expr::Product {
            left,
            subscript,
            right,
        } => {
            let l = index_occurrences(left, counter);
            Expr::product(l, subscript.clone(), index_occurrences(right, counter))
        }
        Expr::Star { inner, subscript } => Expr::star(index_occurrences(inner, counter), subscript.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "(f(a,a)+g(b))*a.bf(g(a),b)";

    fn f(args: Vec<Expr>) -> Expr {
        Expr::apply(Symbol::new("f", 2), args)
    }

    fn g(arg: Expr) -> Expr {
        Expr::apply(Symbol::new("g", 1), vec![arg])
    }

    fn a() -> Expr {
        Expr::leaf("a")
    }

    fn b() -> Expr {
        Expr::leaf("b")
    }

    #[test]
    fn parses_running_example() {
        let expected = Expr::product(
            Expr::star(Expr::sum(f(vec![a(), a()]), g(b())), Symbol::nullary("a")),
            Symbol::nullary("b"),
            f(vec![g(a()), b()]),
        );
        assert_eq!(Expr::parse(RUNNING).unwrap(), expected);
    }

    #[test]
    fn parses_single_symbol() {
        assert_eq!(Expr::parse("a").unwrap(), a());
    }

    #[test]
    fn reports_unbalanced_parenthesis_offset() {
        match Expr::parse("f(a") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("a+b.ac*c").unwrap();
        let expected = Expr::sum(
            a(),
            Expr::product(b(), Symbol::nullary("a"), Expr::star(Expr::leaf("c"), Symbol::nullary("c"))),
        );
        assert_eq!(e, expected);
        let e = Expr::parse("f(a,b).aa.bb").unwrap();
        assert!(matches!(e, Expr::Product { ref left, .. } if matches!(**left, Expr::Product { .. })));
    }

    #[test]
    fn braced_subscripts() {
        let e = Expr::parse("g(x1)*{x1}").unwrap();
        assert_eq!(e, Expr::star(Expr::apply(Symbol::new("g", 1), vec![Expr::leaf("x1")]), Symbol::nullary("x1")));
        assert_eq!(e.to_string(), "g(x1)*{x1}");
    }

    #[test]
    fn parse_rejects_arity_conflicts() {
        assert!(matches!(Expr::parse("f(a)+f(a,a)"), Err(Error::InconsistentArity { .. })));
        assert!(matches!(Expr::parse("a(b)*a"), Err(Error::NotNullary { .. })));
        assert!(matches!(Expr::parse("a+"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(Expr::parse("a*"), Err(Error::Syntax { .. })));
        assert!(matches!(Expr::parse("$"), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn display_round_trip_on_running_example() {
        let e = Expr::parse(RUNNING).unwrap();
        assert_eq!(e.to_string(), RUNNING);
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&Expr::parse(RUNNING).unwrap()).is_empty());
        let bad = Expr::product(a(), Symbol::nullary("b"), b());
        assert_eq!(
            validate(&bad),
            vec![Violation::SubscriptAbsent {
                subscript: "b".into()
            }]
        );
        let bad_arity = Expr::apply(Symbol::new("f", 2), vec![a()]);
        assert!(matches!(validate(&bad_arity).as_slice(), [Violation::ArityMismatch { expected: 2, found: 1, .. }]));
    }

    #[test]
    fn validate_rejects_consumed_subscript() {
        // The inner product consumes every `c`, so none is left for the outer one.
        let inner = Expr::product(f(vec![Expr::leaf("c"), a()]), Symbol::nullary("c"), a());
        let e = Expr::product(inner, Symbol::nullary("c"), g(b()));
        assert_eq!(
            validate(&e),
            vec![Violation::SubscriptUnreachable {
                subscript: "c".into()
            }]
        );
    }

    #[test]
    fn validate_reports_reserved_and_inconsistent() {
        let e = Expr::sum(Expr::apply(Symbol::dollar(), vec![a()]), Expr::apply(Symbol::new("$", 2), vec![a(), a()]));
        let v = validate(&e);
        assert!(v.contains(&Violation::ReservedSymbol));
        assert!(v.iter().any(|x| matches!(x, Violation::InconsistentArity { .. })));
    }

    #[test]
    fn linearizes_running_example() {
        let lin = linearize(&Expr::parse(RUNNING).unwrap()).unwrap();
        assert_eq!(lin.to_string(), "(f1(a,a)+g2(b))*a.bf3(g4(a),b)");
        let labels: Vec<String> = lin.positions().iter().map(Symbol::label).collect();
        assert_eq!(labels, ["a", "b", "f1", "f3", "g2", "g4"]);
        assert!(is_linear(lin.expr()));
        assert_eq!(lin.delinearize(), Expr::parse(RUNNING).unwrap());
    }

    #[test]
    fn linearize_leaf() {
        let lin = linearize(&a()).unwrap();
        assert_eq!(lin.expr(), &a());
        assert_eq!(lin.positions().len(), 1);
    }

    #[test]
    fn star_subscript_is_a_position() {
        let lin = linearize(&Expr::parse("g(b)*a").unwrap()).unwrap();
        assert!(lin.is_position(&Symbol::nullary("a")));
    }

    #[test]
    fn linearity() {
        assert!(is_linear(&f(vec![a(), a()])));
        assert!(!is_linear(&Expr::sum(g(a()), g(b()))));
        let err = LinearExpr::from_linear(Expr::sum(g(a()), g(b()))).unwrap_err();
        assert!(matches!(err, Error::NonLinear { .. }));
    }

    #[test]
    fn contains_nullary_examples() {
        let a_sym = Symbol::nullary("a");
        let star = Expr::star(Expr::apply(Symbol::indexed("f", 2, 1), vec![a(), a()]), a_sym.clone());
        assert!(contains_nullary(&star, &a_sym).unwrap());
        let lin = linearize(&Expr::parse(RUNNING).unwrap()).unwrap();
        assert!(contains_nullary(lin.expr(), &a_sym).unwrap());
        assert!(!contains_nullary(&f(vec![a(), a()]), &a_sym).unwrap());
        assert!(matches!(
            contains_nullary(&a(), &Symbol::new("g", 1)),
            Err(Error::NotNullary { .. })
        ));
    }

    #[test]
    fn json_ast_shape() {
        let v = Expr::parse("g(a)*a").unwrap().to_json();
        assert_eq!(v["kind"], "star");
        assert_eq!(v["subscript"], "a");
        assert_eq!(v["inner"]["kind"], "apply");
        assert_eq!(v["inner"]["args"][0]["symbol"], "a");
    }
}
