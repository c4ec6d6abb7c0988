//! JSON, DOT and plain-text renderings of automata.
//!
//! Everything is ordered by state name and symbol label so that output is
//! byte-stable across runs.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::automaton::{StateSet, TreeAutomaton};
use crate::compressed::CompressedTreeAutomaton;
use crate::error::{Error, Result};
use crate::trees::{RankedAlphabet, Symbol};

fn alphabet_json(alphabet: &RankedAlphabet) -> Value {
    let map: Map<String, Value> = alphabet.iter().map(|s| (s.label(), json!(s.arity()))).collect();
    Value::Object(map)
}

fn names(set: &StateSet, name: impl Fn(crate::automaton::StateId) -> String) -> Vec<String> {
    let mut out: Vec<String> = set.iter().map(|&q| name(q)).collect();
    out.sort();
    out
}

struct PlainRow {
    symbol: String,
    origins: Vec<String>,
    target: String,
}

fn plain_rows(a: &TreeAutomaton) -> Vec<PlainRow> {
    let mut rows: Vec<PlainRow> = a
        .transitions()
        .iter()
        .map(|t| PlainRow {
            symbol: t.symbol.label(),
            origins: t.origins.iter().map(|&q| a.state_name(q).to_string()).collect(),
            target: a.state_name(t.target).to_string(),
        })
        .collect();
    rows.sort_by(|x, y| (&x.symbol, &x.origins, &x.target).cmp(&(&y.symbol, &y.origins, &y.target)));
    rows
}

struct CompressedRow {
    symbol: String,
    origin_sets: Vec<Vec<String>>,
    targets: Vec<String>,
}

fn compressed_rows(c: &CompressedTreeAutomaton) -> Vec<CompressedRow> {
    let name = |q| c.state_name(q).to_string();
    let mut rows: Vec<CompressedRow> = c
        .transitions()
        .iter()
        .map(|t| CompressedRow {
            symbol: t.symbol.label(),
            origin_sets: t.origin_sets.iter().map(|s| names(s, name)).collect(),
            targets: names(&t.targets, name),
        })
        .collect();
    rows.sort_by(|x, y| (&x.symbol, &x.origin_sets, &x.targets).cmp(&(&y.symbol, &y.origin_sets, &y.targets)));
    rows
}

fn state_list(count: usize, name: impl Fn(crate::automaton::StateId) -> String) -> Vec<String> {
    (0..count as u32).map(|i| name(crate::automaton::StateId(i))).collect()
}

/// `{"alphabet": {name: arity}, "finals": [..], "states": [..],
/// "transitions": [{"origins": [..], "symbol": s, "target": q}]}`.
pub fn automaton_json(a: &TreeAutomaton) -> Value {
    let name = |q| a.state_name(q).to_string();
    let transitions: Vec<Value> = plain_rows(a)
        .into_iter()
        .map(|r| json!({"origins": r.origins, "symbol": r.symbol, "target": r.target}))
        .collect();
    json!({
        "alphabet": alphabet_json(a.alphabet()),
        "finals": names(a.finals(), name),
        "states": state_list(a.state_count(), name),
        "transitions": transitions,
    })
}

/// Same layout as [`automaton_json`], with `originSets` and `targets` arrays.
pub fn compressed_json(c: &CompressedTreeAutomaton) -> Value {
    let name = |q| c.state_name(q).to_string();
    let transitions: Vec<Value> = compressed_rows(c)
        .into_iter()
        .map(|r| json!({"originSets": r.origin_sets, "symbol": r.symbol, "targets": r.targets}))
        .collect();
    json!({
        "alphabet": alphabet_json(c.alphabet()),
        "finals": names(c.finals(), name),
        "states": state_list(c.state_count(), name),
        "transitions": transitions,
    })
}

fn malformed(what: &str) -> Error {
    Error::Malformed(what.to_string())
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| malformed(what))?
        .iter()
        .map(|s| s.as_str().map(String::from).ok_or_else(|| malformed(what)))
        .collect()
}

fn parse_alphabet(v: &Value) -> Result<RankedAlphabet> {
    let map = v["alphabet"].as_object().ok_or_else(|| malformed("`alphabet` must be an object"))?;
    let mut alphabet = RankedAlphabet::new();
    for (label, arity) in map {
        let arity = arity.as_u64().ok_or_else(|| malformed("arities must be non-negative integers"))?;
        alphabet.insert(symbol_from_label(label, arity as usize))?;
    }
    Ok(alphabet)
}

/// `f12` of positive arity reads back as `f` with index 12.
fn symbol_from_label(label: &str, arity: usize) -> Symbol {
    let digits = label.len() - label.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (name, index) = label.split_at(label.len() - digits);
    match (arity, index.parse::<u32>()) {
        (1.., Ok(i)) if !name.is_empty() && !index.starts_with('0') => Symbol::indexed(name, arity, i),
        _ => Symbol::new(label, arity),
    }
}

fn resolve(alphabet: &RankedAlphabet, v: &Value) -> Result<Symbol> {
    let label = v.as_str().ok_or_else(|| malformed("`symbol` must be a string"))?;
    Ok(alphabet.resolve(label)?.clone())
}

pub fn automaton_from_json(v: &Value) -> Result<TreeAutomaton> {
    let alphabet = parse_alphabet(v)?;
    let mut b = TreeAutomaton::builder(alphabet.clone());
    for s in strings(&v["states"], "`states` must be an array of strings")? {
        b.state(s);
    }
    for s in strings(&v["finals"], "`finals` must be an array of strings")? {
        b.final_state(s);
    }
    let transitions = v["transitions"].as_array().ok_or_else(|| malformed("`transitions` must be an array"))?;
    for t in transitions {
        let origins = strings(&t["origins"], "`origins` must be an array of strings")?;
        let target = t["target"].as_str().ok_or_else(|| malformed("`target` must be a string"))?;
        b.transition(&origins, resolve(&alphabet, &t["symbol"])?, target);
    }
    b.build()
}

pub fn compressed_from_json(v: &Value) -> Result<CompressedTreeAutomaton> {
    let alphabet = parse_alphabet(v)?;
    let mut b = CompressedTreeAutomaton::builder(alphabet.clone());
    for s in strings(&v["states"], "`states` must be an array of strings")? {
        b.state(s);
    }
    for s in strings(&v["finals"], "`finals` must be an array of strings")? {
        b.final_state(s);
    }
    let transitions = v["transitions"].as_array().ok_or_else(|| malformed("`transitions` must be an array"))?;
    for t in transitions {
        let slots = t["originSets"].as_array().ok_or_else(|| malformed("`originSets` must be an array"))?;
        let slots = slots
            .iter()
            .map(|s| strings(s, "origin sets must be arrays of strings"))
            .collect::<Result<Vec<_>>>()?;
        let slots: Vec<&[String]> = slots.iter().map(Vec::as_slice).collect();
        let targets = strings(&t["targets"], "`targets` must be an array of strings")?;
        b.transition(&slots, resolve(&alphabet, &t["symbol"])?, &targets);
    }
    b.build()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot_header(out: &mut String, states: &[String], finals: &[String]) {
    out.push_str("digraph automaton {\n  rankdir=BT;\n  node [shape=circle];\n");
    for s in states {
        let shape = if finals.contains(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(s));
    }
}

/// Emits one junction node per transition. Dashed edges run from each
/// origin into the junction, labelled by slot; nullary transitions start
/// from an invisible junction.
fn dot_transition(out: &mut String, id: usize, symbol: &str, slots: &[Vec<String>], targets: &[String]) {
    let junction = format!("t{id}");
    if slots.is_empty() {
        let _ = writeln!(out, "  {junction} [shape=point, style=invis];");
    } else {
        let _ = writeln!(out, "  {junction} [shape=point];");
    }
    for (i, slot) in slots.iter().enumerate() {
        for q in slot {
            let _ = writeln!(out, "  {} -> {junction} [style=dashed, arrowhead=none, label=\"{}\"];", quote(q), i + 1);
        }
    }
    for q in targets {
        let _ = writeln!(out, "  {junction} -> {} [label={}];", quote(q), quote(symbol));
    }
}

pub fn automaton_dot(a: &TreeAutomaton) -> String {
    let name = |q| a.state_name(q).to_string();
    let mut out = String::new();
    dot_header(&mut out, &state_list(a.state_count(), name), &names(a.finals(), name));
    for (i, r) in plain_rows(a).into_iter().enumerate() {
        let slots: Vec<Vec<String>> = r.origins.into_iter().map(|q| vec![q]).collect();
        dot_transition(&mut out, i, &r.symbol, &slots, &[r.target]);
    }
    out.push_str("}\n");
    out
}

pub fn compressed_dot(c: &CompressedTreeAutomaton) -> String {
    let name = |q| c.state_name(q).to_string();
    let mut out = String::new();
    dot_header(&mut out, &state_list(c.state_count(), name), &names(c.finals(), name));
    for (i, r) in compressed_rows(c).into_iter().enumerate() {
        dot_transition(&mut out, i, &r.symbol, &r.origin_sets, &r.targets);
    }
    out.push_str("}\n");
    out
}

fn text_header(out: &mut String, states: &[String], finals: &[String]) {
    let _ = writeln!(out, "states  {}", states.join(" "));
    let _ = writeln!(out, "finals  {}", finals.join(" "));
}

pub fn automaton_text(a: &TreeAutomaton) -> String {
    let name = |q| a.state_name(q).to_string();
    let mut out = String::new();
    text_header(&mut out, &state_list(a.state_count(), name), &names(a.finals(), name));
    for r in plain_rows(a) {
        let _ = writeln!(out, "({}) -{}-> {}", r.origins.join(","), r.symbol, r.target);
    }
    out
}

pub fn compressed_text(c: &CompressedTreeAutomaton) -> String {
    let name = |q| c.state_name(q).to_string();
    let mut out = String::new();
    text_header(&mut out, &state_list(c.state_count(), name), &names(c.finals(), name));
    for r in compressed_rows(c) {
        let slots: Vec<String> = r.origin_sets.iter().map(|s| format!("{{{}}}", s.join(","))).collect();
        let _ = writeln!(out, "({}) -{}-> {{{}}}", slots.join(","), r.symbol, r.targets.join(","));
    }
    out
}

/// Renders a set of states by name, e.g. `{f1,g2}`.
pub fn state_set_text(set: &StateSet, name: impl Fn(crate::automaton::StateId) -> String) -> String {
    format!("{{{}}}", names(set, name).join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{compressed_position_automaton, position_automaton};
    use crate::expr::{linearize, Expr};

    fn running() -> crate::expr::LinearExpr {
        linearize(&Expr::parse("(f(a,a)+g(b))*a.bf(g(a),b)").unwrap()).unwrap()
    }

    #[test]
    fn json_layout() {
        let v = automaton_json(&position_automaton(&running()));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["alphabet", "finals", "states", "transitions"]);
        assert_eq!(v["alphabet"]["f1"], 2);
        assert_eq!(v["finals"], json!(["a", "f1", "g2"]));
        assert_eq!(v["transitions"].as_array().unwrap().len(), 14);
        assert_eq!(v["transitions"][0], json!({"origins": [], "symbol": "a", "target": "a"}));
    }

    #[test]
    fn json_round_trip() {
        let a = position_automaton(&running());
        assert_eq!(automaton_from_json(&automaton_json(&a)).unwrap(), a);
        let c = compressed_position_automaton(&running());
        let v = compressed_json(&c);
        assert_eq!(v["transitions"][2]["originSets"], json!([["a", "f1", "g2"], ["a", "f1", "g2"]]));
        assert_eq!(compressed_from_json(&v).unwrap(), c);
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(matches!(automaton_from_json(&json!({"alphabet": 3})), Err(Error::Malformed(_))));
        let v = json!({"alphabet": {"a": 0}, "states": ["q"], "finals": [], "transitions": [{"origins": [], "symbol": "z", "target": "q"}]});
        assert!(automaton_from_json(&v).is_err());
    }

    #[test]
    fn indexed_labels_read_back() {
        assert_eq!(symbol_from_label("f12", 2), Symbol::indexed("f", 2, 12));
        assert_eq!(symbol_from_label("x1", 0), Symbol::nullary("x1"));
        assert_eq!(symbol_from_label("f", 2), Symbol::new("f", 2));
    }

    #[test]
    fn dot_shape() {
        let dot = automaton_dot(&position_automaton(&running()));
        assert!(dot.starts_with("digraph automaton {\n  rankdir=BT;\n"));
        assert!(dot.contains("  \"a\" [shape=doublecircle];\n"));
        assert!(dot.contains("  \"b\" [shape=circle];\n"));
        assert!(dot.contains("[style=dashed, arrowhead=none, label=\"2\"]"));
        assert!(dot.contains("[shape=point, style=invis]"));
        assert!(dot.ends_with("}\n"));
        let cdot = compressed_dot(&compressed_position_automaton(&running()));
        assert_eq!(cdot.matches("[shape=point").count(), 6);
    }

    #[test]
    fn text_listing() {
        let text = compressed_text(&compressed_position_automaton(&running()));
        assert!(text.contains("({a,f1,g2},{a,f1,g2}) -f1-> {f1}\n"));
        assert!(text.contains("({g4},{b}) -f3-> {f3}\n"));
        let text = automaton_text(&position_automaton(&running()));
        assert!(text.starts_with("states  a b f1 f3 g2 g4\nfinals  a f1 g2\n() -a-> a\n"));
    }
}
