use std::collections::BTreeSet;

use treepos::oracle::{
    cross_validate, cross_validate_with, default_random_alphabet, enumerate_language, enumerate_trees,
    father_via_enumeration, random_expression, root_via_enumeration, semantic_member, EnumerationBound,
};
use treepos::positions::FatherSet;
use treepos::expr::contains_nullary;
use treepos::{linearize, validate, Expr, FatherPair, PositionTable, Symbol, Tree};

const RUNNING: &str = "(f(a,a)+g(b))*a.bf(g(a),b)";

fn bound(n: usize) -> EnumerationBound {
    EnumerationBound::new(n).unwrap()
}

fn random(seed: u64, positions: usize) -> Expr {
    random_expression(seed, positions, &default_random_alphabet()).unwrap()
}

#[test]
fn running_example_language_facts() {
    let e = Expr::parse(RUNNING).unwrap();
    let lin = linearize(&e).unwrap();
    let a = Symbol::nullary("a");
    assert!(contains_nullary(lin.expr(), &a).unwrap());

    let lang = enumerate_language(lin.expr(), bound(9)).unwrap();
    assert!(lang.contains(&Tree::parse_over(&lin.alphabet(), "g2(f3(g4(a),b))").unwrap()));

    let b = Symbol::nullary("b");
    let g4 = Symbol::indexed("g", 1, 4);
    let f3 = Symbol::indexed("f", 2, 3);
    let f1 = Symbol::indexed("f", 2, 1);
    let g2 = Symbol::indexed("g", 1, 2);
    assert_eq!(
        father_via_enumeration(lin.expr(), &b, bound(9)).unwrap(),
        BTreeSet::from([FatherPair::new(f3.clone(), 2)])
    );
    assert_eq!(
        father_via_enumeration(lin.expr(), &g4, bound(9)).unwrap(),
        BTreeSet::from([FatherPair::new(f3, 1)])
    );
    assert_eq!(
        root_via_enumeration(lin.expr(), bound(9)).unwrap(),
        BTreeSet::from([a.clone(), f1.clone(), g2])
    );

    let observed: FatherSet = lang.iter().flat_map(|t| t.father_of(&a)).collect();
    assert_eq!(
        observed,
        BTreeSet::from([FatherPair::new(f1.clone(), 1), FatherPair::new(f1, 2), FatherPair::new(g4.clone(), 1)])
    );

    let table = PositionTable::new(&lin);
    for f in lin.positions() {
        let wrapped: FatherSet = lang
            .iter()
            .flat_map(|t| Tree::new(Symbol::dollar(), vec![t.clone()]).unwrap().father_of(f))
            .collect();
        assert_eq!(table.augmented_father_set(f).unwrap(), wrapped, "position {f}");
    }

    let report = cross_validate(&e, bound(9)).unwrap();
    assert!(report.all_agree(), "{report}");
}

#[test]
fn enumerated_trees_are_semantic_members() {
    for seed in 0..100 {
        let e = random(seed, 5);
        for t in enumerate_language(&e, bound(6)).unwrap() {
            assert!(t.size() <= 6);
            assert!(semantic_member(&e, &t).unwrap(), "{t} from {e}");
        }
    }
}

#[test]
fn enumeration_is_complete_on_small_universes() {
    for seed in 0..60 {
        let e = random(seed, 5);
        let lang = enumerate_language(&e, bound(5)).unwrap();
        for t in enumerate_trees(&e.alphabet().unwrap(), 5) {
            assert_eq!(semantic_member(&e, &t).unwrap(), lang.contains(&t), "{t} against {e}");
        }
    }
}

#[test]
fn enumeration_is_monotone_in_the_bound() {
    for seed in 0..40 {
        let e = random(seed, 5);
        let small = enumerate_language(&e, bound(5)).unwrap();
        let large = enumerate_language(&e, bound(8)).unwrap();
        assert!(small.is_subset(&large));
        let trimmed: BTreeSet<Tree> = large.into_iter().filter(|t| t.size() <= 5).collect();
        assert_eq!(small, trimmed, "{e}");
    }
}

#[test]
fn extra_star_rounds_add_nothing() {
    for seed in 0..40 {
        let e = random(seed, 5);
        let base = EnumerationBound::with_star_iterations(7, 8).unwrap();
        let more = EnumerationBound::with_star_iterations(7, 20).unwrap();
        assert_eq!(enumerate_language(&e, base).unwrap(), enumerate_language(&e, more).unwrap(), "{e}");
    }
}

#[test]
fn too_few_star_rounds_is_reported() {
    let e = Expr::parse("g(a)*a").unwrap();
    let tight = EnumerationBound::with_star_iterations(12, 2).unwrap();
    assert!(enumerate_language(&e, tight).is_err());
}

#[test]
fn contains_nullary_matches_single_node_trees() {
    for seed in 0..200 {
        let lin = linearize(&random(seed, 6)).unwrap();
        let e = lin.expr();
        let small = enumerate_language(e, bound(1)).unwrap();
        for c in e.symbols().into_iter().filter(|s| s.arity() == 0) {
            let leaf = Tree::leaf(c.clone()).unwrap();
            assert_eq!(contains_nullary(e, &c).unwrap(), small.contains(&leaf), "{c} in {e}");
        }
    }
}

#[test]
fn root_set_matches_enumeration_at_calibrated_bound() {
    for seed in 0..200 {
        let lin = linearize(&random(seed, 5)).unwrap();
        let table = PositionTable::new(&lin);
        let b = EnumerationBound::calibrated(lin.positions().len());
        assert_eq!(&root_via_enumeration(lin.expr(), b).unwrap(), table.root_set(), "{}", lin.expr());
    }
}

#[test]
fn father_sets_contain_what_enumeration_sees() {
    for seed in 0..100 {
        let lin = linearize(&random(seed, 6)).unwrap();
        let table = PositionTable::new(&lin);
        for f in lin.positions() {
            let seen = father_via_enumeration(lin.expr(), f, bound(9)).unwrap();
            assert!(seen.is_subset(table.father_set(f).unwrap()), "{f} in {}", lin.expr());
        }
    }
}

#[test]
fn generator_yields_valid_expressions_of_every_kind() {
    let mut kinds = BTreeSet::new();
    for seed in 0..1000 {
        let e = random(seed, 8);
        assert!(validate(&e).is_empty(), "seed {seed}: {e}");
        e.visit(&mut |node| {
            kinds.insert(node.kind());
        });
    }
    assert_eq!(kinds.len(), 4, "{kinds:?}");
}

#[test]
fn generator_is_reproducible() {
    for seed in 0..20 {
        assert_eq!(random(seed, 6), random(seed, 6));
    }
}

#[test]
fn corrupted_father_slot_is_caught() {
    let e = Expr::parse(RUNNING).unwrap();
    let b = Symbol::nullary("b");
    let f3 = Symbol::indexed("f", 2, 3);
    let report = cross_validate_with(&e, bound(9), |table| {
        table.override_father_set(&b, BTreeSet::from([FatherPair::new(f3, 1)])).unwrap();
    })
    .unwrap();
    assert!(!report.all_agree());
    assert!(report.first_counterexample.is_some());
}

#[test]
fn dropped_root_is_caught() {
    let e = Expr::parse(RUNNING).unwrap();
    let report = cross_validate_with(&e, bound(9), |table| {
        let mut root = table.root_set().clone();
        root.remove(&Symbol::nullary("a"));
        table.override_root_set(root);
    })
    .unwrap();
    assert!(!report.all_agree());
    let witness = report.first_counterexample.expect("counterexample");
    assert!(semantic_member(&e, &witness).unwrap() || witness.size() == 1);
}

#[test]
fn unreachable_subscript_is_rejected() {
    let e = Expr::parse("f(a,a).b g(b)").unwrap();
    assert!(!validate(&e).is_empty());
    assert!(semantic_member(&e, &Tree::parse("f(a,a)").unwrap()).is_err());
}
