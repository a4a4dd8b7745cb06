mod support;

use std::collections::BTreeSet;

use kgrec_core::graph::{Triple, TriplePattern};
use kgrec_core::rules::{parse_rules, saturate, Atom, Rule};
use kgrec_core::{vocab, Date, Graph, Node, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn today() -> Date {
    Date::new(2022, 3, 1).unwrap()
}

fn atom_pattern(a: &Atom) -> TriplePattern {
    match a {
        Atom::Class { class, arg } => TriplePattern::new(arg.clone(), vocab::rdf_type(), class.clone()),
        Atom::Property { predicate, subject, object } => {
            TriplePattern::new(subject.clone(), predicate.clone(), object.clone())
        }
        other => panic!("oracle handles class and property atoms only, got {other:?}"),
    }
}

fn ground(t: &Term, b: &Binding) -> Node {
    match t {
        Term::Variable(v) => b[v.name()].clone(),
        Term::Iri(i) => Node::Iri(i.clone()),
        Term::Literal(l) => Node::Literal(l.clone()),
    }
}

/// Naive fixpoint over a triple list: re-derive everything until nothing
/// new appears.
fn naive_fixpoint(facts: &[Triple], rules: &[Rule]) -> BTreeSet<Triple> {
    let mut all: BTreeSet<Triple> = facts.iter().cloned().collect();
    loop {
        let list: Vec<Triple> = all.iter().cloned().collect();
        let mut next = all.clone();
        for r in rules {
            let body: Vec<_> = r.body.iter().map(atom_pattern).collect();
            for b in brute_force_bgp(&list, &body) {
                for h in &r.head {
                    let p = atom_pattern(h);
                    if let Node::Iri(s) = ground(&p.subject, &b) {
                        let pred = ground(&p.predicate, &b).as_iri().unwrap().clone();
                        next.insert(Triple::new(s, pred, ground(&p.object, &b)));
                    }
                }
            }
        }
        if next.len() == all.len() {
            return all;
        }
        all = next;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_matches_naive_fixpoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_facts = rng.gen_range(0..25);
        let facts = random_facts(&mut rng, n_facts);
        let n = rng.gen_range(1..5);
        let rules = random_rules(&mut rng, n);
        let g: Graph = facts.iter().cloned().collect();
        let sat = saturate(&g, &rules, today(), 200).unwrap();
        let expected = naive_fixpoint(&facts, &rules);
        prop_assert_eq!(sat.graph.iter().collect::<BTreeSet<_>>(), expected);
        prop_assert!(g.iter().all(|t| sat.graph.contains(&t)));
        prop_assert_eq!(sat.graph.len(), g.len() + sat.derived.len());
        prop_assert!(sat.rounds <= sat.derived.len() + 1);
    }

    #[test]
    fn saturation_is_idempotent_and_order_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_facts = rng.gen_range(0..25);
        let facts = random_facts(&mut rng, n_facts);
        let n = rng.gen_range(1..6);
        let mut rules = random_rules(&mut rng, n);
        let g: Graph = facts.into_iter().collect();
        let first = saturate(&g, &rules, today(), 200).unwrap();
        let again = saturate(&first.graph, &rules, today(), 200).unwrap();
        prop_assert_eq!(&again.graph, &first.graph);
        prop_assert!(again.derived.is_empty());
        rules.shuffle(&mut rng);
        prop_assert_eq!(saturate(&g, &rules, today(), 200).unwrap().graph, first.graph);
    }
}

#[test]
fn domain_rules_finish_within_three_rounds() {
    let mut rules = parse_rules(vocab::DOMAIN_RULES).unwrap();
    rules.extend(parse_rules(vocab::FAMILY_RULE).unwrap());
    let d = kgrec_core::dataset::generate(3, 30, 30, &Default::default());
    let g = d.vehicles.union(&d.users);
    let sat = saturate(&g, &rules, today(), 10).unwrap();
    assert!(sat.rounds <= 3, "{} rounds", sat.rounds);
    assert!(!sat.derived.is_empty());
}
