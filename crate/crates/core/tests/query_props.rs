mod support;

use std::collections::BTreeSet;

use kgrec_core::query::{eval_bgp, execute, parse_query, Projection, Query};
use kgrec_core::{Graph, Solution};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn bindings(sols: &[Solution]) -> BTreeSet<Binding> {
    sols.iter().map(|s| s.iter().map(|(v, n)| (v.name().to_string(), n.clone())).collect()).collect()
}

fn random_query(rng: &mut ChaCha8Rng) -> (Vec<kgrec_core::graph::Triple>, Query) {
    let triples = random_triples(rng, 120);
    let bgp = random_bgp(rng, &triples, 4);
    let vars = bgp_variables(&bgp);
    let filters = (0..rng.gen_range(0..=2)).map(|_| random_filter(rng, &vars, 2)).collect();
    let mut q = Query::select_all(bgp);
    q.filters = filters;
    (triples, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn execute_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (triples, q) = random_query(&mut rng);
        let g: Graph = triples.iter().cloned().collect();
        let got = execute(&g, &q);
        prop_assert_eq!(bindings(&got.solutions), brute_force_query(&triples, &q.bgp, &q.filters));
        prop_assert_eq!(got.solutions.len(), bindings(&got.solutions).len());
    }

    #[test]
    fn pattern_order_does_not_change_solutions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let triples = random_triples(&mut rng, 80);
        let g: Graph = triples.iter().cloned().collect();
        let mut bgp = random_bgp(&mut rng, &triples, 4);
        let before = eval_bgp(&g, &bgp);
        bgp.shuffle(&mut rng);
        prop_assert_eq!(before, eval_bgp(&g, &bgp));
    }

    #[test]
    fn adding_a_filter_never_adds_solutions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (triples, mut q) = random_query(&mut rng);
        let g: Graph = triples.iter().cloned().collect();
        let before = bindings(&execute(&g, &q).solutions);
        let vars = bgp_variables(&q.bgp);
        q.filters.push(random_filter(&mut rng, &vars, 2));
        let after = bindings(&execute(&g, &q).solutions);
        prop_assert!(after.is_subset(&before));
    }

    #[test]
    fn modifiers_select_from_the_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (triples, mut q) = random_query(&mut rng);
        let g: Graph = triples.iter().cloned().collect();
        let vars = bgp_variables(&q.bgp);
        let kept: Vec<_> = vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        q.projection = Projection::Vars(kept.clone());
        q.distinct = rng.gen_bool(0.5);
        q.limit = rng.gen_bool(0.5).then(|| rng.gen_range(0..5));
        q.offset = rng.gen_bool(0.3).then(|| rng.gen_range(0..3));
        let got = execute(&g, &q);
        let oracle: BTreeSet<Binding> = brute_force_query(&triples, &q.bgp, &q.filters)
            .into_iter()
            .map(|b| b.into_iter().filter(|(k, _)| kept.iter().any(|v| v.name() == k)).collect())
            .collect();
        prop_assert!(bindings(&got.solutions).is_subset(&oracle));
        if q.distinct && q.limit.is_none() && q.offset.is_none() {
            prop_assert_eq!(got.solutions.len(), oracle.len());
        }
    }

    #[test]
    fn query_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, q) = random_query(&mut rng);
        let text = q.to_string();
        prop_assert_eq!(parse_query(&text).unwrap(), q);
    }
}

#[test]
fn order_by_is_total_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let triples = random_triples(&mut rng, 150);
    let g: Graph = triples.iter().cloned().collect();
    let q = parse_query("SELECT ?s ?o WHERE { ?s <http://t.example/p0> ?o } ORDER BY DESC(?o) ?s").unwrap();
    let a = execute(&g, &q);
    let shuffled: Graph = {
        let mut t = triples.clone();
        t.shuffle(&mut rng);
        t.into_iter().collect()
    };
    assert_eq!(a, execute(&shuffled, &q));
}
