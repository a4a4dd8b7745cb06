//! End-to-end acceptance checks. Each criterion prints one line:
//!
//! ```text
//! [PASS] 3 query round trip: 1 item, uvso:conforme (2 ms)
//! ```
//!
//! Run with `cargo test -p kgrec --test acceptance`.

#[allow(dead_code)]
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use kgrec::ntriples::load_ntriples;
use kgrec_core::dataset::{generate, GeneratorConfig};
use kgrec_core::diagnosis::{enumerate_minimal_diagnoses, preferred_diagnosis, relax, DeltaSet, DiagnosisError};
use kgrec_core::graph::Triple;
use kgrec_core::query::{execute, parse_query, Query};
use kgrec_core::recommender::{matching_items, recommend, CatalogSchema, RecommendError, RecommendationTask};
use kgrec_core::rules::{parse_rules, saturate};
use kgrec_core::{vocab, Date, Graph, Literal, Node, Solution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

const RULES_BUDGET: Duration = Duration::from_secs(1);
const QUERY_BUDGET: Duration = Duration::from_secs(30);
const COHORT_BUDGET: Duration = Duration::from_secs(60);
const DIAGNOSIS_BUDGET: Duration = Duration::from_secs(60);
const EXPERIMENT_BUDGET: Duration = Duration::from_secs(120);

/// Seed of the cohort shared by the monotonicity, experiment and soundness
/// checks; the experiment subcommand uses the same default.
const COHORT_SEED: u64 = 42;
const COHORT_VEHICLES: usize = 500;
const COHORT_USERS: usize = 50;

const QUERY_CASES: usize = 200;
const DIAGNOSIS_TASKS: usize = 50;
const FIXPOINT_CASES: usize = 50;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:.2?}, budget {budget:.0?}"))
}

fn reference_date() -> Date {
    Date::new(2022, 3, 1).unwrap()
}

fn cohort() -> (Graph, Vec<RecommendationTask>, Catalog) {
    let d = generate(COHORT_SEED, COHORT_VEHICLES, COHORT_USERS, &GeneratorConfig::default());
    let tasks =
        d.profiles.iter().map(|p| RecommendationTask::new(p.clone(), CatalogSchema::default()).unwrap()).collect();
    let catalog = Catalog::new(d.vehicles.iter());
    (d.vehicles.union(&d.users), tasks, catalog)
}

fn rule_fidelity() -> Outcome {
    let start = Instant::now();
    let graph = load_ntriples(include_str!("fixtures/rules_profile.nt")).map_err(|e| e.to_string())?;
    let rules = parse_rules(include_str!("../data/domain.rules")).map_err(|e| e.to_string())?;
    let sat = saturate(&graph, &rules, reference_date(), 10).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let pref = vocab::upo("pref_longue");
    let preferred = vocab::upo(vocab::A_UN_TYPE_DE_VEHICULE_PREFERE);
    let expected: BTreeSet<Triple> = [
        Triple::new(pref.clone(), preferred.clone(), vocab::upo("SUV")),
        Triple::new(pref, preferred, vocab::upo("Crossover")),
        Triple::new(vocab::uvso("vieille_ct"), vocab::uvso(vocab::EST_REQUIS), Literal::Boolean(true)),
    ]
    .into_iter()
    .collect();
    ensure(sat.derived == expected, || {
        let shown: Vec<String> = sat.derived.iter().map(ToString::to_string).collect();
        format!("derived {shown:?}")
    })?;
    within(elapsed, RULES_BUDGET)?;
    Ok(format!("{} derived triples, exact match", sat.derived.len()))
}

fn bindings(sols: &[Solution]) -> BTreeSet<Binding> {
    sols.iter().map(|s| s.iter().map(|(v, n)| (v.name().to_string(), n.clone())).collect()).collect()
}

fn query_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut non_empty = 0;
    for case in 0..QUERY_CASES {
        let triples = random_triples(&mut rng, 200);
        let bgp = random_bgp(&mut rng, &triples, 4);
        let vars = bgp_variables(&bgp);
        let filters = (0..rng.gen_range(0..=2)).map(|_| random_filter(&mut rng, &vars, 2)).collect();
        let mut q = Query::select_all(bgp);
        q.filters = filters;
        let g: Graph = triples.iter().cloned().collect();
        let got = bindings(&execute(&g, &q).solutions);
        let expected = brute_force_query(&triples, &q.bgp, &q.filters);
        ensure(got == expected, || format!("case {case} differs: {q}"))?;
        non_empty += usize::from(!got.is_empty());
    }
    within(start.elapsed(), QUERY_BUDGET)?;
    Ok(format!("{QUERY_CASES} cases equal, {non_empty} with solutions"))
}

fn query_round_trip() -> Outcome {
    let catalog = load_ntriples(include_str!("fixtures/sedan_catalog.nt")).map_err(|e| e.to_string())?;
    let query = parse_query(include_str!("../data/sedan_search.rq")).map_err(|e| e.to_string())?;
    let r = execute(&catalog, &query);
    let items: Vec<Node> = r.solutions.iter().flat_map(|s| s.iter().map(|(_, n)| n.clone())).collect();
    ensure(items == [Node::Iri(vocab::uvso("conforme"))], || {
        format!("returned {:?}", items.iter().map(ToString::to_string).collect::<Vec<_>>())
    })?;
    ensure(r.diagnostics.filter_errors == 0, || format!("{} filter errors", r.diagnostics.filter_errors))?;
    let automobiles = catalog.subjects(&vocab::rdf_type(), &Node::Iri(vocab::uvso(vocab::AUTOMOBILE))).count();
    Ok(format!("1 of {automobiles} automobiles returned"))
}

fn relaxation_monotonicity() -> Outcome {
    let start = Instant::now();
    let (graph, tasks, catalog) = cohort();
    let deltas = DeltaSet::defaults();
    let mut checks = 0;
    for t in &tasks {
        let full = matching_items(&graph, t, &t.supplied()).map_err(|e| e.to_string())?.0;
        ensure(full == oracle_items(&catalog, &t.profile, &t.supplied()), || {
            format!("{}: full items differ from the oracle", t.profile.user_id)
        })?;
        let mut per_delta = Vec::new();
        for d in &deltas {
            let relaxed = matching_items(&graph, t, &relax(t, &d.removed)).map_err(|e| e.to_string())?.0;
            ensure(relaxed.len() >= full.len(), || {
                format!("{} under {}: {} < {}", t.profile.user_id, d.name, relaxed.len(), full.len())
            })?;
            ensure(full.iter().all(|i| relaxed.contains(i)), || {
                format!("{} under {} lost an item", t.profile.user_id, d.name)
            })?;
            per_delta.push((d, relaxed.len()));
            checks += 1;
        }
        for (a, na) in &per_delta {
            for (b, nb) in &per_delta {
                if a.removed.is_subset(&b.removed) {
                    ensure(nb >= na, || format!("{}: {} > {}", t.profile.user_id, a.name, b.name))?;
                }
            }
        }
    }
    within(start.elapsed(), COHORT_BUDGET)?;
    Ok(format!("{checks} user/set pairs, 0 violations"))
}

fn diagnosis_minimality() -> Outcome {
    let start = Instant::now();
    let cfg = GeneratorConfig { diversity: 0.3, ..GeneratorConfig::default() };
    let mut checked = 0;
    let mut seed = 100;
    while checked < DIAGNOSIS_TASKS {
        ensure(seed < 200, || format!("only {checked} inconsistent tasks found"))?;
        let d = generate(seed, 60, 40, &cfg);
        seed += 1;
        let catalog = Catalog::new(d.vehicles.iter());
        for p in &d.profiles {
            if checked == DIAGNOSIS_TASKS {
                break;
            }
            let t = RecommendationTask::new(p.clone(), CatalogSchema::default()).map_err(|e| e.to_string())?;
            if !oracle_items(&catalog, p, &t.supplied()).is_empty() {
                continue;
            }
            ensure(t.supplied().len() <= 6, || format!("{} has {} preferences", p.user_id, t.supplied().len()))?;
            let expected = oracle_minimal_diagnoses(&catalog, p);
            let got: BTreeSet<_> = enumerate_minimal_diagnoses(&d.vehicles, &t, usize::MAX)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|d| d.removed)
                .collect();
            ensure(got == expected, || format!("seed {} {}: {got:?} vs {expected:?}", seed - 1, p.user_id))?;
            match preferred_diagnosis(&d.vehicles, &t) {
                Ok(delta) => ensure(expected.iter().any(|m| m.is_subset(&delta.removed)), || {
                    format!("{}: preferred {:?} contains no minimal diagnosis", p.user_id, delta.removed)
                })?,
                Err(DiagnosisError::NoDiagnosis { .. }) => {
                    ensure(expected.is_empty(), || format!("{}: no preferred diagnosis", p.user_id))?
                }
                Err(e) => return Err(e.to_string()),
            }
            checked += 1;
        }
    }
    within(start.elapsed(), DIAGNOSIS_BUDGET)?;
    Ok(format!("{checked} inconsistent tasks match the exhaustive oracle"))
}

fn fixpoint_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1c5);
    let mut derived = 0;
    for case in 0..FIXPOINT_CASES {
        let n_facts = rng.gen_range(0..30);
        let facts = random_facts(&mut rng, n_facts);
        let n_rules = rng.gen_range(1..6);
        let mut rules = random_rules(&mut rng, n_rules);
        let g: Graph = facts.into_iter().collect();
        let first = saturate(&g, &rules, reference_date(), 200).map_err(|e| e.to_string())?;
        let again = saturate(&first.graph, &rules, reference_date(), 200).map_err(|e| e.to_string())?;
        ensure(again.graph == first.graph && again.derived.is_empty(), || format!("case {case} not idempotent"))?;
        rules.shuffle(&mut rng);
        let shuffled = saturate(&g, &rules, reference_date(), 200).map_err(|e| e.to_string())?;
        ensure(shuffled.graph == first.graph, || format!("case {case} depends on rule order"))?;
        derived += first.derived.len();
    }
    Ok(format!("{FIXPOINT_CASES} instances, {derived} derived triples in total"))
}

fn run_experiment() -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kgrec"))
        .args(["experiment", "--seed", &COHORT_SEED.to_string(), "--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn experiment_shape() -> Outcome {
    let start = Instant::now();
    let first = run_experiment()?;
    let second = run_experiment()?;
    ensure(first == second, || "two runs differ".to_string())?;
    let text = String::from_utf8(first).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty report")?.split(',').collect();
    let top = header.iter().position(|h| *h == ">10").ok_or("no >10 column")?;
    let above = |set: &str| -> Result<usize, String> {
        text.lines()
            .find(|l| l.split(',').next() == Some(set))
            .and_then(|l| l.split(',').nth(top))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("no row {set}"))
    };
    let (full, brand, color) = (above("full")?, above("Δ3")?, above("Δ4")?);
    ensure(brand > full && color > full, || format!(">10 users: full {full}, Δ3 {brand}, Δ4 {color}"))?;
    within(start.elapsed(), EXPERIMENT_BUDGET)?;
    Ok(format!("byte-identical; >10 users: full {full}, Δ3 {brand}, Δ4 {color}"))
}

fn soundness_sweep() -> Outcome {
    let (graph, tasks, catalog) = cohort();
    let mut emitted = 0;
    let mut errors = 0;
    for t in &tasks {
        for d in DeltaSet::defaults().iter().map(|d| &d.removed).chain([&BTreeSet::new()]) {
            let active = relax(t, d);
            let (items, diag) = matching_items(&graph, t, &active).map_err(|e| e.to_string())?;
            errors += diag.filter_errors;
            ensure(items == oracle_items(&catalog, &t.profile, &active), || {
                format!("{} without {d:?}: items differ from the oracle", t.profile.user_id)
            })?;
            for item in &items {
                let f = catalog.facts(item);
                ensure(f.automobile && active.iter().all(|&l| satisfies(&f, &t.profile, l)), || {
                    format!("{item} fails a preference of {}", t.profile.user_id)
                })?;
            }
            emitted += items.len();
        }
        match recommend(&graph, t, 10) {
            Ok(r) => {
                errors += r.diagnostics.filter_errors;
                for item in &r.items {
                    let f = catalog.facts(item);
                    ensure(t.supplied().into_iter().all(|l| satisfies(&f, &t.profile, l)), || {
                        format!("recommended {item} fails a preference of {}", t.profile.user_id)
                    })?;
                }
            }
            Err(RecommendError::Inconsistent { .. }) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure(errors == 0, || format!("{errors} filter errors"))?;
    Ok(format!("{emitted} emitted items re-verified, 0 filter errors"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("rule engine fidelity", rule_fidelity),
        ("query engine oracle equivalence", query_oracle),
        ("query round trip", query_round_trip),
        ("relaxation monotonicity", relaxation_monotonicity),
        ("diagnosis minimality", diagnosis_minimality),
        ("fixpoint properties", fixpoint_properties),
        ("experiment reproducibility and shape", experiment_shape),
        ("soundness sweep", soundness_sweep),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
