//! Reference implementations used as test oracles, plus random instance
//! generators. Nothing here calls the join, filter, rule or recommender code
//! under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use kgrec_core::graph::{Triple, TriplePattern};
use kgrec_core::query::{CompareOp, FilterExpr};
use kgrec_core::recommender::{ConstraintLabel, UserProfile};
use kgrec_core::rules::{Atom, Rule};
use kgrec_core::vocab;
use kgrec_core::{Iri, Literal, Node, Term, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Binding = BTreeMap<String, Node>;

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn unify(t: &Term, value: &Node, b: &mut Binding) -> bool {
    match t {
        Term::Variable(v) => match b.get(v.name()) {
            Some(old) => old == value,
            None => {
                b.insert(v.name().to_string(), value.clone());
                true
            }
        },
        Term::Iri(i) => matches!(value, Node::Iri(j) if i == j),
        Term::Literal(l) => matches!(value, Node::Literal(m) if l == m),
    }
}

/// Nested-loop join over a plain triple list, patterns taken in the order
/// given.
pub fn brute_force_bgp(triples: &[Triple], bgp: &[TriplePattern]) -> BTreeSet<Binding> {
    let mut sols = vec![Binding::new()];
    for pat in bgp {
        let mut next = Vec::new();
        for b in &sols {
            for t in triples {
                let mut b = b.clone();
                if unify(&pat.subject, &Node::Iri(t.subject.clone()), &mut b)
                    && unify(&pat.predicate, &Node::Iri(t.predicate.clone()), &mut b)
                    && unify(&pat.object, &t.object, &mut b)
                {
                    next.push(b);
                }
            }
        }
        sols = next;
    }
    sols.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Iri(String),
    Num(f64, String),
    Str(String),
    Bool(bool),
    Other(String),
}

fn value_of(n: &Node) -> Value {
    match n {
        Node::Iri(i) => Value::Iri(i.as_str().to_string()),
        Node::Literal(l @ Literal::Integer(i)) => Value::Num(*i as f64, l.lexical()),
        Node::Literal(l @ Literal::Float(f)) => Value::Num(f.get(), l.lexical()),
        Node::Literal(Literal::String(s)) => Value::Str(s.to_string()),
        Node::Literal(Literal::Boolean(b)) => Value::Bool(*b),
        Node::Literal(other) => Value::Other(other.lexical()),
    }
}

fn eval_value(e: &FilterExpr, b: &Binding) -> Option<Value> {
    match e {
        FilterExpr::Var(v) => b.get(v.name()).map(value_of),
        FilterExpr::Const(n) => Some(value_of(n)),
        FilterExpr::Str(a) => match eval_value(a, b)? {
            Value::Iri(s) | Value::Str(s) | Value::Num(_, s) | Value::Other(s) => Some(Value::Str(s)),
            Value::Bool(v) => Some(Value::Str(v.to_string())),
        },
        other => eval_bool(other, b).map(Value::Bool),
    }
}

/// Three-valued filter semantics with `None` as the error value. Only the
/// value kinds produced by [`random_filter`] and the recommender are
/// handled: numbers (integers are small enough to be exact as `f64`),
/// strings, IRIs under `str` and booleans.
pub fn eval_bool(e: &FilterExpr, b: &Binding) -> Option<bool> {
    match e {
        FilterExpr::And(x, y) => match (eval_bool(x, b), eval_bool(y, b)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        FilterExpr::Or(x, y) => match (eval_bool(x, b), eval_bool(y, b)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        FilterExpr::Not(x) => eval_bool(x, b).map(|v| !v),
        FilterExpr::Contains(x, y) => match (eval_value(x, b)?, eval_value(y, b)?) {
            (Value::Str(h), Value::Str(n)) => Some(h.contains(&n)),
            _ => None,
        },
        FilterExpr::Compare(op, x, y) => {
            let (l, r) = (eval_value(x, b)?, eval_value(y, b)?);
            let ord = match (&l, &r) {
                (Value::Num(a, _), Value::Num(c, _)) => a.partial_cmp(c)?,
                (Value::Str(a), Value::Str(c)) => a.cmp(c),
                (Value::Bool(a), Value::Bool(c)) => a.cmp(c),
                (Value::Iri(a), Value::Iri(c)) if matches!(op, CompareOp::Eq | CompareOp::Ne) => {
                    return Some((a == c) == (*op == CompareOp::Eq));
                }
                (Value::Iri(_), _) | (_, Value::Iri(_)) if matches!(op, CompareOp::Eq | CompareOp::Ne) => {
                    return Some(*op == CompareOp::Ne);
                }
                _ => return None,
            };
            use std::cmp::Ordering::*;
            Some(match op {
                CompareOp::Lt => ord == Less,
                CompareOp::Le => ord != Greater,
                CompareOp::Gt => ord == Greater,
                CompareOp::Ge => ord != Less,
                CompareOp::Eq => ord == Equal,
                CompareOp::Ne => ord != Equal,
            })
        }
        FilterExpr::Var(_) | FilterExpr::Const(_) | FilterExpr::Str(_) => match eval_value(e, b)? {
            Value::Bool(v) => Some(v),
            _ => None,
        },
    }
}

/// Solutions of a BGP with filters, no modifiers, every variable kept.
pub fn brute_force_query(triples: &[Triple], bgp: &[TriplePattern], filters: &[FilterExpr]) -> BTreeSet<Binding> {
    brute_force_bgp(triples, bgp)
        .into_iter()
        .filter(|b| filters.iter().all(|f| eval_bool(f, b) == Some(true)))
        .collect()
}

// ---------------------------------------------------------------------------
// Random instances

const SUBJECTS: usize = 8;
const PREDICATES: usize = 3;
const WORDS: &[&str] = &["rouge", "bleu nuit", "gris", "noir", "rouge vif"];

pub fn small_iri(kind: &str, i: usize) -> Iri {
    iri(&format!("http://t.example/{kind}{i}"))
}

pub fn random_node(rng: &mut impl Rng) -> Node {
    match rng.gen_range(0..5) {
        0 | 1 => Node::Iri(small_iri("s", rng.gen_range(0..SUBJECTS))),
        2 => Literal::integer(rng.gen_range(-3..8)).into(),
        3 => Literal::float(rng.gen_range(-6..16) as f64 / 2.0).into(),
        _ => Literal::string(WORDS.choose(rng).unwrap()).into(),
    }
}

pub fn random_triples(rng: &mut impl Rng, max: usize) -> Vec<Triple> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            Triple::new(
                small_iri("s", rng.gen_range(0..SUBJECTS)),
                small_iri("p", rng.gen_range(0..PREDICATES)),
                random_node(rng),
            )
        })
        .collect()
}

fn random_var(rng: &mut impl Rng) -> Term {
    Term::var(["a", "b", "c", "d"].choose(rng).unwrap())
}

/// A pattern drawn against `triples` half the time so that joins are not
/// trivially empty.
pub fn random_pattern(rng: &mut impl Rng, triples: &[Triple]) -> TriplePattern {
    let seed = (!triples.is_empty() && rng.gen_bool(0.5)).then(|| triples.choose(rng).unwrap().clone());
    let mut pick = |constant: Term| {
        if rng.gen_bool(0.6) {
            random_var(rng)
        } else {
            constant
        }
    };
    let (s, p, o) = match seed {
        Some(t) => (Term::Iri(t.subject), Term::Iri(t.predicate), Term::from(t.object)),
        None => (Term::Iri(small_iri("s", 0)), Term::Iri(small_iri("p", 0)), Term::Iri(small_iri("s", 1))),
    };
    TriplePattern::new(pick(s), pick(p), pick(o))
}

pub fn random_bgp(rng: &mut impl Rng, triples: &[Triple], max: usize) -> Vec<TriplePattern> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| random_pattern(rng, triples)).collect()
}

fn random_operand(rng: &mut impl Rng, vars: &[Variable]) -> FilterExpr {
    if !vars.is_empty() && rng.gen_bool(0.6) {
        FilterExpr::var(vars.choose(rng).unwrap())
    } else {
        FilterExpr::Const(random_node(rng))
    }
}

fn random_atom(rng: &mut impl Rng, vars: &[Variable]) -> FilterExpr {
    const OPS: [CompareOp; 6] =
        [CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge, CompareOp::Eq, CompareOp::Ne];
    match rng.gen_range(0..4) {
        0 => FilterExpr::contains(
            FilterExpr::str(random_operand(rng, vars)),
            FilterExpr::constant(Literal::string(["ou", "r", "s0", "t.ex"].choose(rng).unwrap())),
        ),
        _ => FilterExpr::compare(*OPS.choose(rng).unwrap(), random_operand(rng, vars), random_operand(rng, vars)),
    }
}

/// A filter over `vars` built from comparisons and `contains`, combined
/// with `&&`, `||` and `!`.
pub fn random_filter(rng: &mut impl Rng, vars: &[Variable], depth: u32) -> FilterExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        return random_atom(rng, vars);
    }
    match rng.gen_range(0..3) {
        0 => FilterExpr::and(random_filter(rng, vars, depth - 1), random_filter(rng, vars, depth - 1)),
        1 => FilterExpr::or(random_filter(rng, vars, depth - 1), random_filter(rng, vars, depth - 1)),
        _ => FilterExpr::not(random_filter(rng, vars, depth - 1)),
    }
}

pub fn bgp_variables(bgp: &[TriplePattern]) -> Vec<Variable> {
    let set: BTreeSet<Variable> = bgp.iter().flat_map(|p| p.variables().cloned()).collect();
    set.into_iter().collect()
}

/// Random safe rules over classes `C0..C2` and properties `p0..p2`. Heads
/// only reuse body variables or constants, so saturation always terminates.
pub fn random_rules(rng: &mut impl Rng, n: usize) -> Vec<Rule> {
    (0..n)
        .map(|k| {
            let vars = ["x", "y", "z"];
            let body_len = rng.gen_range(1..=3);
            let mut body = Vec::new();
            for _ in 0..body_len {
                body.push(if rng.gen_bool(0.4) {
                    Atom::Class {
                        class: small_iri("C", rng.gen_range(0..3)),
                        arg: Term::var(vars.choose(rng).unwrap()),
                    }
                } else {
                    Atom::Property {
                        predicate: small_iri("p", rng.gen_range(0..3)),
                        subject: Term::var(vars.choose(rng).unwrap()),
                        object: if rng.gen_bool(0.8) {
                            Term::var(vars.choose(rng).unwrap())
                        } else {
                            Term::Iri(small_iri("s", rng.gen_range(0..SUBJECTS)))
                        },
                    }
                });
            }
            let bound: Vec<Variable> = {
                let mut v: Vec<Variable> = body.iter().flat_map(|a| a.variables().into_iter().cloned()).collect();
                v.sort();
                v.dedup();
                v
            };
            let subject_var = |rng: &mut _| Term::Variable(bound.choose(rng).unwrap().clone());
            let head = (0..rng.gen_range(1..=2))
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Atom::Class { class: small_iri("C", rng.gen_range(0..3)), arg: subject_var(rng) }
                    } else {
                        let object = if rng.gen_bool(0.7) {
                            subject_var(rng)
                        } else {
                            Term::Iri(small_iri("s", rng.gen_range(0..SUBJECTS)))
                        };
                        Atom::Property {
                            predicate: small_iri("p", rng.gen_range(0..3)),
                            subject: subject_var(rng),
                            object,
                        }
                    }
                })
                .collect();
            Rule { id: format!("r{k}"), body, head }
        })
        .collect()
}

/// Random IRI-only facts for rule tests: class memberships and links.
pub fn random_facts(rng: &mut impl Rng, n: usize) -> Vec<Triple> {
    (0..n)
        .map(|_| {
            let s = small_iri("s", rng.gen_range(0..SUBJECTS));
            if rng.gen_bool(0.3) {
                Triple::new(s, vocab::rdf_type(), small_iri("C", rng.gen_range(0..3)))
            } else {
                Triple::new(s, small_iri("p", rng.gen_range(0..3)), small_iri("s", rng.gen_range(0..SUBJECTS)))
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Recommender oracle

/// Vehicle facts reached by walking the catalog triples directly.
#[derive(Debug, Default)]
pub struct VehicleFacts {
    pub automobile: bool,
    pub prices: Vec<f64>,
    pub mileages: Vec<f64>,
    pub seats: Vec<Literal>,
    pub colours: Vec<String>,
    pub brands: Vec<String>,
    pub styles: Vec<Iri>,
}

pub struct Catalog {
    by_subject: HashMap<Iri, Vec<(Iri, Node)>>,
}

fn number(n: &Node) -> Option<f64> {
    match n {
        Node::Literal(Literal::Integer(i)) => Some(*i as f64),
        Node::Literal(Literal::Float(f)) => Some(f.get()),
        _ => None,
    }
}

impl Catalog {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut by_subject: HashMap<Iri, Vec<(Iri, Node)>> = HashMap::new();
        for t in triples {
            by_subject.entry(t.subject).or_default().push((t.predicate, t.object));
        }
        Catalog { by_subject }
    }

    fn objects(&self, s: &Iri, p: &Iri) -> Vec<Node> {
        self.by_subject
            .get(s)
            .map(|v| v.iter().filter(|(q, _)| q == p).map(|(_, o)| o.clone()).collect())
            .unwrap_or_default()
    }

    fn two_hop(&self, s: &Iri, first: &Iri, second: &Iri) -> Vec<Node> {
        self.objects(s, first).iter().filter_map(Node::as_iri).flat_map(|mid| self.objects(mid, second)).collect()
    }

    pub fn subjects(&self) -> Vec<Iri> {
        let mut v: Vec<Iri> = self.by_subject.keys().cloned().collect();
        v.sort();
        v
    }

    pub fn facts(&self, item: &Iri) -> VehicleFacts {
        use vocab::*;
        VehicleFacts {
            automobile: self.objects(item, &rdf_type()).contains(&Node::Iri(uvso(AUTOMOBILE))),
            prices: self.two_hop(item, &uvo(ESTIMATION), &uvoo(A_VALEUR_MONETAIRE)).iter().filter_map(number).collect(),
            mileages: self
                .two_hop(item, &uvso(KILOMETRAGE_ODOMETRE), &gr(A_VALEUR_FLOAT))
                .iter()
                .filter_map(number)
                .collect(),
            seats: self
                .two_hop(item, &uvso(NOMBRE_DE_PLACES), &gr(A_VALEUR_ENTIER))
                .into_iter()
                .filter_map(|n| n.as_literal().cloned())
                .collect(),
            colours: self
                .objects(item, &uvso(COULEUR))
                .iter()
                .filter_map(|n| n.as_literal().and_then(Literal::as_str).map(str::to_string))
                .collect(),
            brands: self
                .objects(item, &uvso(A_FABRICANT))
                .iter()
                .map(|n| match n {
                    Node::Iri(i) => i.as_str().to_string(),
                    Node::Literal(l) => l.lexical(),
                })
                .collect(),
            styles: self.objects(item, &uvso(STYLE_VEHICULE)).iter().filter_map(Node::as_iri).cloned().collect(),
        }
    }
}

/// Whether one preference holds for a vehicle, read straight off the
/// preference's plain-language meaning.
pub fn satisfies(f: &VehicleFacts, profile: &UserProfile, label: ConstraintLabel) -> bool {
    match label {
        ConstraintLabel::Price => {
            let max = profile.max_budget.unwrap() as f64;
            let min = profile.min_budget.map_or(f64::NEG_INFINITY, |m| m as f64);
            f.prices.iter().any(|&p| p <= max && p >= min)
        }
        ConstraintLabel::Mileage => f.mileages.iter().any(|&km| km < profile.max_mileage.unwrap() as f64),
        ConstraintLabel::Seats => f.seats.contains(&Literal::integer(profile.seats.unwrap())),
        ConstraintLabel::Color => {
            f.colours.iter().any(|c| profile.colors.iter().any(|wanted| c.contains(wanted.stem())))
        }
        ConstraintLabel::Brand => {
            let b = profile.brand.as_ref().unwrap().trim().to_lowercase();
            f.brands.iter().any(|m| m.contains(&b))
        }
        ConstraintLabel::VehicleType => f.styles.contains(&profile.vehicle_type.unwrap().iri()),
    }
}

/// Items accepted under the `active` preferences, in term order.
pub fn oracle_items(catalog: &Catalog, profile: &UserProfile, active: &BTreeSet<ConstraintLabel>) -> Vec<Iri> {
    catalog
        .subjects()
        .into_iter()
        .filter(|item| {
            let f = catalog.facts(item);
            f.automobile && active.iter().all(|&l| satisfies(&f, profile, l))
        })
        .collect()
}

/// Every subset of `labels`, as sets.
pub fn all_subsets(labels: &[ConstraintLabel]) -> Vec<BTreeSet<ConstraintLabel>> {
    (0u32..1 << labels.len())
        .map(|mask| (0..labels.len()).filter(|i| mask & (1 << i) != 0).map(|i| labels[i]).collect())
        .collect()
}

/// Subset-minimal sets whose removal leaves at least one accepted item,
/// found by checking all subsets.
pub fn oracle_minimal_diagnoses(catalog: &Catalog, profile: &UserProfile) -> BTreeSet<BTreeSet<ConstraintLabel>> {
    let supplied: Vec<ConstraintLabel> = profile.supplied().into_iter().collect();
    let all: BTreeSet<ConstraintLabel> = supplied.iter().copied().collect();
    let consistent: Vec<BTreeSet<ConstraintLabel>> = all_subsets(&supplied)
        .into_iter()
        .filter(|d| !oracle_items(catalog, profile, &all.difference(d).copied().collect()).is_empty())
        .collect();
    consistent.iter().filter(|d| !consistent.iter().any(|e| e != *d && e.is_subset(d))).cloned().collect()
}
