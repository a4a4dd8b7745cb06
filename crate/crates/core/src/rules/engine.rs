use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{eval_builtin, Atom, BuiltinOutcome, Rule, RuleError};
use crate::graph::{Graph, Triple, TriplePattern};
use crate::solution::Solution;
use crate::term::{Date, Node, Term, Variable};
use crate::vocab;

fn is_bound(t: &Term, bound: &BTreeSet<Variable>) -> bool {
    match t {
        Term::Variable(v) => bound.contains(v),
        _ => true,
    }
}

/// Orders body atoms so that builtins run as soon as their inputs are bound
/// and relational atoms are joined most-bound first. The set of bound
/// variables after each step is the same for every partial solution, so the
/// plan is computed once per rule.
fn plan(rule: &Rule) -> Result<Vec<&Atom>, RuleError> {
    let mut bound = BTreeSet::new();
    let mut remaining: Vec<&Atom> = rule.body.iter().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let relational_left = remaining.iter().any(|a| matches!(a, Atom::Class { .. } | Atom::Property { .. }));
        let ready = |a: &&Atom| match a {
            Atom::Builtin(call) => call.inputs().all(|v| bound.contains(v)),
            Atom::SameAs(x, y) => is_bound(x, &bound) || is_bound(y, &bound) || !relational_left,
            _ => false,
        };
        let pick = match remaining.iter().position(ready) {
            Some(i) => i,
            None => {
                let score = |a: &Atom| match a {
                    Atom::Class { arg, .. } => Some(1 + usize::from(is_bound(arg, &bound)) * 2),
                    Atom::Property { subject, object, .. } => {
                        Some(1 + usize::from(is_bound(subject, &bound)) * 2 + usize::from(is_bound(object, &bound)) * 2)
                    }
                    _ => None,
                };
                let best = remaining
                    .iter()
                    .enumerate()
                    .filter_map(|(i, a)| score(a).map(|s| (s, i)))
                    .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
                match best {
                    Some((_, i)) => i,
                    None => {
                        let stuck = remaining
                            .iter()
                            .find_map(|a| match a {
                                Atom::Builtin(call) => call.inputs().find(|v| !bound.contains(*v)).cloned(),
                                _ => None,
                            })
                            .expect("only unready builtins remain");
                        return Err(RuleError::UnboundBodyVariable { rule: rule.id.clone(), variable: stuck });
                    }
                }
            }
        };
        let atom = remaining.remove(pick);
        match atom {
            Atom::Builtin(call) => bound.extend(call.output().cloned()),
            other => bound.extend(other.variables().into_iter().cloned()),
        }
        order.push(atom);
    }
    Ok(order)
}

fn resolve(t: &Term, s: &Solution) -> Option<Node> {
    match t {
        Term::Variable(v) => s.get(v).cloned(),
        other => other.as_node(),
    }
}

fn extend_by_pattern(graph: &Graph, pat: &TriplePattern, sols: Vec<Solution>) -> Vec<Solution> {
    let mut out = Vec::new();
    for s in sols {
        for m in graph.match_pattern(&pat.substitute(&s)) {
            if let Some(merged) = s.merge(&m) {
                out.push(merged);
            }
        }
    }
    out
}

/// sameAs holds on identical terms or on an asserted `owl:sameAs` triple in
/// either direction. No equivalence closure is computed.
fn same_as_partners(graph: &Graph, node: &Node) -> BTreeSet<Node> {
    let same = vocab::owl_same_as();
    let mut out = BTreeSet::new();
    out.insert(node.clone());
    if let Node::Iri(i) = node {
        out.extend(graph.objects(i, &same).cloned());
    }
    out.extend(graph.subjects(&same, node).cloned().map(Node::Iri));
    out
}

fn eval_same_as(graph: &Graph, a: &Term, b: &Term, sols: Vec<Solution>) -> Vec<Solution> {
    let same = vocab::owl_same_as();
    let mut out = Vec::new();
    for s in sols {
        match (resolve(a, &s), resolve(b, &s)) {
            (Some(x), Some(y)) => {
                if same_as_partners(graph, &x).contains(&y) {
                    out.push(s);
                }
            }
            (Some(x), None) | (None, Some(x)) => {
                let var = if resolve(a, &s).is_none() { a } else { b };
                let var = var.as_variable().expect("unresolved term is a variable");
                for partner in same_as_partners(graph, &x) {
                    let mut n = s.clone();
                    n.insert(var.clone(), partner);
                    out.push(n);
                }
            }
            (None, None) => {
                let (va, vb) = (a.as_variable().unwrap(), b.as_variable().unwrap());
                let pat = TriplePattern::new(Term::var("__sa_s"), same.clone(), Term::var("__sa_o"));
                for m in graph.match_pattern(&pat) {
                    let x = m.get(&Variable::new("__sa_s").unwrap()).unwrap();
                    let y = m.get(&Variable::new("__sa_o").unwrap()).unwrap();
                    for (l, r) in [(x, y), (y, x)] {
                        let mut n = s.clone();
                        if n.bind(va, l) && n.bind(vb, r) {
                            out.push(n);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn body_solutions(graph: &Graph, rule: &Rule, reference_date: Date) -> Result<Vec<Solution>, RuleError> {
    let rdf_type = vocab::rdf_type();
    let mut sols = Vec::from([Solution::new()]);
    for atom in plan(rule)? {
        if sols.is_empty() {
            break;
        }
        sols = match atom {
            Atom::Class { class, arg } => {
                extend_by_pattern(graph, &TriplePattern::new(arg.clone(), rdf_type.clone(), class.clone()), sols)
            }
            Atom::Property { predicate, subject, object } => {
                extend_by_pattern(graph, &TriplePattern::new(subject.clone(), predicate.clone(), object.clone()), sols)
            }
            Atom::SameAs(a, b) => eval_same_as(graph, a, b, sols),
            Atom::Builtin(call) => {
                let mut kept = Vec::with_capacity(sols.len());
                for mut s in sols {
                    match eval_builtin(call, &s, reference_date) {
                        Ok(BuiltinOutcome::Pass) => kept.push(s),
                        Ok(BuiltinOutcome::Fail) => {}
                        Ok(BuiltinOutcome::Bind(v, n)) => {
                            s.insert(v, n);
                            kept.push(s);
                        }
                        Err(source) => {
                            return Err(RuleError::Builtin { rule: rule.id.clone(), binding: s, source });
                        }
                    }
                }
                kept
            }
        };
    }
    Ok(sols)
}

fn ground_head(rule: &Rule, atom: &Atom, s: &Solution) -> Result<Triple, RuleError> {
    let value = |t: &Term| resolve(t, s).expect("safe rule binds every head variable");
    let subject = |t: &Term| match value(t) {
        Node::Iri(i) => Ok(i),
        other => Err(RuleError::LiteralSubject { rule: rule.id.clone(), value: other.to_string(), binding: s.clone() }),
    };
    Ok(match atom {
        Atom::Class { class, arg } => Triple::new(subject(arg)?, vocab::rdf_type(), class.clone()),
        Atom::Property { predicate, subject: sub, object } => {
            Triple::new(subject(sub)?, predicate.clone(), value(object))
        }
        Atom::SameAs(a, b) => Triple::new(subject(a)?, vocab::owl_same_as(), value(b)),
        Atom::Builtin(_) => return Err(RuleError::BuiltinInHead { rule: rule.id.clone() }),
    })
}

/// One application of `rule` against `graph`: the ground head triples of
/// every body match that are not already in the graph.
pub fn apply_rule_once(graph: &Graph, rule: &Rule, reference_date: Date) -> Result<BTreeSet<Triple>, RuleError> {
    rule.check_safety()?;
    let mut out = BTreeSet::new();
    for s in body_solutions(graph, rule, reference_date)? {
        for atom in &rule.head {
            let t = ground_head(rule, atom, &s)?;
            if !graph.contains(&t) {
                out.insert(t);
            }
        }
    }
    Ok(out)
}

/// Result of saturating a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Saturation {
    pub graph: Graph,
    /// Triples added on top of the input graph.
    pub derived: BTreeSet<Triple>,
    /// Number of rounds that added at least one triple.
    pub rounds: usize,
}

/// Forward-chains `rules` to a fixpoint.
///
/// Each round applies every rule to the same snapshot and adds the union of
/// their results, so the fixpoint does not depend on rule order. Fails with
/// [`RuleError::NonTermination`] if new triples still appear after
/// `max_rounds` productive rounds.
pub fn saturate(
    graph: &Graph,
    rules: &[Rule],
    reference_date: Date,
    max_rounds: usize,
) -> Result<Saturation, RuleError> {
    if max_rounds == 0 {
        return Err(RuleError::ZeroRounds);
    }
    let mut current = graph.clone();
    let mut derived = BTreeSet::new();
    let mut rounds = 0;
    loop {
        let mut fresh = BTreeSet::new();
        for rule in rules {
            fresh.extend(apply_rule_once(&current, rule, reference_date)?);
        }
        if fresh.is_empty() {
            return Ok(Saturation { graph: current, derived, rounds });
        }
        if rounds == max_rounds {
            return Err(RuleError::NonTermination { rounds, pending: fresh.len() });
        }
        current = current.extend(fresh.iter().cloned());
        derived.extend(fresh);
        rounds += 1;
    }
}
