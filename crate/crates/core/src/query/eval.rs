use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::filter::Truth;
use super::{FilterExpr, Query};
use crate::graph::{Graph, TriplePattern};
use crate::solution::Solution;
use crate::term::{compare_values, Literal, Node, Term, Variable};

/// Counters collected while evaluating a query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Solutions dropped because a filter raised a type or binding error.
    /// Filters run as soon as their variables are bound, so this counts
    /// partial solutions of the join.
    pub filter_errors: usize,
}

impl Diagnostics {
    pub fn absorb(&mut self, other: Diagnostics) {
        self.filter_errors += other.filter_errors;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResults {
    pub variables: Vec<Variable>,
    pub solutions: Vec<Solution>,
    pub diagnostics: Diagnostics,
}

fn bound_count(p: &TriplePattern, bound: &BTreeSet<Variable>) -> usize {
    p.terms()
        .into_iter()
        .filter(|t| match t {
            Term::Variable(v) => bound.contains(v),
            _ => true,
        })
        .count()
}

/// Joins the patterns of `bgp`, always extending with a pattern that shares
/// a variable with the patterns joined so far, preferring the one with the
/// most bound positions (ties go to the smaller index estimate). The
/// result is sorted under the term order.
pub fn eval_bgp(graph: &Graph, bgp: &[TriplePattern]) -> Vec<Solution> {
    join(graph, bgp, &[], &mut Diagnostics::default())
}

/// The join behind [`eval_bgp`], applying each filter as soon as all of its
/// variables are bound. Filters whose variables never get bound are applied
/// at the end.
fn join(graph: &Graph, bgp: &[TriplePattern], filters: &[FilterExpr], diag: &mut Diagnostics) -> Vec<Solution> {
    let mut remaining: Vec<&TriplePattern> = bgp.iter().collect();
    let mut pending: Vec<(&FilterExpr, BTreeSet<&Variable>)> = filters.iter().map(|f| (f, f.variables())).collect();
    let mut bound = BTreeSet::new();
    let mut sols = Vec::from([Solution::new()]);
    loop {
        let (ready, rest): (Vec<_>, Vec<_>) =
            pending.into_iter().partition(|(_, vars)| remaining.is_empty() || vars.iter().all(|v| bound.contains(*v)));
        pending = rest;
        for (f, _) in ready {
            sols = eval_filter(sols, f, diag);
        }
        if remaining.is_empty() || sols.is_empty() {
            break;
        }
        let (i, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let connected = bound.is_empty() || p.variables().any(|v| bound.contains(v));
                (i, (!connected, usize::MAX - bound_count(p, &bound), graph.estimate(p), i))
            })
            .min_by_key(|(_, key)| *key)
            .expect("non-empty");
        let pat = remaining.remove(i);
        let mut next = Vec::new();
        for s in &sols {
            graph.extend_matches(pat, s, &mut next);
        }
        bound.extend(pat.variables().cloned());
        sols = next;
    }
    if !remaining.is_empty() {
        sols.clear();
    }
    sols.sort();
    sols.dedup();
    sols
}

/// Keeps the solutions on which `filter` passes. Failures and errors both
/// drop the solution; errors are counted in `diag`.
pub fn eval_filter(solutions: Vec<Solution>, filter: &FilterExpr, diag: &mut Diagnostics) -> Vec<Solution> {
    solutions
        .into_iter()
        .filter(|s| match filter.test(s) {
            Truth::Pass => true,
            Truth::Fail => false,
            Truth::Error => {
                diag.filter_errors += 1;
                false
            }
        })
        .collect()
}

fn class_rank(n: &Node) -> u8 {
    match n {
        Node::Iri(_) => 0,
        Node::Literal(Literal::Boolean(_)) => 1,
        Node::Literal(Literal::Date(_)) => 2,
        Node::Literal(Literal::Float(_) | Literal::Integer(_)) => 3,
        Node::Literal(Literal::String(_)) => 4,
    }
}

/// Ordering used by ORDER BY: IRIs first, then literals grouped by
/// datatype, with integers and floats compared together by value.
pub fn order_cmp(a: &Node, b: &Node) -> Ordering {
    class_rank(a).cmp(&class_rank(b)).then_with(|| match (a, b) {
        (Node::Iri(x), Node::Iri(y)) => x.cmp(y),
        _ => compare_values(a, b).unwrap_or(Ordering::Equal),
    })
}

/// Runs a query: BGP with filters, ORDER BY (ties broken by the full solution),
/// projection, DISTINCT, then OFFSET and LIMIT.
pub fn execute(graph: &Graph, query: &Query) -> QueryResults {
    let mut diagnostics = Diagnostics::default();
    let mut sols = join(graph, &query.bgp, &query.filters, &mut diagnostics);
    if !query.order_by.is_empty() {
        sols.sort_by(|x, y| {
            query
                .order_by
                .iter()
                .map(|k| {
                    let o = match (x.get(&k.variable), y.get(&k.variable)) {
                        (Some(a), Some(b)) => order_cmp(a, b),
                        (a, b) => a.is_some().cmp(&b.is_some()),
                    };
                    if k.descending {
                        o.reverse()
                    } else {
                        o
                    }
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
                .then_with(|| x.cmp(y))
        });
    }
    let variables = query.select_variables();
    let mut rows: Vec<Solution> = sols.iter().map(|s| s.project(&variables)).collect();
    if query.distinct {
        let mut seen = BTreeSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    let start = query.offset.unwrap_or(0).min(rows.len());
    let end = query.limit.map_or(rows.len(), |l| start.saturating_add(l).min(rows.len()));
    let solutions = rows.drain(start..end).collect();
    QueryResults { variables, solutions, diagnostics }
}
