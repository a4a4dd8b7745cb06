//! Indexed triple store.
//!
//! A [`Graph`] is an immutable snapshot behind an `Arc`; "mutating"
//! operations return a new snapshot and leave the original untouched. Bulk
//! construction goes through [`GraphBuilder`], the single writer.
//!
//! Three nested-map indexes are maintained (SPO, POS, OSP). Every index holds
//! exactly the same triple set; [`Graph::match_pattern`] picks the one with
//! the longest bound prefix for the pattern at hand.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::solution::Solution;
use crate::term::{Iri, Node, Term, Variable};
use crate::vocab;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Node,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Node>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One N-Triples line, without the trailing newline.
impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: impl Into<Term>, predicate: impl Into<Term>, object: impl Into<Term>) -> Self {
        TriplePattern { subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.terms().into_iter().filter_map(Term::as_variable)
    }

    /// Replaces variables bound in `solution` by their values.
    pub fn substitute(&self, solution: &Solution) -> TriplePattern {
        let sub = |t: &Term| match t {
            Term::Variable(v) => solution.get(v).cloned().map(Term::from).unwrap_or_else(|| t.clone()),
            other => other.clone(),
        };
        TriplePattern { subject: sub(&self.subject), predicate: sub(&self.predicate), object: sub(&self.object) }
    }

    /// The triple this pattern denotes when it has no variables.
    pub fn to_triple(&self) -> Option<Triple> {
        match (&self.subject, &self.predicate, self.object.as_node()) {
            (Term::Iri(s), Term::Iri(p), Some(o)) => Some(Triple::new(s.clone(), p.clone(), o)),
            _ => None,
        }
    }
}

impl fmt::Debug for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl From<&Triple> for TriplePattern {
    fn from(t: &Triple) -> Self {
        TriplePattern::new(t.subject.clone(), t.predicate.clone(), t.object.clone())
    }
}

/// Which index to drive a pattern match from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

type Index<A, B, C> = BTreeMap<A, BTreeMap<B, BTreeSet<C>>>;

#[derive(Clone, Default)]
struct Indexes {
    spo: Index<Iri, Iri, Node>,
    pos: Index<Iri, Node, Iri>,
    osp: Index<Node, Iri, Iri>,
    len: usize,
}

fn index_insert<A: Ord + Clone, B: Ord + Clone, C: Ord>(idx: &mut Index<A, B, C>, a: &A, b: &B, c: C) -> bool {
    idx.entry(a.clone()).or_default().entry(b.clone()).or_default().insert(c)
}

/// Enumerates `(a, b, c)` entries of a three-level index, restricted to the
/// given keys. Bound keys below an unbound level are looked up per branch.
fn scan<A: Ord, B: Ord, C: Ord>(
    idx: &Index<A, B, C>,
    a: Option<&A>,
    b: Option<&B>,
    c: Option<&C>,
    f: &mut dyn FnMut(&A, &B, &C),
) {
    let mut level2 = |ka: &A, m: &BTreeMap<B, BTreeSet<C>>| {
        let mut level3 = |kb: &B, set: &BTreeSet<C>| match c {
            Some(kc) => {
                if let Some(kc) = set.get(kc) {
                    f(ka, kb, kc)
                }
            }
            None => set.iter().for_each(|kc| f(ka, kb, kc)),
        };
        match b {
            Some(kb) => {
                if let Some((kb, set)) = m.get_key_value(kb) {
                    level3(kb, set)
                }
            }
            None => m.iter().for_each(|(kb, set)| level3(kb, set)),
        }
    };
    match a {
        Some(ka) => {
            if let Some((ka, m)) = idx.get_key_value(ka) {
                level2(ka, m)
            }
        }
        None => idx.iter().for_each(|(ka, m)| level2(ka, m)),
    }
}

/// Immutable, cheaply clonable graph snapshot.
#[derive(Clone, Default)]
pub struct Graph {
    inner: Arc<Indexes>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.inner.spo.get(&t.subject).and_then(|m| m.get(&t.predicate)).is_some_and(|set| set.contains(&t.object))
    }

    /// New snapshot containing `t` as well. Inserting a triple that is
    /// already present returns an equal graph.
    pub fn insert(&self, t: Triple) -> Graph {
        if self.contains(&t) {
            return self.clone();
        }
        let mut b = self.to_builder();
        b.insert(t);
        b.build()
    }

    pub fn extend(&self, triples: impl IntoIterator<Item = Triple>) -> Graph {
        let mut b = self.to_builder();
        let mut added = false;
        for t in triples {
            added |= b.insert(t);
        }
        if added {
            b.build()
        } else {
            self.clone()
        }
    }

    pub fn union(&self, other: &Graph) -> Graph {
        if other.len() > self.len() {
            return other.extend(self.iter());
        }
        self.extend(other.iter())
    }

    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder { indexes: (*self.inner).clone() }
    }

    /// All triples in SPO (term) order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.inner.spo.iter().flat_map(|(s, m)| {
            m.iter().flat_map(move |(p, os)| os.iter().map(move |o| Triple::new(s.clone(), p.clone(), o.clone())))
        })
    }

    pub fn objects<'a>(&'a self, subject: &Iri, predicate: &Iri) -> impl Iterator<Item = &'a Node> + 'a {
        self.inner.spo.get(subject).and_then(|m| m.get(predicate)).into_iter().flatten()
    }

    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Node) -> impl Iterator<Item = &'a Iri> + 'a {
        self.inner.pos.get(predicate).and_then(|m| m.get(object)).into_iter().flatten()
    }

    /// Instances of `class` via `rdf:type`.
    pub fn instances_of<'a>(&'a self, class: &Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        self.subjects(&vocab::rdf_type(), &Node::Iri(class.clone()))
    }

    /// Cheap upper bound on the number of triples matching `pat`, ignoring
    /// repeated-variable constraints.
    pub fn estimate(&self, pat: &TriplePattern) -> usize {
        let (s, p) = subject_predicate(pat);
        let o = pat.object.as_node();
        match (s, p, &o) {
            (None, None, None) => self.len(),
            _ => {
                let mut n = 0;
                let order = best_index(s.is_some(), p.is_some(), o.is_some());
                self.scan_positions(order, s, p, o.as_ref(), &mut |_, _, _| n += 1);
                n
            }
        }
    }

    /// Bindings for every stored triple unifying with `pat`, sorted under the
    /// term order. A ground pattern yields one empty binding when the triple
    /// is present.
    pub fn match_pattern(&self, pat: &TriplePattern) -> Vec<Solution> {
        let (s, p) = subject_predicate(pat);
        let o = !matches!(pat.object, Term::Variable(_));
        self.match_with(best_index(s.is_some(), p.is_some(), o), pat)
    }

    /// Extends `base` with every binding of `pat` that is compatible with
    /// it, appending the results to `out` in index order.
    pub fn extend_matches(&self, pat: &TriplePattern, base: &Solution, out: &mut Vec<Solution>) {
        let pat = pat.substitute(base);
        if matches!(pat.subject, Term::Literal(_)) || matches!(pat.predicate, Term::Literal(_)) {
            return;
        }
        let (s, p) = subject_predicate(&pat);
        let o = pat.object.as_node();
        let order = best_index(s.is_some(), p.is_some(), o.is_some());
        self.scan_positions(order, s, p, o.as_ref(), &mut |s, p, o| {
            let mut sol = base.clone();
            let ok = unify(&pat.subject, &Node::Iri(s.clone()), &mut sol)
                && unify(&pat.predicate, &Node::Iri(p.clone()), &mut sol)
                && unify(&pat.object, o, &mut sol);
            if ok {
                out.push(sol);
            }
        });
    }

    /// Same as [`Graph::match_pattern`] but driven by a specific index.
    pub fn match_pattern_with(&self, order: IndexOrder, pat: &TriplePattern) -> Vec<Solution> {
        self.match_with(order, pat)
    }

    fn match_with(&self, order: IndexOrder, pat: &TriplePattern) -> Vec<Solution> {
        // A literal cannot sit in subject or predicate position.
        if matches!(pat.subject, Term::Literal(_)) || matches!(pat.predicate, Term::Literal(_)) {
            return Vec::new();
        }
        let (s, p) = subject_predicate(pat);
        let o = pat.object.as_node();
        let mut out = Vec::new();
        self.scan_positions(order, s, p, o.as_ref(), &mut |s, p, o| {
            let mut sol = Solution::new();
            let ok = unify(&pat.subject, &Node::Iri(s.clone()), &mut sol)
                && unify(&pat.predicate, &Node::Iri(p.clone()), &mut sol)
                && unify(&pat.object, o, &mut sol);
            if ok {
                out.push(sol);
            }
        });
        out.sort();
        out
    }

    fn scan_positions(
        &self,
        order: IndexOrder,
        s: Option<&Iri>,
        p: Option<&Iri>,
        o: Option<&Node>,
        f: &mut dyn FnMut(&Iri, &Iri, &Node),
    ) {
        let idx = &*self.inner;
        match order {
            IndexOrder::Spo => scan(&idx.spo, s, p, o, &mut |s, p, o| f(s, p, o)),
            IndexOrder::Pos => scan(&idx.pos, p, o, s, &mut |p, o, s| f(s, p, o)),
            IndexOrder::Osp => scan(&idx.osp, o, s, p, &mut |o, s, p| f(s, p, o)),
        }
    }

    /// Index contents as sorted triple lists, for consistency checks.
    pub fn index_contents(&self, order: IndexOrder) -> Vec<Triple> {
        let mut v = Vec::with_capacity(self.len());
        self.scan_positions(order, None, None, None, &mut |s, p, o| {
            v.push(Triple::new(s.clone(), p.clone(), o.clone()))
        });
        v
    }
}

fn subject_predicate(pat: &TriplePattern) -> (Option<&Iri>, Option<&Iri>) {
    fn iri(t: &Term) -> Option<&Iri> {
        match t {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }
    (iri(&pat.subject), iri(&pat.predicate))
}

fn best_index(s: bool, p: bool, o: bool) -> IndexOrder {
    match (s, p, o) {
        (true, false, true) => IndexOrder::Osp,
        (true, _, _) => IndexOrder::Spo,
        (false, true, _) => IndexOrder::Pos,
        (false, false, true) => IndexOrder::Osp,
        (false, false, false) => IndexOrder::Spo,
    }
}

fn unify(pattern: &Term, value: &Node, sol: &mut Solution) -> bool {
    match pattern {
        Term::Variable(v) => sol.bind(v, value),
        Term::Iri(i) => matches!(value, Node::Iri(j) if i == j),
        Term::Literal(l) => matches!(value, Node::Literal(m) if l == m),
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || (self.len() == other.len() && self.inner.spo == other.inner.spo)
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut b = GraphBuilder::new();
        for t in iter {
            b.insert(t);
        }
        b.build()
    }
}

/// Single-writer accumulator that freezes into a [`Graph`].
#[derive(Clone, Default)]
pub struct GraphBuilder {
    indexes: Indexes,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder::default()
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let idx = &mut self.indexes;
        if !index_insert(&mut idx.spo, &t.subject, &t.predicate, t.object.clone()) {
            return false;
        }
        index_insert(&mut idx.pos, &t.predicate, &t.object, t.subject.clone());
        index_insert(&mut idx.osp, &t.object, &t.subject, t.predicate);
        idx.len += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.indexes.len
    }

    pub fn is_empty(&self) -> bool {
        self.indexes.len == 0
    }

    pub fn build(self) -> Graph {
        Graph { inner: Arc::new(self.indexes) }
    }
}
