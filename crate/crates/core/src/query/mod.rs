//! SPARQL subset: basic graph patterns, FILTER, DISTINCT, ORDER BY,
//! LIMIT and OFFSET.

mod eval;
mod filter;
mod parse;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::TriplePattern;
use crate::lex::Position;
use crate::term::{Node, Variable};

pub use eval::{eval_bgp, eval_filter, execute, order_cmp, Diagnostics, QueryResults};
pub use filter::{eval_expr, FilterError, Truth};
pub use parse::parse_query;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FilterExpr {
    Or(Box<FilterExpr>, Box<FilterExpr>),
    And(Box<FilterExpr>, Box<FilterExpr>),
    Not(Box<FilterExpr>),
    Compare(CompareOp, Box<FilterExpr>, Box<FilterExpr>),
    Contains(Box<FilterExpr>, Box<FilterExpr>),
    Str(Box<FilterExpr>),
    Var(Variable),
    Const(Node),
}

impl FilterExpr {
    pub fn or(a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::And(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: FilterExpr) -> Self {
        FilterExpr::Not(Box::new(a))
    }

    pub fn compare(op: CompareOp, a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::Compare(op, Box::new(a), Box::new(b))
    }

    pub fn contains(a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::Contains(Box::new(a), Box::new(b))
    }

    pub fn str(a: FilterExpr) -> Self {
        FilterExpr::Str(Box::new(a))
    }

    pub fn var(v: &Variable) -> Self {
        FilterExpr::Var(v.clone())
    }

    pub fn constant(n: impl Into<Node>) -> Self {
        FilterExpr::Const(n.into())
    }

    /// Left-nested disjunction; `None` for an empty list.
    pub fn any(exprs: impl IntoIterator<Item = FilterExpr>) -> Option<Self> {
        exprs.into_iter().reduce(FilterExpr::or)
    }

    pub fn variables(&self) -> BTreeSet<&Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a Variable>) {
        match self {
            FilterExpr::Or(a, b)
            | FilterExpr::And(a, b)
            | FilterExpr::Compare(_, a, b)
            | FilterExpr::Contains(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            FilterExpr::Not(a) | FilterExpr::Str(a) => a.collect_vars(out),
            FilterExpr::Var(v) => {
                out.insert(v);
            }
            FilterExpr::Const(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderKey {
    pub variable: Variable,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Projection {
    /// `SELECT *`: every BGP variable, in name order.
    All,
    Vars(Vec<Variable>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub projection: Projection,
    pub distinct: bool,
    pub bgp: Vec<TriplePattern>,
    pub filters: Vec<FilterExpr>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl Query {
    /// `SELECT *` over `bgp` with no filters or modifiers.
    pub fn select_all(bgp: Vec<TriplePattern>) -> Self {
        Query {
            projection: Projection::All,
            distinct: false,
            bgp,
            filters: Vec::new(),
            order_by: Vec::new(),
            limit: None,
            offset: None,
        }
    }

    pub fn bgp_variables(&self) -> BTreeSet<&Variable> {
        self.bgp.iter().flat_map(TriplePattern::variables).collect()
    }

    /// Output columns in order.
    pub fn select_variables(&self) -> Vec<Variable> {
        match &self.projection {
            Projection::All => self.bgp_variables().into_iter().cloned().collect(),
            Projection::Vars(v) => v.clone(),
        }
    }

    /// Every selected, filtered or ordered variable must occur in the BGP.
    pub fn validate(&self) -> Result<(), QueryError> {
        let bound = self.bgp_variables();
        let check = |v: &Variable, role: &'static str| {
            if bound.contains(v) {
                Ok(())
            } else {
                Err(QueryError::UnboundVariable { variable: v.clone(), role })
            }
        };
        if let Projection::Vars(vars) = &self.projection {
            vars.iter().try_for_each(|v| check(v, "SELECT"))?;
        }
        for f in &self.filters {
            f.variables().into_iter().try_for_each(|v| check(v, "FILTER"))?;
        }
        self.order_by.iter().try_for_each(|k| check(&k.variable, "ORDER BY"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{pos}: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{role} variable {variable} does not occur in the graph pattern")]
    UnboundVariable { variable: Variable, role: &'static str },
}

impl fmt::Debug for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parseable, fully parenthesised form.
impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::Or(a, b) => write!(f, "({a} || {b})"),
            FilterExpr::And(a, b) => write!(f, "({a} && {b})"),
            FilterExpr::Not(a) => write!(f, "!{a}"),
            FilterExpr::Compare(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            FilterExpr::Contains(a, b) => write!(f, "contains({a}, {b})"),
            FilterExpr::Str(a) => write!(f, "str({a})"),
            FilterExpr::Var(v) => write!(f, "{v}"),
            FilterExpr::Const(n) => write!(f, "{n}"),
        }
    }
}

/// Query text with absolute IRIs; parses back to an equal query.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        match &self.projection {
            Projection::All => f.write_str("*")?,
            Projection::Vars(vars) => {
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{v}")?;
                }
            }
        }
        f.write_str(" WHERE {\n")?;
        for p in &self.bgp {
            writeln!(f, "  {p}")?;
        }
        for e in &self.filters {
            writeln!(f, "  FILTER ({e})")?;
        }
        f.write_str("}")?;
        if !self.order_by.is_empty() {
            f.write_str("\nORDER BY")?;
            for k in &self.order_by {
                let dir = if k.descending { "DESC" } else { "ASC" };
                write!(f, " {dir}({})", k.variable)?;
            }
        }
        if let Some(n) = self.limit {
            write!(f, "\nLIMIT {n}")?;
        }
        if let Some(n) = self.offset {
            write!(f, "\nOFFSET {n}")?;
        }
        Ok(())
    }
}
