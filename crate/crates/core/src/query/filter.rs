use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::Ordering;

use thiserror::Error;

use super::{CompareOp, FilterExpr};
use crate::solution::Solution;
use crate::term::{compare_values, values_equal, Literal, Node, Variable};

/// Why a filter could not be evaluated for one solution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("unbound variable {0}")]
    Unbound(Variable),
    #[error("{0}")]
    Type(String),
}

/// Outcome of a filter on one solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Pass,
    Fail,
    Error,
}

fn type_err(msg: impl Into<String>) -> FilterError {
    FilterError::Type(msg.into())
}

fn boolean(b: bool) -> Node {
    Node::Literal(Literal::Boolean(b))
}

fn truth(e: &FilterExpr, s: &Solution) -> Result<bool, FilterError> {
    match eval_expr(e, s)? {
        Node::Literal(Literal::Boolean(b)) => Ok(b),
        other => Err(type_err(format!("{other} is not a boolean"))),
    }
}

fn string_arg(n: Node, what: &str) -> Result<alloc::sync::Arc<str>, FilterError> {
    match n {
        Node::Literal(Literal::String(s)) => Ok(s),
        other => Err(type_err(format!("{what} expects a string, got {other}"))),
    }
}

/// Evaluates an expression to a value. Logical operators follow the
/// three-valued rules of SPARQL: `true || error` is true and
/// `false && error` is false.
pub fn eval_expr(e: &FilterExpr, s: &Solution) -> Result<Node, FilterError> {
    match e {
        FilterExpr::Var(v) => s.get(v).cloned().ok_or_else(|| FilterError::Unbound(v.clone())),
        FilterExpr::Const(n) => Ok(n.clone()),
        FilterExpr::Not(a) => truth(a, s).map(|b| boolean(!b)),
        FilterExpr::Or(a, b) => match (truth(a, s), truth(b, s)) {
            (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
            (Ok(false), Ok(false)) => Ok(boolean(false)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        },
        FilterExpr::And(a, b) => match (truth(a, s), truth(b, s)) {
            (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
            (Ok(true), Ok(true)) => Ok(boolean(true)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        },
        FilterExpr::Compare(op, a, b) => {
            let (x, y) = (eval_expr(a, s)?, eval_expr(b, s)?);
            let err = |m: crate::term::TypeMismatch| type_err(m.to_string());
            let r = match op {
                CompareOp::Eq => values_equal(&x, &y).map_err(err)?,
                CompareOp::Ne => !values_equal(&x, &y).map_err(err)?,
                _ => {
                    let ord = compare_values(&x, &y).map_err(err)?;
                    match op {
                        CompareOp::Lt => ord == Ordering::Less,
                        CompareOp::Le => ord != Ordering::Greater,
                        CompareOp::Gt => ord == Ordering::Greater,
                        _ => ord != Ordering::Less,
                    }
                }
            };
            Ok(boolean(r))
        }
        FilterExpr::Contains(a, b) => {
            let hay = string_arg(eval_expr(a, s)?, "contains")?;
            let needle = string_arg(eval_expr(b, s)?, "contains")?;
            Ok(boolean(hay.contains(&*needle)))
        }
        FilterExpr::Str(a) => Ok(Node::Literal(match eval_expr(a, s)? {
            Node::Iri(i) => Literal::string(i.as_str()),
            Node::Literal(l) => Literal::string(l.lexical()),
        })),
    }
}

impl FilterExpr {
    /// Effective boolean value of the filter on `s`.
    pub fn test(&self, s: &Solution) -> Truth {
        match truth(self, s) {
            Ok(true) => Truth::Pass,
            Ok(false) => Truth::Fail,
            Err(_) => Truth::Error,
        }
    }
}
