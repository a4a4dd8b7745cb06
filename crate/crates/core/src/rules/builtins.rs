use alloc::string::{String, ToString};
use core::cmp::Ordering;

use thiserror::Error;

use super::{Builtin, BuiltinCall};
use crate::solution::Solution;
use crate::term::{compare_values, values_equal, Date, Literal, Node, Term, TypeMismatch, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinOutcome {
    Pass,
    Fail,
    /// `duration` result: bind the variable to the value.
    Bind(Variable, Node),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuiltinError {
    #[error("{builtin}: unbound variable {variable}")]
    Unbound { builtin: &'static str, variable: Variable },
    #[error("{builtin}: {detail}")]
    Type { builtin: &'static str, detail: String },
}

fn resolve(call: &BuiltinCall, t: &Term, binding: &Solution) -> Result<Node, BuiltinError> {
    match t {
        Term::Variable(v) => binding
            .get(v)
            .cloned()
            .ok_or_else(|| BuiltinError::Unbound { builtin: call.builtin.name(), variable: v.clone() }),
        other => Ok(other.as_node().expect("ground term")),
    }
}

fn type_err(call: &BuiltinCall, e: TypeMismatch) -> BuiltinError {
    BuiltinError::Type { builtin: call.builtin.name(), detail: e.to_string() }
}

fn pass(b: bool) -> BuiltinOutcome {
    if b {
        BuiltinOutcome::Pass
    } else {
        BuiltinOutcome::Fail
    }
}

/// Evaluates one builtin call under `binding`.
///
/// Comparisons follow the filter value semantics (exact integer/float
/// coercion, no string-to-number coercion). `duration` binds its first
/// argument to the whole months elapsed from its date argument to
/// `reference_date`; if that variable is already bound the call checks the
/// value instead.
pub fn eval_builtin(
    call: &BuiltinCall,
    binding: &Solution,
    reference_date: Date,
) -> Result<BuiltinOutcome, BuiltinError> {
    let arg = |i: usize| resolve(call, &call.args[i], binding);
    match call.builtin {
        Builtin::GreaterThan | Builtin::LessThan => {
            let (a, b) = (arg(0)?, arg(1)?);
            let ord = compare_values(&a, &b).map_err(|e| type_err(call, e))?;
            let want = if call.builtin == Builtin::GreaterThan { Ordering::Greater } else { Ordering::Less };
            Ok(pass(ord == want))
        }
        Builtin::Equal => {
            let (a, b) = (arg(0)?, arg(1)?);
            values_equal(&a, &b).map(pass).map_err(|e| type_err(call, e))
        }
        Builtin::Contains => {
            let (a, b) = (arg(0)?, arg(1)?);
            match (&a, &b) {
                (Node::Literal(Literal::String(h)), Node::Literal(Literal::String(n))) => Ok(pass(h.contains(&**n))),
                _ => Err(BuiltinError::Type {
                    builtin: "contains",
                    detail: alloc::format!("expected two strings, got {a} and {b}"),
                }),
            }
        }
        Builtin::Duration => {
            let date = match arg(1)? {
                Node::Literal(Literal::Date(d)) => d,
                other => {
                    return Err(BuiltinError::Type {
                        builtin: "duration",
                        detail: alloc::format!("expected a date, got {other}"),
                    })
                }
            };
            let months = Node::Literal(Literal::Integer(date.months_until(reference_date)));
            let out = call.args[0].as_variable().expect("checked at parse time");
            match binding.get(out) {
                Some(existing) => values_equal(existing, &months).map(pass).map_err(|e| type_err(call, e)),
                None => Ok(BuiltinOutcome::Bind(out.clone(), months)),
            }
        }
    }
}
