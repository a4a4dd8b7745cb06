//! SWRL-style rules and forward-chaining saturation.
//!
//! Rule text format:
//!
//! ```text
//! @prefix upo: <http://utc.fr/upo/ns#> .
//! # comment
//! id: Class(?v) ∧ pred(?v, term) ∧ sameAs(a, b) ∧ swrlb:greaterThan(?x, 6) -> head ∧ head .
//! ```
//!
//! `∧` and `^` both separate atoms; `->` and `→` both separate body from
//! head. One-argument atoms are class atoms, two-argument atoms are property
//! atoms. Builtins are recognised by name under the `swrlb:`, `temporal:` or
//! `builtin:` prefixes. `vrai`/`faux` are boolean literals.

mod builtins;
mod engine;
mod parse;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::lex::Position;
use crate::solution::Solution;
use crate::term::{Iri, Term, Variable};

pub use builtins::{eval_builtin, BuiltinError, BuiltinOutcome};
pub use engine::{apply_rule_once, saturate, Saturation};
pub use parse::parse_rules;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    GreaterThan,
    LessThan,
    Equal,
    Contains,
    Duration,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "greaterThan" => Some(Builtin::GreaterThan),
            "lessThan" => Some(Builtin::LessThan),
            "equal" => Some(Builtin::Equal),
            "contains" => Some(Builtin::Contains),
            "duration" => Some(Builtin::Duration),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::GreaterThan => "greaterThan",
            Builtin::LessThan => "lessThan",
            Builtin::Equal => "equal",
            Builtin::Contains => "contains",
            Builtin::Duration => "duration",
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Builtin::Duration => "temporal",
            _ => "swrlb",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BuiltinCall {
    pub builtin: Builtin,
    pub args: Vec<Term>,
}

impl BuiltinCall {
    /// Variable bound by this call (only `duration` binds one).
    pub fn output(&self) -> Option<&Variable> {
        match self.builtin {
            Builtin::Duration => self.args.first().and_then(Term::as_variable),
            _ => None,
        }
    }

    /// Variables that must already be bound before the call is evaluated.
    pub fn inputs(&self) -> impl Iterator<Item = &Variable> {
        let skip = usize::from(self.builtin == Builtin::Duration);
        self.args.iter().skip(skip).filter_map(Term::as_variable)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Class { class: Iri, arg: Term },
    Property { predicate: Iri, subject: Term, object: Term },
    SameAs(Term, Term),
    Builtin(BuiltinCall),
}

impl Atom {
    pub fn variables(&self) -> Vec<&Variable> {
        match self {
            Atom::Class { arg, .. } => arg.as_variable().into_iter().collect(),
            Atom::Property { subject, object, .. } => {
                [subject, object].into_iter().filter_map(Term::as_variable).collect()
            }
            Atom::SameAs(a, b) => [a, b].into_iter().filter_map(Term::as_variable).collect(),
            Atom::Builtin(call) => call.args.iter().filter_map(Term::as_variable).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
}

impl Rule {
    /// Variables the body binds: those of class, property and sameAs atoms
    /// plus the output of each `duration` call.
    pub fn body_bound(&self) -> Vec<&Variable> {
        let mut vars = Vec::new();
        for atom in &self.body {
            match atom {
                Atom::Builtin(call) => vars.extend(call.output()),
                other => vars.extend(other.variables()),
            }
        }
        vars.sort();
        vars.dedup();
        vars
    }

    /// Checks the safety invariant: head atoms are not builtins and every
    /// head variable is bound by the body.
    pub fn check_safety(&self) -> Result<(), RuleError> {
        let bound = self.body_bound();
        for atom in &self.head {
            if matches!(atom, Atom::Builtin(_)) {
                return Err(RuleError::BuiltinInHead { rule: self.id.clone() });
            }
            for v in atom.variables() {
                if !bound.contains(&v) {
                    return Err(RuleError::UnsafeHeadVariable { rule: self.id.clone(), variable: v.clone() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("{pos}: {message}")]
    Parse { pos: Position, message: String },
    #[error("rule {rule}: head variable {variable} is not bound by the body")]
    UnsafeHeadVariable { rule: String, variable: Variable },
    #[error("rule {rule}: builtins are not allowed in the head")]
    BuiltinInHead { rule: String },
    #[error("rule {rule}: {source} (binding {binding:?})")]
    Builtin {
        rule: String,
        binding: Solution,
        #[source]
        source: BuiltinError,
    },
    #[error("rule {rule}: cannot order body atoms, {variable} is never bound")]
    UnboundBodyVariable { rule: String, variable: Variable },
    #[error("rule {rule}: head subject {value} is not an IRI (binding {binding:?})")]
    LiteralSubject { rule: String, value: String, binding: Solution },
    #[error("max_rounds must be at least 1")]
    ZeroRounds,
    #[error("no fixpoint after {rounds} rounds ({pending} new triples still pending)")]
    NonTermination { rounds: usize, pending: usize },
}

impl fmt::Debug for BuiltinCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BuiltinCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}(", self.builtin.prefix(), self.builtin.name())?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Class { class, arg } => write!(f, "{class}({arg})"),
            Atom::Property { predicate, subject, object } => write!(f, "{predicate}({subject}, {object})"),
            Atom::SameAs(a, b) => write!(f, "sameAs({a}, {b})"),
            Atom::Builtin(call) => write!(f, "{call}"),
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Writes the rule back in the parseable text format.
impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, atoms: &[Atom]| -> fmt::Result {
            for (i, a) in atoms.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ∧ ")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        };
        write!(f, "{}: ", self.id)?;
        join(f, &self.body)?;
        f.write_str(" -> ")?;
        join(f, &self.head)?;
        f.write_str(" .")
    }
}
