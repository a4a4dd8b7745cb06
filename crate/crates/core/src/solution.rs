use alloc::collections::BTreeMap;
use core::fmt;

use crate::term::{Node, Variable};

/// An assignment of ground terms to variables.
///
/// Ordering is lexicographic over the (variable, value) entries, which is the
/// full-solution tiebreak used by ORDER BY and by every deterministic listing.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution(BTreeMap<Variable, Node>);

impl Solution {
    pub fn new() -> Self {
        Solution(BTreeMap::new())
    }

    pub fn get(&self, var: &Variable) -> Option<&Node> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &Variable) -> bool {
        self.0.contains_key(var)
    }

    pub fn insert(&mut self, var: Variable, value: Node) -> Option<Node> {
        self.0.insert(var, value)
    }

    /// Binds `var` to `value` unless it is already bound to something else.
    pub fn bind(&mut self, var: &Variable, value: &Node) -> bool {
        match self.0.get(var) {
            Some(existing) => existing == value,
            None => {
                self.0.insert(var.clone(), value.clone());
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Node)> {
        self.0.iter()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    /// Restriction to `vars`; unbound variables are skipped.
    pub fn project<'a>(&self, vars: impl IntoIterator<Item = &'a Variable>) -> Solution {
        let mut out = Solution::new();
        for v in vars {
            if let Some(n) = self.0.get(v) {
                out.0.insert(v.clone(), n.clone());
            }
        }
        out
    }

    /// Union of two compatible solutions, `None` when they disagree on a
    /// shared variable.
    pub fn merge(&self, other: &Solution) -> Option<Solution> {
        let mut out = self.clone();
        for (v, n) in other.iter() {
            if !out.bind(v, n) {
                return None;
            }
        }
        Some(out)
    }
}

impl FromIterator<(Variable, Node)> for Solution {
    fn from_iter<I: IntoIterator<Item = (Variable, Node)>>(iter: I) -> Self {
        Solution(iter.into_iter().collect())
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, n)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {n}")?;
        }
        f.write_str("}")
    }
}
