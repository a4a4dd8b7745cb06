//! RDF terms: IRIs, typed literals and variables.
//!
//! Literals carry their parsed value rather than their lexical form, so
//! `"5"^^xsd:integer` and `"05"^^xsd:integer` are the same term. The derived
//! orderings give the term total order used everywhere results must be
//! deterministic: IRIs sort before literals, IRIs compare by their text, and
//! literals compare by datatype name and then by value.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use thiserror::Error;

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("lexical form {lexical:?} is not a valid {datatype}")]
    InvalidLexical { lexical: String, datatype: Datatype },
    #[error("unsupported datatype <{0}>")]
    UnknownDatatype(String),
}

/// An absolute or compact IRI. Non-empty and free of whitespace and of the
/// characters that would break the N-Triples `<...>` form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(text: impl AsRef<str>) -> Result<Self, TermError> {
        let text = text.as_ref();
        let bad = |c: char| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`');
        if text.is_empty() || text.chars().any(bad) {
            return Err(TermError::InvalidIri(text.to_string()));
        }
        Ok(Iri(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// A query or rule variable, stored without the leading `?`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Result<Self, TermError> {
        let name = name.as_ref();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(TermError::InvalidVariable(name.to_string()));
        }
        Ok(Variable(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// The closed set of literal datatypes. Variant order is alphabetical by
/// name, which is what the literal ordering relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    Boolean,
    Date,
    Float,
    Integer,
    String,
}

impl Datatype {
    pub fn name(self) -> &'static str {
        match self {
            Datatype::Boolean => "boolean",
            Datatype::Date => "date",
            Datatype::Float => "float",
            Datatype::Integer => "integer",
            Datatype::String => "string",
        }
    }

    /// Canonical datatype IRI (always in the XML Schema namespace).
    pub fn iri(self) -> String {
        let mut s = String::from(XSD);
        s.push_str(self.name());
        s
    }

    /// Resolves a datatype IRI, accepting both the full XML Schema namespace
    /// and the compact `xsd:` spelling, plus the usual numeric aliases.
    pub fn from_iri(iri: &str) -> Result<Self, TermError> {
        let local = iri
            .strip_prefix(XSD)
            .or_else(|| iri.strip_prefix("xsd:"))
            .ok_or_else(|| TermError::UnknownDatatype(iri.to_string()))?;
        match local {
            "boolean" => Ok(Datatype::Boolean),
            "date" => Ok(Datatype::Date),
            "float" | "double" | "decimal" => Ok(Datatype::Float),
            "integer" | "int" | "long" | "short" | "nonNegativeInteger" | "positiveInteger" => Ok(Datatype::Integer),
            "string" => Ok(Datatype::String),
            _ => Err(TermError::UnknownDatatype(iri.to_string())),
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite `f64` with negative zero folded into positive zero, so that bit
/// equality coincides with numeric equality.
#[derive(Clone, Copy)]
pub struct Float(f64);

impl Float {
    pub fn new(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        Some(Float(if value == 0.0 { 0.0 } else { value }))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Float {}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for Float {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Proleptic Gregorian calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Option<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Date { year, month, day })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn day(self) -> u8 {
        self.day
    }

    /// Parses `YYYY-MM-DD`.
    pub fn parse(text: &str) -> Option<Self> {
        let b = text.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return None;
        }
        let digits = |r: core::ops::Range<usize>| -> Option<u32> {
            let s = &text[r];
            if !s.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        };
        let year = digits(0..4)? as i32;
        let month = digits(5..7)? as u8;
        let day = digits(8..10)? as u8;
        Date::new(year, month, day)
    }

    /// Whole calendar months elapsed from `self` to `later`, rounded toward
    /// negative infinity. A month counts once the same day-of-month is
    /// reached again, so 2018-01-15 to 2022-03-01 is 49 months.
    pub fn months_until(self, later: Date) -> i64 {
        let mut months = (later.year as i64 - self.year as i64) * 12 + (later.month as i64 - self.month as i64);
        if later.day < self.day {
            months -= 1;
        }
        months
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub(crate) fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

/// A typed literal. Variant order mirrors [`Datatype`] so the derived
/// ordering sorts by datatype name first, then by value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Boolean(bool),
    Date(Date),
    Float(Float),
    Integer(i64),
    String(Arc<str>),
}

impl Literal {
    pub fn string(s: impl AsRef<str>) -> Self {
        Literal::String(Arc::from(s.as_ref()))
    }

    pub fn integer(v: i64) -> Self {
        Literal::Integer(v)
    }

    /// Panics on a non-finite value.
    pub fn float(v: f64) -> Self {
        Literal::Float(Float::new(v).expect("finite float literal"))
    }

    pub fn parse(lexical: &str, datatype: Datatype) -> Result<Self, TermError> {
        let invalid = || TermError::InvalidLexical { lexical: lexical.to_string(), datatype };
        match datatype {
            Datatype::String => Ok(Literal::string(lexical)),
            Datatype::Integer => {
                let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
                if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
                    return Err(invalid());
                }
                lexical.parse::<i64>().map(Literal::Integer).map_err(|_| invalid())
            }
            Datatype::Float => {
                let ok_chars =
                    lexical.bytes().all(|c| c.is_ascii_digit() || matches!(c, b'+' | b'-' | b'.' | b'e' | b'E'));
                if !ok_chars || !lexical.bytes().any(|c| c.is_ascii_digit()) {
                    return Err(invalid());
                }
                let v: f64 = lexical.parse().map_err(|_| invalid())?;
                Float::new(v).map(Literal::Float).ok_or_else(invalid)
            }
            Datatype::Boolean => match lexical {
                "true" | "1" => Ok(Literal::Boolean(true)),
                "false" | "0" => Ok(Literal::Boolean(false)),
                _ => Err(invalid()),
            },
            Datatype::Date => Date::parse(lexical).map(Literal::Date).ok_or_else(invalid),
        }
    }

    pub fn datatype(&self) -> Datatype {
        match self {
            Literal::Boolean(_) => Datatype::Boolean,
            Literal::Date(_) => Datatype::Date,
            Literal::Float(_) => Datatype::Float,
            Literal::Integer(_) => Datatype::Integer,
            Literal::String(_) => Datatype::String,
        }
    }

    /// Canonical lexical form; parsing it back yields an equal literal.
    pub fn lexical(&self) -> String {
        match self {
            Literal::Boolean(b) => b.to_string(),
            Literal::Date(d) => d.to_string(),
            Literal::Float(f) => f.get().to_string(),
            Literal::Integer(i) => i.to_string(),
            Literal::String(s) => s.to_string(),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Literal::String(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// N-Triples form. Strings are written as plain literals; every other
/// datatype carries its full datatype IRI.
impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical())?;
        f.write_str("\"")?;
        match self {
            Literal::String(_) => Ok(()),
            other => write!(f, "^^<{}>", other.datatype().iri()),
        }
    }
}

pub(crate) fn write_escaped(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c if (c as u32) < 0x20 => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    Ok(())
}

/// A ground term: what can be stored in a graph or bound to a variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Iri(Iri),
    Literal(Literal),
}

impl Node {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Node::Iri(i) => Some(i),
            Node::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Node::Literal(l) => Some(l),
            Node::Iri(_) => None,
        }
    }
}

impl From<Iri> for Node {
    fn from(i: Iri) -> Self {
        Node::Iri(i)
    }
}

impl From<Literal> for Node {
    fn from(l: Literal) -> Self {
        Node::Literal(l)
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Iri(i) => fmt::Display::fmt(i, f),
            Node::Literal(l) => fmt::Display::fmt(l, f),
        }
    }
}

/// A pattern position: a ground term or a variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    Variable(Variable),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Variable(Variable::new(name).expect("valid variable name"))
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<Node> {
        match self {
            Term::Iri(i) => Some(Node::Iri(i.clone())),
            Term::Literal(l) => Some(Node::Literal(l.clone())),
            Term::Variable(_) => None,
        }
    }
}

impl From<Node> for Term {
    fn from(n: Node) -> Self {
        match n {
            Node::Iri(i) => Term::Iri(i),
            Node::Literal(l) => Term::Literal(l),
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Self {
        Term::Variable(v)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => fmt::Display::fmt(i, f),
            Term::Literal(l) => fmt::Display::fmt(l, f),
            Term::Variable(v) => fmt::Display::fmt(v, f),
        }
    }
}

/// Why two values could not be compared.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot compare {left} with {right}")]
pub struct TypeMismatch {
    pub left: String,
    pub right: String,
}

fn mismatch(a: &Node, b: &Node) -> TypeMismatch {
    TypeMismatch { left: a.to_string(), right: b.to_string() }
}

/// Exact comparison of an integer with a finite float.
fn cmp_int_float(i: i64, f: f64) -> Ordering {
    const TWO_63: f64 = 9_223_372_036_854_775_808.0;
    if f >= TWO_63 {
        return Ordering::Less;
    }
    if f < -TWO_63 {
        return Ordering::Greater;
    }
    // `as` truncates toward zero and `trunc(f)` is exactly representable.
    let whole = f as i64;
    match i.cmp(&whole) {
        Ordering::Equal => {
            let frac = f - whole as f64;
            0.0f64.partial_cmp(&frac).unwrap_or(Ordering::Equal)
        }
        other => other,
    }
}

/// Value ordering used by filters and comparison builtins. Integers and
/// floats compare numerically and exactly; strings, dates and booleans only
/// compare within their own datatype. IRIs are not ordered.
pub fn compare_values(a: &Node, b: &Node) -> Result<Ordering, TypeMismatch> {
    use Literal::*;
    match (a, b) {
        (Node::Literal(x), Node::Literal(y)) => match (x, y) {
            (Integer(i), Integer(j)) => Ok(i.cmp(j)),
            (Float(x), Float(y)) => Ok(x.get().partial_cmp(&y.get()).unwrap_or(Ordering::Equal)),
            (Integer(i), Float(f)) => Ok(cmp_int_float(*i, f.get())),
            (Float(f), Integer(i)) => Ok(cmp_int_float(*i, f.get()).reverse()),
            (String(x), String(y)) => Ok(x.cmp(y)),
            (Date(x), Date(y)) => Ok(x.cmp(y)),
            (Boolean(x), Boolean(y)) => Ok(x.cmp(y)),
            _ => Err(mismatch(a, b)),
        },
        _ => Err(mismatch(a, b)),
    }
}

/// Value equality: numeric across integer and float, term identity for
/// IRIs, `false` between an IRI and a literal, and a type error between
/// literals of unrelated datatypes.
pub fn values_equal(a: &Node, b: &Node) -> Result<bool, TypeMismatch> {
    match (a, b) {
        (Node::Iri(x), Node::Iri(y)) => Ok(x == y),
        (Node::Iri(_), Node::Literal(_)) | (Node::Literal(_), Node::Iri(_)) => Ok(false),
        _ => compare_values(a, b).map(|o| o == Ordering::Equal),
    }
}

pub fn is_numeric(n: &Node) -> bool {
    matches!(n, Node::Literal(Literal::Integer(_) | Literal::Float(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn iri_rejects_whitespace_and_empty() {
        assert!(Iri::new("").is_err());
        assert!(Iri::new("u:a b").is_err());
        assert!(Iri::new("u:a>").is_err());
        assert!(Iri::new("http://utc.fr/uvso/ns#ContrôleTechnique").is_ok());
    }

    #[test]
    fn integer_literal_equality_is_by_value() {
        let a = Literal::parse("5", Datatype::Integer).unwrap();
        let b = Literal::parse("05", Datatype::Integer).unwrap();
        let c = Literal::parse("+5", Datatype::Integer).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(Literal::parse("5.0", Datatype::Integer).is_err());
        assert!(Literal::parse("", Datatype::Integer).is_err());
        assert!(Literal::parse("-", Datatype::Integer).is_err());
    }

    #[test]
    fn float_literal_rejects_non_finite() {
        assert!(Literal::parse("inf", Datatype::Float).is_err());
        assert!(Literal::parse("NaN", Datatype::Float).is_err());
        assert_eq!(Literal::parse("-0.0", Datatype::Float).unwrap(), Literal::float(0.0));
        assert_eq!(Literal::parse("1e3", Datatype::Float).unwrap(), Literal::float(1000.0));
    }

    #[test]
    fn date_validation() {
        assert!(Date::parse("2024-02-29").is_some());
        assert!(Date::parse("2023-02-29").is_none());
        assert!(Date::parse("2023-13-01").is_none());
        assert!(Date::parse("2023-1-01").is_none());
        assert_eq!(format!("{}", Date::new(2018, 1, 15).unwrap()), "2018-01-15");
    }

    #[test]
    fn months_until_counts_full_months() {
        let from = Date::new(2018, 1, 15).unwrap();
        let to = Date::new(2022, 3, 1).unwrap();
        assert_eq!(from.months_until(to), 49);
        assert_eq!(from.months_until(from), 0);
        assert_eq!(to.months_until(from), -50);
        let a = Date::new(2022, 1, 31).unwrap();
        assert_eq!(a.months_until(Date::new(2022, 2, 28).unwrap()), 0);
        assert_eq!(a.months_until(Date::new(2022, 3, 31).unwrap()), 2);
    }

    #[test]
    fn term_order_iri_before_literal_and_datatype_first() {
        let iri = Node::Iri(Iri::new("z:z").unwrap());
        let lit = Node::Literal(Literal::Boolean(false));
        assert!(iri < lit);
        // boolean < date < float < integer < string, regardless of value
        let order = [
            Literal::Boolean(true),
            Literal::Date(Date::new(1, 1, 1).unwrap()),
            Literal::float(-1e9),
            Literal::integer(-5),
            Literal::string(""),
        ];
        for w in order.windows(2) {
            assert!(w[0] < w[1], "{:?} < {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn exact_numeric_coercion() {
        let i = |v| Node::Literal(Literal::integer(v));
        let f = |v| Node::Literal(Literal::float(v));
        assert_eq!(compare_values(&i(5), &f(5.0)), Ok(Ordering::Equal));
        assert_eq!(compare_values(&i(5), &f(5.5)), Ok(Ordering::Less));
        assert_eq!(compare_values(&i(-5), &f(-5.5)), Ok(Ordering::Greater));
        // 2^53 + 1 is not representable as f64; a lossy cast would say Equal.
        let big = (1i64 << 53) + 1;
        assert_eq!(compare_values(&i(big), &f((1u64 << 53) as f64)), Ok(Ordering::Greater));
        assert_eq!(compare_values(&i(i64::MAX), &f(1e19)), Ok(Ordering::Less));
        assert!(compare_values(&i(1), &Node::Literal(Literal::string("1"))).is_err());
        assert_eq!(values_equal(&Node::Iri(Iri::new("a:b").unwrap()), &i(1)), Ok(false));
    }

    #[test]
    fn display_escapes_strings() {
        let l = Literal::string("a \"b\"\n");
        assert_eq!(format!("{l}"), "\"a \\\"b\\\"\\n\"");
        let i = Literal::integer(7);
        assert_eq!(format!("{i}"), "\"7\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    }
}
