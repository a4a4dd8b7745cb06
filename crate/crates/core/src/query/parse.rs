use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{CompareOp, FilterExpr, OrderKey, Projection, Query, QueryError};
use crate::graph::TriplePattern;
use crate::lex::{tokenize, Position, Spanned, Tok, Tokens};
use crate::term::{Datatype, Iri, Literal, Node, Term, Variable};
use crate::vocab;

fn err(pos: Position, message: impl Into<String>) -> QueryError {
    QueryError::Syntax { pos, message: message.into() }
}

struct Parser {
    toks: Tokens,
    prefixes: BTreeMap<String, String>,
}

impl Parser {
    fn fail<T>(&self, what: &str) -> Result<T, QueryError> {
        Err(err(self.toks.pos(), format!("expected {what}, found {}", self.toks.describe())))
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), QueryError> {
        if self.toks.eat(tok) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.toks.eat_keyword(kw) {
            Ok(())
        } else {
            self.fail(kw)
        }
    }

    fn prefix_decl(&mut self) -> Result<(), QueryError> {
        let name = match self.toks.peek().clone() {
            Tok::Name(n) if *self.toks.peek_at(1) == Tok::Colon => {
                self.toks.next();
                self.toks.next();
                n
            }
            Tok::Colon => {
                self.toks.next();
                String::new()
            }
            _ => return self.fail("prefix name"),
        };
        let Tok::IriRef(ns) = self.toks.peek().clone() else {
            return self.fail("<namespace>");
        };
        self.toks.next();
        self.prefixes.insert(name, ns);
        Ok(())
    }

    fn iri(&self, pos: Position, tok: &Tok) -> Result<Iri, QueryError> {
        let text = match tok {
            Tok::IriRef(s) => s.clone(),
            Tok::PName(p, local) => match self.prefixes.get(p) {
                Some(ns) => format!("{ns}{local}"),
                None => return Err(err(pos, format!("unknown prefix {p}:"))),
            },
            other => return Err(err(pos, format!("expected an IRI, found {other}"))),
        };
        Iri::new(text).map_err(|e| err(pos, e.to_string()))
    }

    fn variable(pos: Position, name: &str) -> Result<Variable, QueryError> {
        Variable::new(name).map_err(|e| err(pos, e.to_string()))
    }

    fn literal(&mut self, pos: Position, tok: Tok) -> Result<Option<Literal>, QueryError> {
        let lit = |s: &str, dt| Literal::parse(s, dt).map_err(|e| err(pos, e.to_string()));
        Ok(Some(match tok {
            Tok::Integer(s) => lit(&s, Datatype::Integer)?,
            Tok::Decimal(s) => lit(&s, Datatype::Float)?,
            Tok::Name(n) if n == "true" || n == "false" => Literal::Boolean(n == "true"),
            Tok::Str(s) => {
                if self.toks.eat(&Tok::DoubleCaret) {
                    let Spanned { tok, pos: dpos } = self.toks.next();
                    let dt = self.iri(dpos, &tok)?;
                    let dt = Datatype::from_iri(dt.as_str()).map_err(|e| err(dpos, e.to_string()))?;
                    lit(&s, dt)?
                } else {
                    Literal::string(s)
                }
            }
            _ => return Ok(None),
        }))
    }

    fn term(&mut self, predicate: bool) -> Result<Term, QueryError> {
        let Spanned { tok, pos } = self.toks.next();
        match tok {
            Tok::Var(v) => Ok(Term::Variable(Self::variable(pos, &v)?)),
            Tok::Name(n) if predicate && n == "a" => Ok(Term::Iri(vocab::rdf_type())),
            t @ (Tok::IriRef(_) | Tok::PName(..)) => Ok(Term::Iri(self.iri(pos, &t)?)),
            t => match self.literal(pos, t.clone())? {
                Some(l) => Ok(Term::Literal(l)),
                None => Err(err(pos, format!("expected a term, found {t}"))),
            },
        }
    }

    fn expr(&mut self) -> Result<FilterExpr, QueryError> {
        let mut e = self.conjunction()?;
        while self.toks.eat(&Tok::OrOr) {
            e = FilterExpr::or(e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<FilterExpr, QueryError> {
        let mut e = self.unary()?;
        while self.toks.eat(&Tok::AndAnd) {
            e = FilterExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<FilterExpr, QueryError> {
        if self.toks.eat(&Tok::Bang) {
            return Ok(FilterExpr::not(self.unary()?));
        }
        let left = self.primary()?;
        let op = match self.toks.peek() {
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            Tok::Eq => CompareOp::Eq,
            Tok::Ne => CompareOp::Ne,
            _ => return Ok(left),
        };
        self.toks.next();
        Ok(FilterExpr::compare(op, left, self.primary()?))
    }

    fn call(&mut self, name: &str) -> Result<FilterExpr, QueryError> {
        self.expect(&Tok::LParen, "'('")?;
        let first = self.expr()?;
        let e = if name.eq_ignore_ascii_case("str") {
            FilterExpr::str(first)
        } else {
            self.expect(&Tok::Comma, "','")?;
            FilterExpr::contains(first, self.expr()?)
        };
        self.expect(&Tok::RParen, "')'")?;
        Ok(e)
    }

    fn primary(&mut self) -> Result<FilterExpr, QueryError> {
        let Spanned { tok, pos } = self.toks.next();
        match tok {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Var(v) => Ok(FilterExpr::Var(Self::variable(pos, &v)?)),
            Tok::Name(n) if n.eq_ignore_ascii_case("str") || n.eq_ignore_ascii_case("contains") => self.call(&n),
            t @ (Tok::IriRef(_) | Tok::PName(..)) => Ok(FilterExpr::Const(Node::Iri(self.iri(pos, &t)?))),
            t => match self.literal(pos, t.clone())? {
                Some(l) => Ok(FilterExpr::Const(Node::Literal(l))),
                None => Err(err(pos, format!("expected an expression, found {t}"))),
            },
        }
    }

    fn filter(&mut self) -> Result<FilterExpr, QueryError> {
        if *self.toks.peek() == Tok::LParen {
            return self.primary();
        }
        match self.toks.peek().clone() {
            Tok::Name(n) if n.eq_ignore_ascii_case("str") || n.eq_ignore_ascii_case("contains") => {
                self.toks.next();
                self.call(&n)
            }
            _ => self.fail("'(' or a function call after FILTER"),
        }
    }

    fn group(&mut self, q: &mut Query) -> Result<(), QueryError> {
        self.expect(&Tok::LBrace, "'{'")?;
        loop {
            if self.toks.eat(&Tok::RBrace) {
                return Ok(());
            }
            if self.toks.eat_keyword("FILTER") {
                let f = self.filter()?;
                q.filters.push(f);
            } else {
                let s = self.term(false)?;
                let p = self.term(true)?;
                let o = self.term(false)?;
                q.bgp.push(TriplePattern::new(s, p, o));
            }
            self.toks.eat(&Tok::Dot);
        }
    }

    fn count(&mut self, what: &str) -> Result<usize, QueryError> {
        let Spanned { tok, pos } = self.toks.next();
        match tok {
            Tok::Integer(s) => s.parse().map_err(|_| err(pos, format!("invalid {what} count {s}"))),
            other => Err(err(pos, format!("expected a {what} count, found {other}"))),
        }
    }

    fn order_keys(&mut self, q: &mut Query) -> Result<(), QueryError> {
        loop {
            let descending = if self.toks.is_keyword("ASC") || self.toks.is_keyword("DESC") {
                let desc = self.toks.is_keyword("DESC");
                self.toks.next();
                self.expect(&Tok::LParen, "'('")?;
                desc
            } else if matches!(self.toks.peek(), Tok::Var(_)) {
                let Spanned { tok: Tok::Var(v), pos } = self.toks.next() else { unreachable!() };
                q.order_by.push(OrderKey { variable: Self::variable(pos, &v)?, descending: false });
                continue;
            } else {
                break;
            };
            let Spanned { tok, pos } = self.toks.next();
            let Tok::Var(v) = tok else {
                return Err(err(pos, format!("expected a variable, found {tok}")));
            };
            self.expect(&Tok::RParen, "')'")?;
            q.order_by.push(OrderKey { variable: Self::variable(pos, &v)?, descending });
        }
        if q.order_by.is_empty() {
            return self.fail("an ORDER BY key");
        }
        Ok(())
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.toks.eat_keyword("PREFIX") {
            self.prefix_decl()?;
        }
        self.expect_keyword("SELECT")?;
        let mut q = Query::select_all(Vec::new());
        q.distinct = self.toks.eat_keyword("DISTINCT");
        if !self.toks.eat(&Tok::Star) {
            let mut vars = Vec::new();
            while let Tok::Var(v) = self.toks.peek().clone() {
                let pos = self.toks.pos();
                self.toks.next();
                vars.push(Self::variable(pos, &v)?);
            }
            if vars.is_empty() {
                return self.fail("'*' or a variable after SELECT");
            }
            q.projection = Projection::Vars(vars);
        }
        self.toks.eat_keyword("WHERE");
        self.group(&mut q)?;
        loop {
            if self.toks.eat_keyword("ORDER") {
                self.expect_keyword("BY")?;
                self.order_keys(&mut q)?;
            } else if self.toks.eat_keyword("LIMIT") {
                q.limit = Some(self.count("LIMIT")?);
            } else if self.toks.eat_keyword("OFFSET") {
                q.offset = Some(self.count("OFFSET")?);
            } else {
                break;
            }
        }
        if *self.toks.peek() != Tok::Eof {
            return self.fail("end of query");
        }
        q.validate()?;
        Ok(q)
    }
}

/// Parses the supported SPARQL subset. `rdf:`, `rdfs:`, `owl:` and `xsd:`
/// are predeclared; other prefixes need a PREFIX line.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let toks = tokenize(text).map_err(|e| err(e.pos, e.message))?;
    let mut prefixes = BTreeMap::new();
    for (p, ns) in [("rdf", vocab::RDF), ("rdfs", vocab::RDFS), ("owl", vocab::OWL), ("xsd", crate::term::XSD)] {
        prefixes.insert(p.to_string(), ns.to_string());
    }
    Parser { toks: Tokens::new(toks), prefixes }.query()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pattern() {
        let q = parse_query("SELECT ?x WHERE { ?x <u:p> <u:b> . }").unwrap();
        assert_eq!(q.bgp.len(), 1);
        assert!(q.filters.is_empty());
    }

    #[test]
    fn select_variable_must_be_in_bgp() {
        let e = parse_query("SELECT ?x WHERE { ?y <u:p> ?z . } ").unwrap_err();
        assert!(matches!(e, QueryError::UnboundVariable { ref variable, .. } if variable.name() == "x"));
        let e = parse_query("SELECT ?y WHERE { ?y <u:p> ?z . FILTER (?w > 1) }").unwrap_err();
        assert!(matches!(e, QueryError::UnboundVariable { role: "FILTER", .. }));
    }

    #[test]
    fn unknown_prefix() {
        let e = parse_query("SELECT ?x WHERE { ?x foo:p ?y }").unwrap_err();
        assert!(matches!(e, QueryError::Syntax { ref message, .. } if message.contains("foo")));
    }

    #[test]
    fn typed_literal_and_a() {
        let q = parse_query(r#"SELECT * WHERE { ?s a <u:C> ; }"#);
        assert!(q.is_err());
        let q = parse_query(r#"SELECT * WHERE { ?s a <u:C> . ?s <u:n> "5"^^xsd:int }"#).unwrap();
        assert_eq!(q.bgp[0].predicate, Term::Iri(vocab::rdf_type()));
        assert_eq!(q.bgp[1].object, Term::Literal(Literal::integer(5)));
    }

    #[test]
    fn operator_precedence() {
        let q = parse_query("SELECT * WHERE { ?s <u:p> ?o FILTER (?o > 1 || ?o < 0 && !(?o = 5)) }").unwrap();
        assert!(matches!(q.filters[0], FilterExpr::Or(_, ref r) if matches!(**r, FilterExpr::And(..))));
    }

    #[test]
    fn display_round_trips() {
        let text = r#"PREFIX u: <http://x/>
            SELECT DISTINCT ?s ?o WHERE { ?s u:p ?o . ?o u:q "x\"y" . FILTER (contains(str(?s), "a") || ?o != u:z) }
            ORDER BY DESC(?o) ?s LIMIT 4 OFFSET 2"#;
        let q = parse_query(text).unwrap();
        let again = parse_query(&q.to_string()).unwrap();
        assert_eq!(q, again);
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_query("SELECT ?x\nWHERE { ?x <u:p> }").unwrap_err();
        let QueryError::Syntax { pos, .. } = e else { panic!() };
        assert_eq!(pos.line, 2);
    }

    #[test]
    fn sedan_search_shape() {
        let q = parse_query(include_str!("../../tests/fixtures/sedan_search.rq")).unwrap();
        assert_eq!(q.bgp.len(), 10);
        assert_eq!(q.filters.len(), 4);
        assert_eq!(q.limit, Some(10));
        assert_eq!(q.select_variables(), [Variable::new("auto").unwrap()]);
    }
}
