use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Atom, Builtin, BuiltinCall, Rule, RuleError};
use crate::lex::{tokenize, Position, Tok, Tokens};
use crate::term::{Datatype, Iri, Literal, Term, Variable, XSD};
use crate::vocab;

const BUILTIN_PREFIXES: &[&str] = &["swrlb", "temporal", "builtin"];

/// Keywords accepted as the reference point and unit of `duration`.
pub(super) const NOW_KEYWORDS: &[&str] = &["maintenant", "now"];
pub(super) const MONTH_KEYWORDS: &[&str] = &["mois", "months"];

struct Parser {
    toks: Tokens,
    prefixes: BTreeMap<String, String>,
}

fn err(pos: Position, message: impl Into<String>) -> RuleError {
    RuleError::Parse { pos, message: message.into() }
}

impl Parser {
    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), RuleError> {
        if self.toks.eat(tok) {
            Ok(())
        } else {
            Err(err(self.toks.pos(), format!("expected {what}, found {}", self.toks.describe())))
        }
    }

    fn prefix_decl(&mut self) -> Result<(), RuleError> {
        let name = match self.toks.next().tok {
            Tok::Name(n) => {
                self.expect(&Tok::Colon, "':' after prefix name")?;
                n
            }
            Tok::Colon => String::new(),
            other => return Err(err(self.toks.pos(), format!("expected prefix name, found {other}"))),
        };
        let pos = self.toks.pos();
        let Tok::IriRef(ns) = self.toks.next().tok else {
            return Err(err(pos, "expected <namespace> in @prefix"));
        };
        self.expect(&Tok::Dot, "'.' after @prefix")?;
        self.prefixes.insert(name, ns);
        Ok(())
    }

    fn resolve(&self, pos: Position, tok: &Tok) -> Result<Iri, RuleError> {
        let text = match tok {
            Tok::IriRef(s) => s.clone(),
            Tok::PName(p, local) => match self.prefixes.get(p) {
                Some(ns) => format!("{ns}{local}"),
                None => return Err(err(pos, format!("unknown prefix {p}:"))),
            },
            Tok::Name(n) => match self.prefixes.get("") {
                Some(ns) => format!("{ns}{n}"),
                None => n.clone(),
            },
            other => return Err(err(pos, format!("expected a name, found {other}"))),
        };
        Iri::new(text).map_err(|e| err(pos, e.to_string()))
    }

    fn term(&mut self) -> Result<Term, RuleError> {
        let Spanned { tok, pos } = self.toks.next();
        Ok(match tok {
            Tok::Var(v) => Term::Variable(Variable::new(&v).map_err(|e| err(pos, e.to_string()))?),
            Tok::Name(n) if matches!(n.as_str(), "vrai" | "true") => Term::Literal(Literal::Boolean(true)),
            Tok::Name(n) if matches!(n.as_str(), "faux" | "false") => Term::Literal(Literal::Boolean(false)),
            t @ (Tok::IriRef(_) | Tok::PName(..) | Tok::Name(_)) => Term::Iri(self.resolve(pos, &t)?),
            Tok::Integer(s) => {
                Term::Literal(Literal::parse(&s, Datatype::Integer).map_err(|e| err(pos, e.to_string()))?)
            }
            Tok::Decimal(s) => Term::Literal(Literal::parse(&s, Datatype::Float).map_err(|e| err(pos, e.to_string()))?),
            Tok::Str(s) => {
                let dt = if self.toks.eat(&Tok::DoubleCaret) {
                    let p = self.toks.pos();
                    let t = self.toks.next().tok;
                    let iri = self.resolve(p, &t)?;
                    Datatype::from_iri(iri.as_str()).map_err(|e| err(p, e.to_string()))?
                } else {
                    Datatype::String
                };
                Term::Literal(Literal::parse(&s, dt).map_err(|e| err(pos, e.to_string()))?)
            }
            other => return Err(err(pos, format!("expected a term, found {other}"))),
        })
    }

    fn atom(&mut self) -> Result<Atom, RuleError> {
        let Spanned { tok: head, pos } = self.toks.next();
        self.expect(&Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if !self.toks.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.toks.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "',' or ')'")?;
            }
        }

        let builtin = match &head {
            Tok::PName(p, local) if BUILTIN_PREFIXES.contains(&p.as_str()) => Builtin::from_name(local),
            _ => None,
        };
        if let Some(builtin) = builtin {
            let call = BuiltinCall { builtin, args };
            check_builtin(&call).map_err(|m| err(pos, m))?;
            return Ok(Atom::Builtin(call));
        }

        let is_same_as = match &head {
            Tok::Name(n) => n == "sameAs",
            Tok::PName(p, l) => p == "owl" && l == "sameAs",
            Tok::IriRef(i) => *i == vocab::owl_same_as().as_str(),
            _ => false,
        };
        if is_same_as {
            let [a, b]: [Term; 2] = args.try_into().map_err(|_| err(pos, "sameAs takes two arguments"))?;
            return Ok(Atom::SameAs(a, b));
        }

        let iri = self.resolve(pos, &head)?;
        let mut args = args.into_iter();
        match (args.next(), args.next(), args.next()) {
            (Some(arg), None, None) => Ok(Atom::Class { class: iri, arg }),
            (Some(subject), Some(object), None) => Ok(Atom::Property { predicate: iri, subject, object }),
            _ => Err(err(pos, format!("atom {head} must have one or two arguments"))),
        }
    }

    fn atoms(&mut self) -> Result<Vec<Atom>, RuleError> {
        let mut out = Vec::from([self.atom()?]);
        while self.toks.eat(&Tok::Wedge) {
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn rule(&mut self) -> Result<Rule, RuleError> {
        let pos = self.toks.pos();
        let id = match self.toks.next().tok {
            Tok::Name(n) => n,
            other => return Err(err(pos, format!("expected rule id, found {other}"))),
        };
        self.expect(&Tok::Colon, "':' after rule id")?;
        let body = self.atoms()?;
        self.expect(&Tok::Arrow, "'->'")?;
        let head = self.atoms()?;
        self.expect(&Tok::Dot, "'.' at end of rule")?;
        let rule = Rule { id, body, head };
        rule.check_safety()?;
        Ok(rule)
    }
}

use crate::lex::Spanned;

fn is_keyword(t: &Term, allowed: &[&str]) -> bool {
    matches!(t, Term::Literal(Literal::String(s)) if allowed.contains(&&**s))
}

fn check_builtin(call: &BuiltinCall) -> Result<(), String> {
    let name = call.builtin.name();
    match call.builtin {
        Builtin::GreaterThan | Builtin::LessThan | Builtin::Equal | Builtin::Contains => {
            if call.args.len() != 2 {
                return Err(format!("{name} takes two arguments"));
            }
        }
        Builtin::Duration => {
            if call.args.len() != 4 {
                return Err("duration takes (out-variable, date, reference, unit)".to_string());
            }
            if call.args[0].as_variable().is_none() {
                return Err("duration's first argument must be a variable".to_string());
            }
            if !is_keyword(&call.args[2], NOW_KEYWORDS) {
                return Err(format!("duration reference must be one of {NOW_KEYWORDS:?}"));
            }
            if !is_keyword(&call.args[3], MONTH_KEYWORDS) {
                return Err(format!("duration unit must be one of {MONTH_KEYWORDS:?}"));
            }
        }
    }
    Ok(())
}

/// Parses a rule file. Every returned rule satisfies the safety invariant.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleError> {
    let toks = tokenize(text).map_err(|e| err(e.pos, e.message))?;
    let mut prefixes = BTreeMap::new();
    prefixes.insert("rdf".to_string(), vocab::RDF.to_string());
    prefixes.insert("rdfs".to_string(), vocab::RDFS.to_string());
    prefixes.insert("owl".to_string(), vocab::OWL.to_string());
    prefixes.insert("xsd".to_string(), XSD.to_string());
    let mut p = Parser { toks: Tokens::new(toks), prefixes };
    let mut rules = Vec::new();
    loop {
        match p.toks.peek() {
            Tok::Eof => break,
            Tok::AtPrefix => {
                p.toks.next();
                p.prefix_decl()?;
            }
            _ => rules.push(p.rule()?),
        }
    }
    Ok(rules)
}
