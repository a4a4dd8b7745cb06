//! Line-oriented N-Triples subset:
//!
//! ```text
//! <iri> <iri> <iri> .
//! <iri> <iri> "lexical"^^<datatype-iri> .
//! <iri> <iri> "plain" .
//! # comment
//! ```
//!
//! Plain literals are strings. Blank nodes and language tags are rejected.

use std::fmt::Write as _;
use std::io::{self, Write};

use kgrec_core::graph::Triple;
use kgrec_core::term::Datatype;
use kgrec_core::{Graph, GraphBuilder, Iri, Literal, Node};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message} at {token:?}")]
pub struct SyntaxError {
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub token: String,
    pub message: String,
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start_matches([' ', '\t']).len();
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let token: String = self.rest().split([' ', '\t']).next().unwrap_or("").chars().take(40).collect();
        SyntaxError {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            token: if token.is_empty() { "end of line".to_string() } else { token },
            message: message.into(),
        }
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with("_:") {
            return Err(self.error("blank nodes are not supported"));
        }
        if !rest.starts_with('<') {
            return Err(self.error("expected <iri>"));
        }
        let end = rest.find('>').ok_or_else(|| self.error("unterminated <iri>"))?;
        let iri = Iri::new(&rest[1..end]).map_err(|e| self.error(e.to_string()))?;
        self.pos += end + 1;
        Ok(iri)
    }

    fn object(&mut self) -> Result<Node, SyntaxError> {
        self.skip_ws();
        if !self.rest().starts_with('"') {
            return self.iri().map(Node::Iri);
        }
        let start = self.pos;
        let lexical = self.quoted()?;
        let datatype = if self.rest().starts_with("^^") {
            self.pos += 2;
            let dt = self.iri()?;
            Datatype::from_iri(dt.as_str()).map_err(|e| self.error(e.to_string()))?
        } else if self.rest().starts_with('@') {
            return Err(self.error("language tags are not supported"));
        } else {
            Datatype::String
        };
        Literal::parse(&lexical, datatype).map(Node::Literal).map_err(|e| {
            self.pos = start;
            self.error(e.to_string())
        })
    }

    fn quoted(&mut self) -> Result<String, SyntaxError> {
        let mut out = String::new();
        let mut chars = self.rest().char_indices().skip(1);
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => {
                    let (_, e) = chars.next().ok_or_else(|| self.error("dangling escape"))?;
                    match e {
                        '"' | '\\' | '\'' => out.push(e),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        't' => out.push('\t'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        'u' | 'U' => {
                            let n = if e == 'u' { 4 } else { 8 };
                            let hex: String = chars.by_ref().take(n).map(|(_, h)| h).collect();
                            let c = u32::from_str_radix(&hex, 16)
                                .ok()
                                .filter(|_| hex.len() == n)
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.error(format!("bad \\{e} escape")))?;
                            out.push(c);
                        }
                        other => return Err(self.error(format!("unknown escape \\{other}"))),
                    }
                }
                c => out.push(c),
            }
        }
        Err(self.error("unterminated string literal"))
    }

    fn end(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        if !self.rest().starts_with('.') {
            return Err(self.error("expected '.'"));
        }
        self.pos += 1;
        self.skip_ws();
        let rest = self.rest();
        if rest.is_empty() || rest.starts_with('#') {
            Ok(())
        } else {
            Err(self.error("unexpected text after '.'"))
        }
    }
}

fn parse_line(line: usize, text: &str) -> Result<Option<Triple>, SyntaxError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut c = Cursor { line, text: text.trim_end_matches('\r'), pos: 0 };
    let s = c.iri()?;
    let p = c.iri()?;
    let o = c.object()?;
    c.end()?;
    Ok(Some(Triple::new(s, p, o)))
}

/// Parses every line, failing on the first malformed one.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, SyntaxError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        out.extend(parse_line(i + 1, line)?);
    }
    Ok(out)
}

/// Loads a graph. Nothing is returned unless every line parses.
pub fn load_ntriples(text: &str) -> Result<Graph, SyntaxError> {
    let mut b = GraphBuilder::new();
    for t in parse_ntriples(text)? {
        b.insert(t);
    }
    Ok(b.build())
}

/// Canonical text: one line per triple, sorted under the term order.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph.iter() {
        writeln!(out, "{t}").expect("writing to a String");
    }
    out
}

pub fn write_ntriples(graph: &Graph, w: &mut impl Write) -> io::Result<()> {
    for t in graph.iter() {
        writeln!(w, "{t}")?;
    }
    Ok(())
}
