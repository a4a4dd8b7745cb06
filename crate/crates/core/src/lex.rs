//! Tokenizer shared by the rule and query parsers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// `<...>`, contents only.
    IriRef(String),
    /// `prefix:local`; the prefix may be empty.
    PName(String, String),
    /// Bare identifier or keyword.
    Name(String),
    /// `?name`, without the `?`.
    Var(String),
    Str(String),
    Integer(String),
    Decimal(String),
    DoubleCaret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Colon,
    Star,
    /// `∧` or a single `^`.
    Wedge,
    /// `->` or `→`.
    Arrow,
    AndAnd,
    OrOr,
    Bang,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AtPrefix,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::IriRef(s) => write!(f, "<{s}>"),
            Tok::PName(p, l) => write!(f, "{p}:{l}"),
            Tok::Name(s) => f.write_str(s),
            Tok::Var(s) => write!(f, "?{s}"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Integer(s) | Tok::Decimal(s) => f.write_str(s),
            Tok::DoubleCaret => f.write_str("^^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::Dot => f.write_str("."),
            Tok::Comma => f.write_str(","),
            Tok::Colon => f.write_str(":"),
            Tok::Star => f.write_str("*"),
            Tok::Wedge => f.write_str("∧"),
            Tok::Arrow => f.write_str("->"),
            Tok::AndAnd => f.write_str("&&"),
            Tok::OrOr => f.write_str("||"),
            Tok::Bang => f.write_str("!"),
            Tok::Eq => f.write_str("="),
            Tok::Ne => f.write_str("!="),
            Tok::Lt => f.write_str("<"),
            Tok::Le => f.write_str("<="),
            Tok::Gt => f.write_str(">"),
            Tok::Ge => f.write_str(">="),
            Tok::AtPrefix => f.write_str("@prefix"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub pos: Position,
    pub message: String,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_iri_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

struct Lexer<'a> {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position { line: self.line, column: self.col }
    }

    fn err(&self, pos: Position, message: impl Into<String>) -> LexError {
        LexError { pos, message: message.into() }
    }

    /// Name continuation; `-` is allowed inside a name when another name
    /// character follows, so `a->b` still lexes as `a`, `->`, `b`.
    fn take_name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if is_name_char(c) || (c == '-' && self.peek(1).is_some_and(is_name_char)) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn take_digits(&mut self, s: &mut String) {
        while let Some(c) = self.peek(0).filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
        }
    }

    fn number(&mut self) -> Tok {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek(0) {
            s.push(c);
            self.bump();
        }
        self.take_digits(&mut s);
        let mut decimal = false;
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            s.push('.');
            self.bump();
            self.take_digits(&mut s);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-')) as usize;
            if self.peek(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                decimal = true;
                for _ in 0..=sign {
                    s.push(self.bump().unwrap());
                }
                self.take_digits(&mut s);
            }
        }
        if decimal {
            Tok::Decimal(s)
        } else {
            Tok::Integer(s)
        }
    }

    fn string(&mut self, quote: char) -> Result<Tok, LexError> {
        let start = self.pos();
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err(start, "unterminated string")),
                Some(c) if c == quote => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let at = self.pos();
                    match self.bump() {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some('"') => s.push('"'),
                        Some('\'') => s.push('\''),
                        Some('\\') => s.push('\\'),
                        Some(u @ ('u' | 'U')) => {
                            let n = if u == 'u' { 4 } else { 8 };
                            let mut hex = String::new();
                            for _ in 0..n {
                                match self.bump() {
                                    Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                                    _ => return Err(self.err(at, "bad unicode escape")),
                                }
                            }
                            let cp = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32);
                            s.push(cp.ok_or_else(|| self.err(at, "bad unicode escape"))?);
                        }
                        _ => return Err(self.err(at, "unknown escape sequence")),
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }

    /// At `<`: an IRI reference if a `>` closes it before any character that
    /// cannot appear in an IRI, otherwise a comparison operator.
    fn angle(&mut self) -> Tok {
        if self.peek(1) == Some('=') {
            self.bump();
            self.bump();
            return Tok::Le;
        }
        let mut k = 1;
        while let Some(c) = self.peek(k) {
            if c == '>' {
                if k > 1 {
                    let iri: String = self.chars[self.i + 1..self.i + k].iter().collect();
                    for _ in 0..=k {
                        self.bump();
                    }
                    return Tok::IriRef(iri);
                }
                break;
            }
            if !is_iri_char(c) {
                break;
            }
            k += 1;
        }
        self.bump();
        Tok::Lt
    }

    fn next_token(&mut self) -> Result<Option<Spanned>, LexError> {
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while self.peek(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let pos = self.pos();
        let Some(c) = self.peek(0) else { return Ok(None) };
        let single = |lx: &mut Self, t: Tok| {
            lx.bump();
            t
        };
        let tok = match c {
            '(' => single(self, Tok::LParen),
            ')' => single(self, Tok::RParen),
            '{' => single(self, Tok::LBrace),
            '}' => single(self, Tok::RBrace),
            '.' => single(self, Tok::Dot),
            ',' => single(self, Tok::Comma),
            '*' => single(self, Tok::Star),
            '∧' => single(self, Tok::Wedge),
            '→' => single(self, Tok::Arrow),
            '=' => single(self, Tok::Eq),
            '^' if self.peek(1) == Some('^') => {
                self.bump();
                single(self, Tok::DoubleCaret)
            }
            '^' => single(self, Tok::Wedge),
            '&' if self.peek(1) == Some('&') => {
                self.bump();
                single(self, Tok::AndAnd)
            }
            '|' if self.peek(1) == Some('|') => {
                self.bump();
                single(self, Tok::OrOr)
            }
            '!' if self.peek(1) == Some('=') => {
                self.bump();
                single(self, Tok::Ne)
            }
            '!' => single(self, Tok::Bang),
            '>' if self.peek(1) == Some('=') => {
                self.bump();
                single(self, Tok::Ge)
            }
            '>' => single(self, Tok::Gt),
            '<' => self.angle(),
            '-' if self.peek(1) == Some('>') => {
                self.bump();
                single(self, Tok::Arrow)
            }
            '"' | '\'' => self.string(c)?,
            '?' | '$' => {
                self.bump();
                if !self.peek(0).is_some_and(is_name_char) {
                    return Err(self.err(pos, "expected variable name"));
                }
                let mut s = String::new();
                while let Some(c) = self.peek(0).filter(|c| is_name_char(*c)) {
                    s.push(c);
                    self.bump();
                }
                Tok::Var(s)
            }
            '@' => {
                self.bump();
                let word = self.take_name();
                if word.eq_ignore_ascii_case("prefix") {
                    Tok::AtPrefix
                } else {
                    return Err(self.err(pos, alloc::format!("unknown directive @{word}")));
                }
            }
            c if c.is_ascii_digit() => self.number(),
            '+' | '-' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => self.number(),
            ':' => {
                self.bump();
                if self.peek(0).is_some_and(is_name_char) {
                    Tok::PName(String::new(), self.take_name())
                } else {
                    Tok::Colon
                }
            }
            c if is_name_start(c) => {
                let name = self.take_name();
                if self.peek(0) == Some(':') && self.peek(1).is_some_and(is_name_char) {
                    self.bump();
                    Tok::PName(name, self.take_name())
                } else {
                    Tok::Name(name)
                }
            }
            other => return Err(self.err(pos, alloc::format!("unexpected character {other:?}"))),
        };
        Ok(Some(Spanned { tok, pos }))
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Spanned>, LexError> {
    let mut lx = Lexer { chars: src.chars().collect(), i: 0, line: 1, col: 1, _src: src };
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    out.push(Spanned { tok: Tok::Eof, pos: lx.pos() });
    Ok(out)
}

/// Cursor over a token list.
pub(crate) struct Tokens {
    toks: Vec<Spanned>,
    i: usize,
}

impl Tokens {
    pub fn new(toks: Vec<Spanned>) -> Self {
        Tokens { toks, i: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub fn pos(&self) -> Position {
        self.toks[self.i].pos
    }

    pub fn next(&mut self) -> Spanned {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Name(n) if n.eq_ignore_ascii_case(kw)) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n.eq_ignore_ascii_case(kw))
    }

    pub fn describe(&self) -> String {
        self.peek().to_string()
    }
}
