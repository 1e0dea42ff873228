//! Token stream shared by the Turtle parser and the query parser.
//!
//! The lexer is whitespace/comment-skipping and position-tracking (1-based
//! line:column). The only genuinely ambiguous character is `<`, which opens
//! an IRI in term positions and is the less-than operator inside
//! expressions; following SPARQL's own lexical rule, `<` starts an IRI iff a
//! `>` closes it before any character that is illegal inside an IRIREF.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Iri(String),
    /// Prefixed name `prefix:local`; either part may be empty.
    PName { prefix: String, local: String },
    BlankLabel(String),
    Var(String),
    Str { value: String, lang: Option<String> },
    Integer(String),
    Decimal(String),
    Double(String),
    /// Bare word: keywords, `a`, `true`/`false`, function names.
    Ident(String),
    /// `@prefix` / `@base` Turtle directives.
    AtKeyword(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Semicolon,
    Comma,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Plus,
    Minus,
    Slash,
    HatHat,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Iri(iri) => write!(f, "<{}>", iri),
            Tok::PName { prefix, local } => write!(f, "{}:{}", prefix, local),
            Tok::BlankLabel(l) => write!(f, "_:{}", l),
            Tok::Var(v) => write!(f, "?{}", v),
            Tok::Str { .. } => write!(f, "string literal"),
            Tok::Integer(s) | Tok::Decimal(s) | Tok::Double(s) => write!(f, "{}", s),
            Tok::Ident(w) => write!(f, "{}", w),
            Tok::AtKeyword(w) => write!(f, "@{}", w),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Dot => write!(f, "."),
            Tok::Semicolon => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::Star => write!(f, "*"),
            Tok::Eq => write!(f, "="),
            Tok::Ne => write!(f, "!="),
            Tok::Lt => write!(f, "<"),
            Tok::Le => write!(f, "<="),
            Tok::Gt => write!(f, ">"),
            Tok::Ge => write!(f, ">="),
            Tok::AndAnd => write!(f, "&&"),
            Tok::OrOr => write!(f, "||"),
            Tok::Bang => write!(f, "!"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Slash => write!(f, "/"),
            Tok::HatHat => write!(f, "^^"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

pub fn lex(input: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer { chars: input.chars().collect(), pos: 0, line: 1, col: 1 };
    lexer.run()
}

impl Lexer {
    fn run(&mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia();
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = self.next_token(c)?;
            tokens.push(Token { tok, line, col });
        }
        Ok(tokens)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, msg: impl Into<String>) -> LexError {
        LexError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.advance();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.advance();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self, c: char) -> Result<Tok, LexError> {
        match c {
            '(' => self.single(Tok::LParen),
            ')' => self.single(Tok::RParen),
            '{' => self.single(Tok::LBrace),
            '}' => self.single(Tok::RBrace),
            ';' => self.single(Tok::Semicolon),
            ',' => self.single(Tok::Comma),
            '*' => self.single(Tok::Star),
            '+' => self.single(Tok::Plus),
            '-' => self.single(Tok::Minus),
            '/' => self.single(Tok::Slash),
            '=' => self.single(Tok::Eq),
            '.' => {
                if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    self.number()
                } else {
                    self.single(Tok::Dot)
                }
            }
            '!' => {
                self.advance();
                if self.peek() == Some('=') {
                    self.advance();
                    Ok(Tok::Ne)
                } else {
                    Ok(Tok::Bang)
                }
            }
            '>' => {
                self.advance();
                if self.peek() == Some('=') {
                    self.advance();
                    Ok(Tok::Ge)
                } else {
                    Ok(Tok::Gt)
                }
            }
            '<' => self.iri_or_less_than(),
            '&' => {
                self.advance();
                if self.peek() == Some('&') {
                    self.advance();
                    Ok(Tok::AndAnd)
                } else {
                    Err(self.error("expected `&&`"))
                }
            }
            '|' => {
                self.advance();
                if self.peek() == Some('|') {
                    self.advance();
                    Ok(Tok::OrOr)
                } else {
                    Err(self.error("expected `||`"))
                }
            }
            '^' => {
                self.advance();
                if self.peek() == Some('^') {
                    self.advance();
                    Ok(Tok::HatHat)
                } else {
                    Err(self.error("expected `^^`"))
                }
            }
            '?' | '$' => {
                self.advance();
                let name = self.word();
                if name.is_empty() {
                    Err(self.error("expected variable name"))
                } else {
                    Ok(Tok::Var(name))
                }
            }
            '"' => self.string(),
            '@' => {
                self.advance();
                let word = self.word();
                if word.eq_ignore_ascii_case("prefix") || word.eq_ignore_ascii_case("base") {
                    Ok(Tok::AtKeyword(word.to_ascii_lowercase()))
                } else {
                    Err(self.error("language tag is only valid after a string literal"))
                }
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.advance();
                self.advance();
                let label = self.word();
                if label.is_empty() {
                    Err(self.error("expected blank node label"))
                } else {
                    Ok(Tok::BlankLabel(label))
                }
            }
            ':' => {
                self.advance();
                Ok(Tok::PName { prefix: String::new(), local: self.pname_local() })
            }
            c if c.is_ascii_digit() => self.number(),
            c if c.is_alphabetic() || c == '_' => self.ident_or_pname(),
            other => Err(self.error(format!("unexpected character `{}`", other))),
        }
    }

    fn single(&mut self, tok: Tok) -> Result<Tok, LexError> {
        self.advance();
        Ok(tok)
    }

    /// `[A-Za-z0-9_]+`, possibly empty.
    fn word(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                out.push(c);
                self.advance();
            } else {
                break;
            }
        }
        out
    }

    /// Local part of a prefixed name: word characters, `-`, and interior
    /// dots. A trailing dot always terminates the statement instead.
    fn pname_local(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let interior_dot = c == '.'
                && !out.is_empty()
                && self
                    .peek_at(1)
                    .is_some_and(|n| n.is_alphanumeric() || n == '_' || n == '-');
            if c.is_alphanumeric() || c == '_' || c == '-' || interior_dot {
                out.push(c);
                self.advance();
            } else {
                break;
            }
        }
        out
    }

    fn ident_or_pname(&mut self) -> Result<Tok, LexError> {
        let word = self.word();
        if self.peek() == Some(':') {
            self.advance();
            Ok(Tok::PName { prefix: word, local: self.pname_local() })
        } else {
            Ok(Tok::Ident(word))
        }
    }

    fn number(&mut self) -> Result<Tok, LexError> {
        let mut text = String::new();
        let mut has_dot = false;
        let mut has_exp = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.advance();
            } else if c == '.' && !has_dot && !has_exp {
                // A dot is part of the number only when a digit follows;
                // otherwise it is the triple terminator (`121 .` vs `121.5`).
                if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    has_dot = true;
                    text.push(c);
                    self.advance();
                } else {
                    break;
                }
            } else if (c == 'e' || c == 'E') && !has_exp {
                let mut lookahead = 1;
                if matches!(self.peek_at(1), Some('+') | Some('-')) {
                    lookahead = 2;
                }
                if self.peek_at(lookahead).is_some_and(|d| d.is_ascii_digit()) {
                    has_exp = true;
                    text.push(c);
                    self.advance();
                    if let Some(sign @ ('+' | '-')) = self.peek() {
                        text.push(sign);
                        self.advance();
                    }
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        if has_exp {
            Ok(Tok::Double(text))
        } else if has_dot {
            Ok(Tok::Decimal(text))
        } else {
            Ok(Tok::Integer(text))
        }
    }

    fn string(&mut self) -> Result<Tok, LexError> {
        self.advance(); // opening quote
        let mut value = String::new();
        loop {
            match self.advance() {
                None => return Err(self.error("unterminated string literal")),
                Some('"') => break,
                Some('\\') => match self.advance() {
                    Some('t') => value.push('\t'),
                    Some('n') => value.push('\n'),
                    Some('r') => value.push('\r'),
                    Some('b') => value.push('\u{8}'),
                    Some('f') => value.push('\u{c}'),
                    Some('"') => value.push('"'),
                    Some('\'') => value.push('\''),
                    Some('\\') => value.push('\\'),
                    Some('u') => value.push(self.unicode_escape(4)?),
                    Some('U') => value.push(self.unicode_escape(8)?),
                    _ => return Err(self.error("invalid escape sequence")),
                },
                Some('\n') => return Err(self.error("newline inside string literal")),
                Some(c) => value.push(c),
            }
        }
        let lang = if self.peek() == Some('@') {
            self.advance();
            let mut tag = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    tag.push(c);
                    self.advance();
                } else {
                    break;
                }
            }
            if tag.is_empty() {
                return Err(self.error("empty language tag"));
            }
            Some(tag)
        } else {
            None
        };
        Ok(Tok::Str { value, lang })
    }

    fn unicode_escape(&mut self, digits: usize) -> Result<char, LexError> {
        let mut code = 0u32;
        for _ in 0..digits {
            let c = self.advance().ok_or_else(|| self.error("truncated \\u escape"))?;
            code = code * 16
                + c.to_digit(16).ok_or_else(|| self.error("invalid \\u escape"))?;
        }
        char::from_u32(code).ok_or_else(|| self.error("invalid unicode code point"))
    }

    /// `<` opens an IRI iff `>` arrives before any character that IRIREF
    /// forbids; otherwise it is the comparison operator.
    fn iri_or_less_than(&mut self) -> Result<Tok, LexError> {
        let mut end = None;
        for (offset, &c) in self.chars[self.pos + 1..].iter().enumerate() {
            if c == '>' {
                end = Some(offset);
                break;
            }
            if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
                break;
            }
        }
        match end {
            Some(len) => {
                self.advance(); // <
                let mut iri = String::with_capacity(len);
                for _ in 0..len {
                    iri.push(self.advance().unwrap());
                }
                self.advance(); // >
                Ok(Tok::Iri(iri))
            }
            None => {
                self.advance();
                if self.peek() == Some('=') {
                    self.advance();
                    Ok(Tok::Le)
                } else {
                    Ok(Tok::Lt)
                }
            }
        }
    }
}
