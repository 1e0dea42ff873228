//! Turtle subset reader: prefix directives, triple statements with `;`/`,`
//! lists, typed/plain/language-tagged literals, numeric and boolean
//! shorthand, the `a` keyword, and blank node labels.

use std::collections::HashMap;

use thiserror::Error;

use crate::lexer::{lex, Tok, Token};

use super::{xsd, Dataset, Term, Triple};

#[derive(Clone, Debug, Error, PartialEq)]
#[error("turtle syntax error at {line}:{col}: {msg}")]
pub struct TurtleError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

/// Prefix used when a document references the empty prefix `:` without
/// declaring it. Keeps hand-written sample data terse.
pub(crate) const DEFAULT_PREFIX: &str = "http://example.org/movies#";

pub fn load_turtle(text: &str) -> Result<Dataset, TurtleError> {
    let tokens = lex(text).map_err(|e| TurtleError { line: e.line, col: e.col, msg: e.msg })?;
    Parser {
        tokens,
        pos: 0,
        dataset: Dataset::new(),
        bnode_labels: HashMap::new(),
        bnode_counter: 0,
    }
    .run()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dataset: Dataset,
    /// Source label → fresh label, assigned in first-occurrence order.
    bnode_labels: HashMap<String, String>,
    bnode_counter: usize,
}

impl Parser {
    fn run(mut self) -> Result<Dataset, TurtleError> {
        self.dataset
            .set_prefix(String::new(), DEFAULT_PREFIX.to_string());
        while self.pos < self.tokens.len() {
            if self.directive()? {
                continue;
            }
            self.statement()?;
        }
        Ok(self.dataset)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> TurtleError {
        let (line, col) = self
            .tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        TurtleError { line, col, msg: msg.into() }
    }

    fn expect(&mut self, expected: &Tok, what: &str) -> Result<(), TurtleError> {
        match self.peek() {
            Some(tok) if tok == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.error_here(format!("expected {}, found `{}`", what, tok))),
            None => Err(self.error_here(format!("expected {}, found end of input", what))),
        }
    }

    /// `@prefix p: <iri> .` or SPARQL-style `PREFIX p: <iri>`; returns true
    /// if a directive was consumed. `@base` is not supported.
    fn directive(&mut self) -> Result<bool, TurtleError> {
        let (at_style, is_prefix) = match self.peek() {
            Some(Tok::AtKeyword(word)) => (true, word == "prefix"),
            Some(Tok::Ident(word)) if word.eq_ignore_ascii_case("prefix") => (false, true),
            Some(Tok::Ident(word)) if word.eq_ignore_ascii_case("base") => (false, false),
            _ => return Ok(false),
        };
        if !is_prefix {
            return Err(self.error_here("base directives are not supported"));
        }
        self.pos += 1;
        let prefix = match self.next().map(|t| t.tok) {
            Some(Tok::PName { prefix, local }) if local.is_empty() => prefix,
            _ => return Err(self.error_here("expected prefix name ending in `:`")),
        };
        let iri = match self.next().map(|t| t.tok) {
            Some(Tok::Iri(iri)) => iri,
            _ => return Err(self.error_here("expected IRI in prefix declaration")),
        };
        // Redefinition is allowed, last one wins.
        self.dataset.set_prefix(prefix, iri);
        if at_style {
            self.expect(&Tok::Dot, "`.` after @prefix directive")?;
        }
        Ok(true)
    }

    /// `subject predicate object (',' object)* (';' predicate object...)* '.'`
    fn statement(&mut self) -> Result<(), TurtleError> {
        let subject = self.subject()?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                self.dataset
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            match self.peek() {
                Some(Tok::Semicolon) => {
                    self.pos += 1;
                    // Turtle allows a dangling `;` before the final dot.
                    if self.peek() == Some(&Tok::Dot) {
                        break;
                    }
                }
                _ => break,
            }
        }
        self.expect(&Tok::Dot, "`.` at end of statement")
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> Result<Term, TurtleError> {
        match self.dataset.prefixes().get(prefix) {
            Some(base) => Ok(Term::iri(format!("{}{}", base, local))),
            None => Err(self.error_here(format!("undeclared prefix `{}:`", prefix))),
        }
    }

    fn fresh_bnode(&mut self, source_label: String) -> Term {
        if let Some(label) = self.bnode_labels.get(&source_label) {
            return Term::bnode(label.clone());
        }
        let label = format!("b{}", self.bnode_counter);
        self.bnode_counter += 1;
        self.bnode_labels.insert(source_label, label.clone());
        Term::bnode(label)
    }

    fn subject(&mut self) -> Result<Term, TurtleError> {
        match self.peek().cloned() {
            Some(Tok::Iri(iri)) => {
                self.pos += 1;
                Ok(Term::iri(iri))
            }
            Some(Tok::PName { prefix, local }) => {
                let term = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(term)
            }
            Some(Tok::BlankLabel(label)) => {
                self.pos += 1;
                Ok(self.fresh_bnode(label))
            }
            Some(tok) => Err(self.error_here(format!("expected subject, found `{}`", tok))),
            None => Err(self.error_here("expected subject, found end of input")),
        }
    }

    fn predicate(&mut self) -> Result<Term, TurtleError> {
        match self.peek().cloned() {
            Some(Tok::Ident(word)) if word == "a" => {
                self.pos += 1;
                Ok(Term::iri(super::RDF_TYPE))
            }
            Some(Tok::Iri(iri)) => {
                self.pos += 1;
                Ok(Term::iri(iri))
            }
            Some(Tok::PName { prefix, local }) => {
                let term = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(term)
            }
            Some(tok) => Err(self.error_here(format!("expected predicate, found `{}`", tok))),
            None => Err(self.error_here("expected predicate, found end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let signed = |lexical: String| {
            if negative { format!("-{}", lexical) } else { lexical }
        };
        match self.peek().cloned() {
            Some(Tok::Integer(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(lex), xsd::INTEGER))
            }
            Some(Tok::Decimal(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(lex), xsd::DECIMAL))
            }
            Some(Tok::Double(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(lex), xsd::DOUBLE))
            }
            _ if negative => Err(self.error_here("expected numeric literal after `-`")),
            Some(Tok::Iri(iri)) => {
                self.pos += 1;
                Ok(Term::iri(iri))
            }
            Some(Tok::PName { prefix, local }) => {
                let term = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(term)
            }
            Some(Tok::BlankLabel(label)) => {
                self.pos += 1;
                Ok(self.fresh_bnode(label))
            }
            Some(Tok::Ident(word)) if word == "true" || word == "false" => {
                self.pos += 1;
                Ok(Term::typed(word, xsd::BOOLEAN))
            }
            Some(Tok::Str { value, lang: Some(lang) }) => {
                self.pos += 1;
                Ok(Term::lang_string(value, lang))
            }
            Some(Tok::Str { value, lang: None }) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::HatHat) {
                    return Ok(Term::string(value));
                }
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Iri(iri)) => {
                        self.pos += 1;
                        Ok(Term::typed(value, iri))
                    }
                    Some(Tok::PName { prefix, local }) => {
                        let term = self.resolve_pname(&prefix, &local)?;
                        self.pos += 1;
                        match term {
                            Term::Iri(iri) => Ok(Term::typed(value, iri)),
                            _ => unreachable!("prefixed names resolve to IRIs"),
                        }
                    }
                    _ => Err(self.error_here("expected datatype IRI after `^^`")),
                }
            }
            Some(tok) => Err(self.error_here(format!("expected object, found `{}`", tok))),
            None => Err(self.error_here("expected object, found end of input")),
        }
    }
}
