//! Recursive-descent parser for the SPARQL subset.
//!
//! Features outside the subset are detected by name wherever practical so
//! the error says what was attempted (OPTIONAL, UNION, property paths,
//! subqueries, aggregates) instead of pointing at a stray token.

use indexmap::IndexMap;

use crate::lexer::{lex, Tok, Token};
use crate::rdf::{xsd, Term, TermPattern, TriplePattern, Variable, DEFAULT_PREFIX};

use super::ast::{
    ArithOp, CompareOp, Element, Expression, Function, GroupPattern, OrderKey, Projection,
    Query, QueryForm, ValuesBlock,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("unsupported feature at {line}:{col}: {feature}")]
    Unsupported { line: u32, col: u32, feature: String },
}

/// Parses a plain SPARQL query (no preference clause).
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text)?;
    let query = p.query_body()?;
    if p.peek_keyword("PREFER") {
        return p.syntax("PREFER is not plain SPARQL; use the preference query parser");
    }
    p.expect_eof()?;
    Ok(query)
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: IndexMap<String, String>,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, ParseError> {
        let tokens = lex(text).map_err(|e| ParseError::Syntax {
            line: e.line,
            col: e.col,
            msg: e.msg,
        })?;
        Ok(Parser { tokens, pos: 0, prefixes: IndexMap::new() })
    }

    /// Prologue, query header, WHERE clause, GROUP BY/HAVING and trailing
    /// solution modifiers. Stops in front of anything it does not own, so
    /// the preference parser can splice its clause between HAVING and
    /// ORDER BY.
    pub(crate) fn query_body(&mut self) -> Result<Query, ParseError> {
        self.prologue()?;
        let (form, distinct, projection) = self.query_header()?;
        let pattern = self.where_clause()?;
        let (group_by, having) = self.group_having()?;
        let mut query = Query {
            form,
            distinct,
            projection,
            pattern,
            group_by,
            having,
            order_by: vec![],
            limit: None,
            offset: None,
        };
        self.tail_modifiers(&mut query)?;
        Ok(query)
    }

    // ------------------------------------------------------------------
    // token plumbing

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (u32, u32) {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    pub(crate) fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn unsupported<T>(&self, feature: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Unsupported { line, col, feature: feature.into() })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.syntax(format!("expected {}, found `{}`", what, found)),
                None => self.syntax(format!("expected {}, found end of input", what)),
            }
        }
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(w)) => Some(w.as_str()),
            _ => None,
        }
    }

    pub(crate) fn peek_keyword(&self, kw: &str) -> bool {
        self.peek_ident().is_some_and(|w| w.eq_ignore_ascii_case(kw))
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> bool {
        if self.peek_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.keyword(kw) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.syntax(format!("expected `{}`, found `{}`", kw, found)),
                None => self.syntax(format!("expected `{}`, found end of input", kw)),
            }
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.syntax(format!("unexpected `{}` after the end of the query", t)),
        }
    }

    pub(crate) fn var(&mut self) -> Result<Variable, ParseError> {
        match self.peek() {
            Some(Tok::Var(name)) => {
                let v = Variable::new(name.clone());
                self.pos += 1;
                Ok(v)
            }
            Some(t) => self.syntax(format!("expected a variable, found `{}`", t)),
            None => self.syntax("expected a variable, found end of input"),
        }
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> Result<Term, ParseError> {
        match self.prefixes.get(prefix) {
            Some(base) => Ok(Term::iri(format!("{}{}", base, local))),
            None if prefix.is_empty() => Ok(Term::iri(format!("{}{}", DEFAULT_PREFIX, local))),
            None => self.syntax(format!("unknown prefix `{}:`", prefix)),
        }
    }

    // ------------------------------------------------------------------
    // prologue and header

    fn prologue(&mut self) -> Result<(), ParseError> {
        loop {
            if self.peek_keyword("BASE") {
                return self.unsupported("BASE");
            }
            if matches!(self.peek(), Some(Tok::AtKeyword(_))) {
                return self.syntax("`@prefix` is Turtle syntax; queries use `PREFIX`");
            }
            if !self.keyword("PREFIX") {
                return Ok(());
            }
            let prefix = match self.peek() {
                Some(Tok::PName { prefix, local }) if local.is_empty() => prefix.clone(),
                Some(t) => return self.syntax(format!("expected a prefix name, found `{}`", t)),
                None => return self.syntax("expected a prefix name, found end of input"),
            };
            self.pos += 1;
            let iri = match self.peek() {
                Some(Tok::Iri(iri)) => iri.clone(),
                Some(t) => return self.syntax(format!("expected an IRI, found `{}`", t)),
                None => return self.syntax("expected an IRI, found end of input"),
            };
            self.pos += 1;
            self.prefixes.insert(prefix, iri);
        }
    }

    fn query_header(&mut self) -> Result<(QueryForm, bool, Projection), ParseError> {
        if self.keyword("SELECT") {
            let distinct = if self.keyword("DISTINCT") {
                true
            } else if self.peek_keyword("REDUCED") {
                return self.unsupported("REDUCED");
            } else {
                false
            };
            if self.eat(&Tok::Star) {
                return Ok((QueryForm::Select, distinct, Projection::Star));
            }
            let mut vars = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Var(_)) => vars.push(self.var()?),
                    Some(Tok::LParen) => return self.unsupported("SELECT expressions"),
                    _ => break,
                }
            }
            if vars.is_empty() {
                return self.syntax("expected `*` or projection variables after SELECT");
            }
            Ok((QueryForm::Select, distinct, Projection::Vars(vars)))
        } else if self.keyword("ASK") {
            Ok((QueryForm::Ask, false, Projection::Star))
        } else if let Some(w) = self.peek_ident() {
            if w.eq_ignore_ascii_case("CONSTRUCT") || w.eq_ignore_ascii_case("DESCRIBE") {
                let feature = w.to_ascii_uppercase();
                self.unsupported(format!("{} queries", feature))
            } else {
                self.syntax("expected SELECT or ASK")
            }
        } else {
            self.syntax("expected SELECT or ASK")
        }
    }

    fn where_clause(&mut self) -> Result<GroupPattern, ParseError> {
        self.keyword("WHERE");
        self.group_graph_pattern()
    }

    // ------------------------------------------------------------------
    // graph patterns

    pub(crate) fn group_graph_pattern(&mut self) -> Result<GroupPattern, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        loop {
            while self.eat(&Tok::Dot) {}
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(GroupPattern::new(elements));
                }
                None => return self.syntax("unterminated group pattern; expected `}`"),
                Some(Tok::LBrace) => {
                    let sub = self.group_graph_pattern()?;
                    if self.peek_keyword("UNION") {
                        return self.unsupported("UNION");
                    }
                    elements.push(Element::Group(sub));
                }
                Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("FILTER") => {
                    self.pos += 1;
                    elements.push(Element::Filter(self.constraint()?));
                }
                Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("VALUES") => {
                    self.pos += 1;
                    elements.push(Element::Values(self.values_block()?));
                }
                Some(Tok::Ident(w)) if unsupported_in_group(w).is_some() => {
                    let feature = unsupported_in_group(w).unwrap();
                    return self.unsupported(feature);
                }
                _ => self.triples_same_subject(&mut elements)?,
            }
        }
    }

    fn triples_same_subject(&mut self, out: &mut Vec<Element>) -> Result<(), ParseError> {
        let subject = self.subject_pattern()?;
        loop {
            let predicate = self.predicate_pattern()?;
            if matches!(self.peek(), Some(Tok::Slash | Tok::Star | Tok::Plus)) {
                return self.unsupported("property paths");
            }
            loop {
                let object = self.object_pattern()?;
                out.push(Element::Triple(TriplePattern::new(
                    subject.clone(),
                    predicate.clone(),
                    object,
                )));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            if self.eat(&Tok::Semicolon) {
                while self.eat(&Tok::Semicolon) {}
                if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBrace) | None) {
                    break;
                }
                continue;
            }
            break;
        }
        Ok(())
    }

    fn subject_pattern(&mut self) -> Result<TermPattern, ParseError> {
        match self.peek() {
            Some(Tok::Var(_)) => Ok(TermPattern::Var(self.var()?)),
            _ => Ok(TermPattern::Term(self.graph_term()?)),
        }
    }

    fn predicate_pattern(&mut self) -> Result<TermPattern, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Var(_)) => Ok(TermPattern::Var(self.var()?)),
            Some(Tok::Ident(w)) if w == "a" => {
                self.pos += 1;
                Ok(TermPattern::Term(Term::iri(crate::rdf::RDF_TYPE)))
            }
            Some(Tok::Iri(iri)) => {
                self.pos += 1;
                Ok(TermPattern::Term(Term::iri(iri)))
            }
            Some(Tok::PName { prefix, local }) => {
                let term = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(TermPattern::Term(term))
            }
            Some(t) => self.syntax(format!("expected a predicate, found `{}`", t)),
            None => self.syntax("expected a predicate, found end of input"),
        }
    }

    fn object_pattern(&mut self) -> Result<TermPattern, ParseError> {
        match self.peek() {
            Some(Tok::Var(_)) => Ok(TermPattern::Var(self.var()?)),
            _ => Ok(TermPattern::Term(self.graph_term()?)),
        }
    }

    /// A ground RDF term: IRI, prefixed name or literal. Shared between
    /// triple patterns and VALUES rows.
    fn graph_term(&mut self) -> Result<Term, ParseError> {
        let negative = self.eat(&Tok::Minus);
        let signed = |lexical: &str| {
            if negative { format!("-{}", lexical) } else { lexical.to_string() }
        };
        match self.peek().cloned() {
            Some(Tok::Integer(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(&lex), xsd::INTEGER))
            }
            Some(Tok::Decimal(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(&lex), xsd::DECIMAL))
            }
            Some(Tok::Double(lex)) => {
                self.pos += 1;
                Ok(Term::typed(signed(&lex), xsd::DOUBLE))
            }
            _ if negative => self.syntax("expected a numeric literal after `-`"),
            Some(Tok::Iri(iri)) => {
                self.pos += 1;
                Ok(Term::iri(iri))
            }
            Some(Tok::PName { prefix, local }) => {
                let term = self.resolve_pname(&prefix, &local)?;
                self.pos += 1;
                Ok(term)
            }
            Some(Tok::Ident(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(Term::typed(w, xsd::BOOLEAN))
            }
            Some(Tok::Str { value, lang: Some(lang) }) => {
                self.pos += 1;
                Ok(Term::lang_string(value, lang))
            }
            Some(Tok::Str { value, lang: None }) => {
                self.pos += 1;
                if !self.eat(&Tok::HatHat) {
                    return Ok(Term::string(value));
                }
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
                    _ => self.syntax("expected a datatype IRI after `^^`"),
                }
            }
            Some(Tok::BlankLabel(_)) => {
                self.syntax("blank nodes are not supported in query patterns; use a variable")
            }
            Some(t) => self.syntax(format!("expected an RDF term, found `{}`", t)),
            None => self.syntax("expected an RDF term, found end of input"),
        }
    }

    fn values_block(&mut self) -> Result<ValuesBlock, ParseError> {
        if let Some(Tok::Var(_)) = self.peek() {
            let vars = vec![self.var()?];
            self.expect(Tok::LBrace, "`{`")?;
            let mut rows = Vec::new();
            while !self.eat(&Tok::RBrace) {
                if self.peek().is_none() {
                    return self.syntax("unterminated VALUES block");
                }
                rows.push(vec![self.data_value()?]);
            }
            return Ok(ValuesBlock { vars, rows });
        }
        self.expect(Tok::LParen, "`(`")?;
        let mut vars = Vec::new();
        while !self.eat(&Tok::RParen) {
            vars.push(self.var()?);
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut rows = Vec::new();
        while !self.eat(&Tok::RBrace) {
            self.expect(Tok::LParen, "`(` opening a VALUES row")?;
            let mut row = Vec::new();
            while !self.eat(&Tok::RParen) {
                if self.peek().is_none() {
                    return self.syntax("unterminated VALUES row");
                }
                row.push(self.data_value()?);
            }
            if row.len() != vars.len() {
                return self.syntax(format!(
                    "VALUES row has {} entries but {} variables were declared",
                    row.len(),
                    vars.len()
                ));
            }
            rows.push(row);
        }
        Ok(ValuesBlock { vars, rows })
    }

    fn data_value(&mut self) -> Result<Option<Term>, ParseError> {
        if self.keyword("UNDEF") {
            Ok(None)
        } else {
            Ok(Some(self.graph_term()?))
        }
    }

    // ------------------------------------------------------------------
    // expressions

    fn constraint(&mut self) -> Result<Expression, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(_)) => self.builtin_call(),
            _ => self.syntax("expected `(` or a built-in call"),
        }
    }

    pub(crate) fn expression(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.and_expression()?;
        while self.eat(&Tok::OrOr) {
            e = Expression::or(e, self.and_expression()?);
        }
        Ok(e)
    }

    fn and_expression(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.relational_expression()?;
        while self.eat(&Tok::AndAnd) {
            e = Expression::and(e, self.relational_expression()?);
        }
        Ok(e)
    }

    fn relational_expression(&mut self) -> Result<Expression, ParseError> {
        let left = self.additive_expression()?;
        let op = match self.peek() {
            Some(Tok::Eq) => CompareOp::Eq,
            Some(Tok::Ne) => CompareOp::Ne,
            Some(Tok::Lt) => CompareOp::Lt,
            Some(Tok::Le) => CompareOp::Le,
            Some(Tok::Gt) => CompareOp::Gt,
            Some(Tok::Ge) => CompareOp::Ge,
            Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("IN") => {
                return self.unsupported("IN expressions");
            }
            Some(Tok::Ident(w))
                if w.eq_ignore_ascii_case("NOT")
                    && matches!(self.tokens.get(self.pos + 1),
                        Some(Token { tok: Tok::Ident(next), .. }) if next.eq_ignore_ascii_case("IN")) =>
            {
                return self.unsupported("IN expressions");
            }
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.additive_expression()?;
        Ok(Expression::Compare(op, Box::new(left), Box::new(right)))
    }

    fn additive_expression(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.multiplicative_expression()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => ArithOp::Add,
                Some(Tok::Minus) => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expression::Arith(op, Box::new(e), Box::new(self.multiplicative_expression()?));
        }
    }

    fn multiplicative_expression(&mut self) -> Result<Expression, ParseError> {
        let mut e = self.unary_expression()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => ArithOp::Mul,
                Some(Tok::Slash) => ArithOp::Div,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expression::Arith(op, Box::new(e), Box::new(self.unary_expression()?));
        }
    }

    fn unary_expression(&mut self) -> Result<Expression, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Expression::not(self.unary_expression()?));
        }
        if self.eat(&Tok::Minus) {
            let inner = self.unary_expression()?;
            // fold a negated numeric constant into its lexical form so
            // serialization round-trips
            if let Expression::Const(term) = &inner {
                if let Some(negated) = negate_numeric(term) {
                    return Ok(Expression::Const(negated));
                }
            }
            return Ok(Expression::Neg(Box::new(inner)));
        }
        if self.eat(&Tok::Plus) {
            return self.unary_expression();
        }
        self.primary_expression()
    }

    fn primary_expression(&mut self) -> Result<Expression, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Var(_)) => Ok(Expression::Var(self.var()?)),
            Some(Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) | Tok::Str { .. })
            | Some(Tok::Iri(_) | Tok::PName { .. }) => Ok(Expression::Const(self.graph_term()?)),
            Some(Tok::Ident(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(Expression::Const(Term::typed(w, xsd::BOOLEAN)))
            }
            Some(Tok::Ident(_)) => self.builtin_call(),
            Some(t) => self.syntax(format!("expected an expression, found `{}`", t)),
            None => self.syntax("expected an expression, found end of input"),
        }
    }

    fn builtin_call(&mut self) -> Result<Expression, ParseError> {
        let word = match self.peek_ident() {
            Some(w) => w.to_string(),
            None => return self.syntax("expected a built-in call"),
        };
        let upper = word.to_ascii_uppercase();
        match upper.as_str() {
            "EXISTS" => {
                self.pos += 1;
                Ok(Expression::Exists(self.group_graph_pattern()?))
            }
            "NOT" => {
                self.pos += 1;
                self.expect_keyword("EXISTS")?;
                Ok(Expression::NotExists(self.group_graph_pattern()?))
            }
            "REGEX" => {
                self.pos += 1;
                let args = self.call_args(2, 3, "regex")?;
                Ok(Expression::Call(Function::Regex, args))
            }
            "BOUND" => {
                self.pos += 1;
                self.expect(Tok::LParen, "`(`")?;
                let v = self.var()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expression::Call(Function::Bound, vec![Expression::Var(v)]))
            }
            "STR" => {
                self.pos += 1;
                let args = self.call_args(1, 1, "str")?;
                Ok(Expression::Call(Function::Str, args))
            }
            "DATATYPE" => {
                self.pos += 1;
                let args = self.call_args(1, 1, "datatype")?;
                Ok(Expression::Call(Function::Datatype, args))
            }
            "COUNT" | "SUM" | "AVG" | "MIN" | "MAX" | "SAMPLE" | "GROUP_CONCAT" => {
                self.unsupported("aggregates")
            }
            _ => {
                if self.tokens.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LParen) {
                    self.unsupported(format!("function `{}`", word))
                } else {
                    self.syntax(format!("expected an expression, found `{}`", word))
                }
            }
        }
    }

    fn call_args(
        &mut self,
        min: usize,
        max: usize,
        name: &str,
    ) -> Result<Vec<Expression>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expression()?];
        while self.eat(&Tok::Comma) {
            args.push(self.expression()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() < min || args.len() > max {
            return self.syntax(format!(
                "{}() takes {} argument{}, got {}",
                name,
                if min == max { min.to_string() } else { format!("{} to {}", min, max) },
                if max == 1 { "" } else { "s" },
                args.len()
            ));
        }
        Ok(args)
    }

    // ------------------------------------------------------------------
    // solution modifiers

    fn group_having(&mut self) -> Result<(Vec<Expression>, Vec<Expression>), ParseError> {
        let mut group_by = Vec::new();
        if self.keyword("GROUP") {
            self.expect_keyword("BY")?;
            loop {
                match self.peek() {
                    Some(Tok::Var(_)) => group_by.push(Expression::Var(self.var()?)),
                    Some(Tok::LParen) => {
                        self.pos += 1;
                        group_by.push(self.expression()?);
                        self.expect(Tok::RParen, "`)`")?;
                    }
                    _ => break,
                }
            }
            if group_by.is_empty() {
                return self.syntax("expected grouping conditions after GROUP BY");
            }
        }
        let mut having = Vec::new();
        if self.keyword("HAVING") {
            while matches!(self.peek(), Some(Tok::LParen)) {
                self.pos += 1;
                having.push(self.expression()?);
                self.expect(Tok::RParen, "`)`")?;
            }
            if having.is_empty() {
                return self.syntax("expected `(` after HAVING");
            }
        }
        Ok((group_by, having))
    }

    pub(crate) fn tail_modifiers(&mut self, query: &mut Query) -> Result<(), ParseError> {
        if self.keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                match self.peek().cloned() {
                    Some(Tok::Var(_)) => query.order_by.push(OrderKey {
                        expr: Expression::Var(self.var()?),
                        descending: false,
                    }),
                    Some(Tok::LParen) => {
                        self.pos += 1;
                        let expr = self.expression()?;
                        self.expect(Tok::RParen, "`)`")?;
                        query.order_by.push(OrderKey { expr, descending: false });
                    }
                    Some(Tok::Ident(w))
                        if w.eq_ignore_ascii_case("ASC") || w.eq_ignore_ascii_case("DESC") =>
                    {
                        let descending = w.eq_ignore_ascii_case("DESC");
                        self.pos += 1;
                        self.expect(Tok::LParen, "`(`")?;
                        let expr = self.expression()?;
                        self.expect(Tok::RParen, "`)`")?;
                        query.order_by.push(OrderKey { expr, descending });
                    }
                    _ => break,
                }
            }
            if query.order_by.is_empty() {
                return self.syntax("expected ordering keys after ORDER BY");
            }
        }
        loop {
            if self.peek_keyword("LIMIT") {
                if query.limit.is_some() {
                    return self.syntax("duplicate LIMIT");
                }
                self.pos += 1;
                query.limit = Some(self.unsigned_integer("LIMIT")?);
            } else if self.peek_keyword("OFFSET") {
                if query.offset.is_some() {
                    return self.syntax("duplicate OFFSET");
                }
                self.pos += 1;
                query.offset = Some(self.unsigned_integer("OFFSET")?);
            } else {
                return Ok(());
            }
        }
    }

    fn unsigned_integer(&mut self, what: &str) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Integer(lex)) => match lex.parse::<usize>() {
                Ok(n) => {
                    self.pos += 1;
                    Ok(n)
                }
                Err(_) => self.syntax(format!("{} value out of range", what)),
            },
            Some(t) => self.syntax(format!("expected an integer after {}, found `{}`", what, t)),
            None => self.syntax(format!("expected an integer after {}", what)),
        }
    }

    // checkpointing for the one place the grammar needs backtracking
    pub(crate) fn mark(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub(crate) fn eat_lparen(&mut self) -> bool {
        self.eat(&Tok::LParen)
    }

    pub(crate) fn eat_rparen(&mut self) -> bool {
        self.eat(&Tok::RParen)
    }

    pub(crate) fn peek_lparen(&self) -> bool {
        matches!(self.peek(), Some(Tok::LParen))
    }

    pub(crate) fn peek_var(&self) -> bool {
        matches!(self.peek(), Some(Tok::Var(_)))
    }

    pub(crate) fn describe_position(&self) -> String {
        match self.peek() {
            Some(t) => format!("`{}`", t),
            None => "end of input".to_string(),
        }
    }

    pub(crate) fn prefer_constraint(&mut self) -> Result<Expression, ParseError> {
        self.constraint()
    }
}

fn unsupported_in_group(word: &str) -> Option<&'static str> {
    let upper = word.to_ascii_uppercase();
    match upper.as_str() {
        "OPTIONAL" => Some("OPTIONAL"),
        "UNION" => Some("UNION"),
        "MINUS" => Some("MINUS"),
        "GRAPH" => Some("GRAPH"),
        "SERVICE" => Some("SERVICE"),
        "BIND" => Some("BIND"),
        "SELECT" => Some("subqueries"),
        _ => None,
    }
}

fn negate_numeric(term: &Term) -> Option<Term> {
    let lit = term.as_literal()?;
    match lit.datatype.as_str() {
        xsd::INTEGER | xsd::DECIMAL | xsd::DOUBLE => {}
        _ => return None,
    }
    if lit.lexical == "NaN" {
        return None;
    }
    let lexical = match lit.lexical.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{}", lit.lexical),
    };
    Some(Term::typed(lexical, lit.datatype.clone()))
}
