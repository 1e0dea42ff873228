//! Parser for the preference clause. Reuses the SPARQL parser for
//! everything up to PREFER and for the trailing solution modifiers.

use crate::rdf::Variable;
use crate::sparql::parser::Parser;
use crate::sparql::ParseError;

use super::{PrefQuery, PreferClause, PreferenceExpr};

/// Parses a query that may end in `PREFER L1 TO L2 IF body` followed by
/// ORDER BY, LIMIT and OFFSET. Plain queries parse too, with no clause.
pub fn parse_pref_query(text: &str) -> Result<PrefQuery, ParseError> {
    let mut p = Parser::new(text)?;
    let mut base = p.query_body()?;
    let prefer = if p.peek_keyword("PREFER") {
        if !base.order_by.is_empty() || base.limit.is_some() || base.offset.is_some() {
            return p.syntax("PREFER must come before ORDER BY, LIMIT and OFFSET");
        }
        p.keyword("PREFER");
        let left = var_list(&mut p)?;
        p.expect_keyword("TO")?;
        let right = var_list(&mut p)?;
        p.expect_keyword("IF")?;
        let body = pareto_pref(&mut p)?;
        p.tail_modifiers(&mut base)?;
        Some(PreferClause { left, right, body })
    } else {
        None
    };
    p.expect_eof()?;
    Ok(PrefQuery { base, prefer })
}

// VarList ::= Var | '(' Var+ ')'
fn var_list(p: &mut Parser) -> Result<Vec<Variable>, ParseError> {
    if p.peek_var() {
        return Ok(vec![p.var()?]);
    }
    if !p.eat_lparen() {
        return p.syntax(format!(
            "expected a variable or a parenthesized variable list, found {}",
            p.describe_position()
        ));
    }
    let mut vars = Vec::new();
    while !p.eat_rparen() {
        if !p.peek_var() {
            return p.syntax(format!("expected a variable, found {}", p.describe_position()));
        }
        vars.push(p.var()?);
    }
    if vars.is_empty() {
        return p.syntax("a preference variable list cannot be empty");
    }
    Ok(vars)
}

// ParetoPref ::= PrioritizedPref ('AND' ParetoPref)?   right-associative
fn pareto_pref(p: &mut Parser) -> Result<PreferenceExpr, ParseError> {
    let left = prioritized_pref(p)?;
    if p.keyword("AND") {
        let right = pareto_pref(p)?;
        return Ok(PreferenceExpr::Pareto(Box::new(left), Box::new(right)));
    }
    Ok(left)
}

// PrioritizedPref ::= BasicPref ('PRIOR' 'TO' PrioritizedPref)?
fn prioritized_pref(p: &mut Parser) -> Result<PreferenceExpr, ParseError> {
    let left = basic_pref(p)?;
    if p.keyword("PRIOR") {
        p.expect_keyword("TO")?;
        let right = prioritized_pref(p)?;
        return Ok(PreferenceExpr::Prioritized(Box::new(left), Box::new(right)));
    }
    Ok(left)
}

// BasicPref ::= '(' ParetoPref ')' | SimplePref
//
// An opening parenthesis is ambiguous: it can start a parenthesized
// composition or a bracketted constraint. Try the composition first and
// backtrack; a lone constraint fails that route immediately because a
// constraint leaf must itself start with `(` or a builtin keyword.
fn basic_pref(p: &mut Parser) -> Result<PreferenceExpr, ParseError> {
    if p.peek_lparen() {
        let mark = p.mark();
        p.eat_lparen();
        if let Ok(inner) = pareto_pref(p) {
            if p.eat_rparen() {
                return Ok(inner);
            }
        }
        p.reset(mark);
    }
    Ok(PreferenceExpr::Simple(p.prefer_constraint()?))
}
