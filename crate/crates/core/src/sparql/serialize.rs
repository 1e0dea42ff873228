//! Query serialization. Output is valid SPARQL in the supported subset and
//! reparses to an equal syntax tree: parentheses are emitted only where
//! precedence demands, numeric and boolean literals print bare only when
//! their lexical form lexes back to the same single token.

use std::fmt;

use crate::lexer::{lex, Tok};
use crate::rdf::{escape_literal, xsd, Term, TermPattern, TriplePattern, RDF_TYPE};

use super::ast::{
    Element, Expression, GroupPattern, OrderKey, Projection, Query, QueryForm, ValuesBlock,
};

pub fn query_to_string(query: &Query) -> String {
    let mut out = String::new();
    write_query_head(query, &mut out);
    write_tail_modifiers(query, &mut out);
    out
}

/// Everything up to and including HAVING. The preference serializer splices
/// its clause between this and the trailing modifiers.
pub(crate) fn write_query_head(query: &Query, out: &mut String) {
    match query.form {
        QueryForm::Select => {
            out.push_str("SELECT ");
            if query.distinct {
                out.push_str("DISTINCT ");
            }
            match &query.projection {
                Projection::Star => out.push('*'),
                Projection::Vars(vars) => {
                    for (i, v) in vars.iter().enumerate() {
                        if i > 0 {
                            out.push(' ');
                        }
                        out.push('?');
                        out.push_str(v.name());
                    }
                }
            }
            out.push_str("\nWHERE ");
        }
        QueryForm::Ask => out.push_str("ASK "),
    }
    write_group(&query.pattern, out, 0);
    if !query.group_by.is_empty() {
        out.push_str("\nGROUP BY");
        for e in &query.group_by {
            out.push(' ');
            match e {
                Expression::Var(v) => {
                    out.push('?');
                    out.push_str(v.name());
                }
                other => {
                    out.push('(');
                    write_expr(other, out, 1);
                    out.push(')');
                }
            }
        }
    }
    if !query.having.is_empty() {
        out.push_str("\nHAVING");
        for e in &query.having {
            out.push_str(" (");
            write_expr(e, out, 1);
            out.push(')');
        }
    }
}

pub(crate) fn write_tail_modifiers(query: &Query, out: &mut String) {
    if !query.order_by.is_empty() {
        out.push_str("\nORDER BY");
        for OrderKey { expr, descending } in &query.order_by {
            out.push(' ');
            match (expr, descending) {
                (Expression::Var(v), false) => {
                    out.push('?');
                    out.push_str(v.name());
                }
                (e, false) => {
                    out.push('(');
                    write_expr(e, out, 1);
                    out.push(')');
                }
                (e, true) => {
                    out.push_str("DESC(");
                    write_expr(e, out, 1);
                    out.push(')');
                }
            }
        }
    }
    if let Some(n) = query.limit {
        out.push_str(&format!("\nLIMIT {}", n));
    }
    if let Some(n) = query.offset {
        out.push_str(&format!("\nOFFSET {}", n));
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

pub(crate) fn write_group(group: &GroupPattern, out: &mut String, level: usize) {
    out.push_str("{\n");
    for el in &group.elements {
        indent(out, level + 1);
        match el {
            Element::Triple(tp) => {
                write_triple(tp, out);
                out.push_str(" .");
            }
            Element::Filter(e) => {
                out.push_str("FILTER ");
                match e {
                    Expression::Exists(g) => {
                        out.push_str("EXISTS ");
                        write_group(g, out, level + 1);
                    }
                    Expression::NotExists(g) => {
                        out.push_str("NOT EXISTS ");
                        write_group(g, out, level + 1);
                    }
                    other => {
                        out.push('(');
                        write_expr(other, out, 1);
                        out.push(')');
                    }
                }
            }
            Element::Values(vb) => write_values(vb, out),
            Element::Group(g) => write_group(g, out, level + 1),
        }
        out.push('\n');
    }
    indent(out, level);
    out.push('}');
}

fn write_triple(tp: &TriplePattern, out: &mut String) {
    write_term_pattern(&tp.subject, out);
    out.push(' ');
    match &tp.predicate {
        TermPattern::Term(Term::Iri(iri)) if iri == RDF_TYPE => out.push('a'),
        p => write_term_pattern(p, out),
    }
    out.push(' ');
    write_term_pattern(&tp.object, out);
}

fn write_term_pattern(p: &TermPattern, out: &mut String) {
    match p {
        TermPattern::Var(v) => {
            out.push('?');
            out.push_str(v.name());
        }
        TermPattern::Term(t) => write_term(t, out),
    }
}

fn write_values(vb: &ValuesBlock, out: &mut String) {
    out.push_str("VALUES (");
    for (i, v) in vb.vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('?');
        out.push_str(v.name());
    }
    out.push_str(") {");
    for row in &vb.rows {
        out.push_str(" (");
        for (i, value) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match value {
                Some(t) => write_term(t, out),
                None => out.push_str("UNDEF"),
            }
        }
        out.push(')');
    }
    out.push_str(" }");
}

/// SPARQL term syntax: numerics and booleans bare when safe, strings
/// quoted, everything else in its typed form.
pub(crate) fn write_term(term: &Term, out: &mut String) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            out.push_str(iri);
            out.push('>');
        }
        Term::BlankNode(label) => {
            out.push_str("_:");
            out.push_str(label);
        }
        Term::Literal(lit) => {
            if let Some(bare) = bare_literal_form(term) {
                out.push_str(&bare);
                return;
            }
            out.push('"');
            out.push_str(&escape_literal(&lit.lexical));
            out.push('"');
            if let Some(lang) = &lit.lang {
                out.push('@');
                out.push_str(lang);
            } else if lit.datatype != xsd::STRING {
                out.push_str("^^<");
                out.push_str(&lit.datatype);
                out.push('>');
            }
        }
    }
}

/// A literal may print without quotes only if its lexical form lexes back
/// to one token of the same kind (optionally behind a unary minus), so the
/// output reparses to the identical term.
fn bare_literal_form(term: &Term) -> Option<String> {
    let lit = term.as_literal()?;
    if lit.lang.is_some() {
        return None;
    }
    if lit.datatype == xsd::BOOLEAN {
        return match lit.lexical.as_str() {
            "true" | "false" => Some(lit.lexical.clone()),
            _ => None,
        };
    }
    let kind_matches = |tok: &Tok, lexical: &str| match (lit.datatype.as_str(), tok) {
        (xsd::INTEGER, Tok::Integer(s))
        | (xsd::DECIMAL, Tok::Decimal(s))
        | (xsd::DOUBLE, Tok::Double(s)) => s == lexical,
        _ => false,
    };
    let tokens = lex(&lit.lexical).ok()?;
    match tokens.as_slice() {
        [t] if kind_matches(&t.tok, &lit.lexical) => Some(lit.lexical.clone()),
        [m, t] if m.tok == Tok::Minus => {
            let rest = lit.lexical.strip_prefix('-')?;
            kind_matches(&t.tok, rest).then(|| lit.lexical.clone())
        }
        _ => None,
    }
}

// Precedence levels: || 1, && 2, comparison 3, additive 4, multiplicative
// 5, unary 6, primary 7. A child is parenthesized when its level is below
// what its position requires.
fn expr_level(e: &Expression) -> u8 {
    match e {
        Expression::Or(..) => 1,
        Expression::And(..) => 2,
        Expression::Compare(..) => 3,
        Expression::Arith(super::ast::ArithOp::Add | super::ast::ArithOp::Sub, ..) => 4,
        Expression::Arith(..) => 5,
        Expression::Not(_) | Expression::Neg(_) => 6,
        Expression::Exists(_)
        | Expression::NotExists(_)
        | Expression::Call(..)
        | Expression::Var(_)
        | Expression::Const(_) => 7,
    }
}

pub(crate) fn write_expr(e: &Expression, out: &mut String, required: u8) {
    let level = expr_level(e);
    let parens = level < required;
    if parens {
        out.push('(');
    }
    match e {
        Expression::Or(a, b) => {
            write_expr(a, out, 1);
            out.push_str(" || ");
            write_expr(b, out, 2);
        }
        Expression::And(a, b) => {
            write_expr(a, out, 2);
            out.push_str(" && ");
            write_expr(b, out, 3);
        }
        Expression::Compare(op, a, b) => {
            write_expr(a, out, 4);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(b, out, 4);
        }
        Expression::Arith(op, a, b) => {
            let (left_req, right_req) = match expr_level(e) {
                4 => (4, 5),
                _ => (5, 6),
            };
            write_expr(a, out, left_req);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(b, out, right_req);
        }
        Expression::Not(inner) => {
            out.push('!');
            write_expr(inner, out, 7);
        }
        Expression::Neg(inner) => {
            out.push('-');
            write_expr(inner, out, 7);
        }
        Expression::Exists(g) => {
            out.push_str("EXISTS ");
            write_group(g, out, 0);
        }
        Expression::NotExists(g) => {
            out.push_str("NOT EXISTS ");
            write_group(g, out, 0);
        }
        Expression::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(a, out, 1);
            }
            out.push(')');
        }
        Expression::Var(v) => {
            out.push('?');
            out.push_str(v.name());
        }
        Expression::Const(t) => write_term(t, out),
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(self, &mut out, 1);
        f.write_str(&out)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&query_to_string(self))
    }
}
