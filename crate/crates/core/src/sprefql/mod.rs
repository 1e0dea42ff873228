//! The PREFER solution modifier: syntax, well-formedness checks and
//! serialization.
//!
//! A preference query is a SELECT query followed by
//! `PREFER L1 TO L2 IF body` between HAVING and ORDER BY. `L1` and `L2`
//! name the two copies of a solution row being compared; the body is a
//! SPARQL constraint over those names, optionally composed with `AND`
//! (Pareto) and `PRIOR TO` (prioritized), where `PRIOR TO` binds tighter.

mod parser;

use indexmap::IndexSet;

use crate::rdf::Variable;
use crate::sparql::serialize::{write_expr, write_group, write_query_head, write_tail_modifiers};
use crate::sparql::{Expression, Projection, Query, QueryForm};

pub use parser::parse_pref_query;

/// A query with an optional preference clause.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefQuery {
    pub base: Query,
    pub prefer: Option<PreferClause>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreferClause {
    pub left: Vec<Variable>,
    pub right: Vec<Variable>,
    pub body: PreferenceExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PreferenceExpr {
    Simple(Expression),
    Pareto(Box<PreferenceExpr>, Box<PreferenceExpr>),
    Prioritized(Box<PreferenceExpr>, Box<PreferenceExpr>),
}

impl PreferenceExpr {
    /// The constraints at the leaves, left to right.
    pub fn constraints(&self) -> Vec<&Expression> {
        let mut out = Vec::new();
        self.collect_constraints(&mut out);
        out
    }

    fn collect_constraints<'a>(&'a self, out: &mut Vec<&'a Expression>) {
        match self {
            PreferenceExpr::Simple(e) => out.push(e),
            PreferenceExpr::Pareto(a, b) | PreferenceExpr::Prioritized(a, b) => {
                a.collect_constraints(out);
                b.collect_constraints(out);
            }
        }
    }

    /// Variables used outside EXISTS bodies; these must all come from the
    /// two preference lists.
    pub fn outer_variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        for c in self.constraints() {
            out.extend(c.outer_variables());
        }
        out
    }

    /// True when no leaf uses EXISTS or NOT EXISTS, so the preference can
    /// be decided from the two rows alone without consulting a dataset.
    pub fn is_intrinsic(&self) -> bool {
        self.constraints().into_iter().all(expression_is_intrinsic)
    }
}

pub(crate) fn expression_is_intrinsic(e: &Expression) -> bool {
    match e {
        Expression::Exists(_) | Expression::NotExists(_) => false,
        Expression::Or(a, b)
        | Expression::And(a, b)
        | Expression::Compare(_, a, b)
        | Expression::Arith(_, a, b) => expression_is_intrinsic(a) && expression_is_intrinsic(b),
        Expression::Not(e) | Expression::Neg(e) => expression_is_intrinsic(e),
        Expression::Call(_, args) => args.iter().all(expression_is_intrinsic),
        Expression::Var(_) | Expression::Const(_) => true,
    }
}

/// Why a preference clause is ill-formed.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IllFormedPrefer {
    #[error("ill-formed PREFER: only SELECT queries can carry a preference")]
    NotSelect,
    #[error("ill-formed PREFER: `SELECT *` hides the projection arity; list the variables")]
    StarProjection,
    #[error(
        "ill-formed PREFER: list arity must match the projection \
         ({projection} projected, {left} on the left, {right} on the right)"
    )]
    ArityMismatch { projection: usize, left: usize, right: usize },
    #[error("ill-formed PREFER: `?{0}` appears twice across the preference lists")]
    DuplicateVariable(Variable),
    #[error("ill-formed PREFER: body variable `?{0}` is not in either preference list")]
    UnboundBodyVariable(Variable),
}

/// Checks the well-formedness conditions: matching arities, pairwise
/// distinct list variables, and a body that only mentions list variables
/// outside of EXISTS patterns.
pub fn validate(query: &PrefQuery) -> Result<(), IllFormedPrefer> {
    let prefer = match &query.prefer {
        Some(p) => p,
        None => return Ok(()),
    };
    if query.base.form != QueryForm::Select {
        return Err(IllFormedPrefer::NotSelect);
    }
    let projection = match &query.base.projection {
        Projection::Star => return Err(IllFormedPrefer::StarProjection),
        Projection::Vars(vars) => vars,
    };
    if prefer.left.len() != projection.len() || prefer.right.len() != projection.len() {
        return Err(IllFormedPrefer::ArityMismatch {
            projection: projection.len(),
            left: prefer.left.len(),
            right: prefer.right.len(),
        });
    }
    let mut seen = IndexSet::new();
    for v in prefer.left.iter().chain(&prefer.right) {
        if !seen.insert(v.clone()) {
            return Err(IllFormedPrefer::DuplicateVariable(v.clone()));
        }
    }
    for v in prefer.body.outer_variables() {
        if !seen.contains(&v) {
            return Err(IllFormedPrefer::UnboundBodyVariable(v));
        }
    }
    Ok(())
}

/// Serializes the query with its PREFER clause in place; output reparses
/// to an equal tree.
pub fn pref_query_to_string(query: &PrefQuery) -> String {
    let mut out = String::new();
    write_query_head(&query.base, &mut out);
    if let Some(prefer) = &query.prefer {
        out.push_str("\nPREFER ");
        write_var_list(&prefer.left, &mut out);
        out.push_str(" TO ");
        write_var_list(&prefer.right, &mut out);
        out.push_str("\nIF ");
        write_pref_body(&prefer.body, &mut out, 1);
    }
    write_tail_modifiers(&query.base, &mut out);
    out
}

fn write_var_list(vars: &[Variable], out: &mut String) {
    if let [single] = vars {
        out.push('?');
        out.push_str(single.name());
        return;
    }
    out.push('(');
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('?');
        out.push_str(v.name());
    }
    out.push(')');
}

// Composition levels: AND 1, PRIOR TO 2, constraint 3. Both composition
// operators are right-associative, so a left child needs parentheses at
// its own level.
fn pref_level(p: &PreferenceExpr) -> u8 {
    match p {
        PreferenceExpr::Pareto(..) => 1,
        PreferenceExpr::Prioritized(..) => 2,
        PreferenceExpr::Simple(_) => 3,
    }
}

fn write_pref_body(p: &PreferenceExpr, out: &mut String, required: u8) {
    let parens = pref_level(p) < required;
    if parens {
        out.push('(');
    }
    match p {
        PreferenceExpr::Simple(e) => match e {
            Expression::Exists(g) => {
                out.push_str("EXISTS ");
                write_group(g, out, 0);
            }
            Expression::NotExists(g) => {
                out.push_str("NOT EXISTS ");
                write_group(g, out, 0);
            }
            other => {
                out.push('(');
                write_expr(other, out, 1);
                out.push(')');
            }
        },
        PreferenceExpr::Pareto(a, b) => {
            write_pref_body(a, out, 2);
            out.push_str(" AND ");
            write_pref_body(b, out, 1);
        }
        PreferenceExpr::Prioritized(a, b) => {
            write_pref_body(a, out, 3);
            out.push_str(" PRIOR TO ");
            write_pref_body(b, out, 2);
        }
    }
    if parens {
        out.push(')');
    }
}

impl std::fmt::Display for PrefQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&pref_query_to_string(self))
    }
}
