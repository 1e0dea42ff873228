//! Rewriting a preference query into standard SPARQL.
//!
//! The preferred rows are exactly the rows no other row beats, so the
//! clause turns into `FILTER NOT EXISTS { <pattern copy> FILTER C }`: the
//! pattern copy produces the opposing row under the left variable list,
//! the constraint compares it against the enclosing row, and compositions
//! are unfolded into plain boolean expressions first. The result runs on
//! any SPARQL 1.1 engine.

use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};

use crate::rdf::Variable;
use crate::sparql::{Element, Expression, Projection, Query};
use crate::sprefql::{validate, IllFormedPrefer, PrefQuery, PreferenceExpr};

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteResult {
    pub query: Query,
    /// Variables that had to move out of the way, original to replacement.
    pub fresh: IndexMap<Variable, Variable>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    IllFormed(#[from] IllFormedPrefer),
    #[error("cannot rewrite: the preference applies to grouped solutions, \
             but the inserted filter would run before GROUP BY")]
    GroupBy,
    #[error("cannot rewrite: the preference applies to grouped solutions, \
             but the inserted filter would run before HAVING")]
    Having,
}

/// Reads an expression over the two variable lists in the opposite
/// direction: occurrences of `left[i]` and `right[i]` are exchanged.
pub fn swap_roles(expr: &Expression, left: &[Variable], right: &[Variable]) -> Expression {
    let mut map = HashMap::new();
    for (l, r) in left.iter().zip(right) {
        map.insert(l.clone(), r.clone());
        map.insert(r.clone(), l.clone());
    }
    expr.rename(&map)
}

/// Flattens Pareto and prioritized composition into one boolean constraint
/// over the two variable lists.
pub fn unfold(body: &PreferenceExpr, left: &[Variable], right: &[Variable]) -> Expression {
    match body {
        PreferenceExpr::Simple(e) => e.clone(),
        PreferenceExpr::Pareto(p, q) => {
            let up = unfold(p, left, right);
            let uq = unfold(q, left, right);
            Expression::or(
                Expression::and(up.clone(), Expression::not(swap_roles(&uq, left, right))),
                Expression::and(uq, Expression::not(swap_roles(&up, left, right))),
            )
        }
        PreferenceExpr::Prioritized(p, q) => {
            let up = unfold(p, left, right);
            let uq = unfold(q, left, right);
            Expression::or(
                up.clone(),
                Expression::and(
                    Expression::and(
                        Expression::not(up.clone()),
                        Expression::not(swap_roles(&up, left, right))),
                    uq,
                ),
            )
        }
    }
}

fn fresh_name(origin: &Variable, used: &mut IndexSet<Variable>) -> Variable {
    let mut candidate = Variable::new(format!("{}_tmp", origin.name()));
    let mut n = 1;
    while used.contains(&candidate) {
        n += 1;
        candidate = Variable::new(format!("{}_tmp{}", origin.name(), n));
    }
    used.insert(candidate.clone());
    candidate
}

/// Validates the clause and produces the equivalent plain query. A query
/// without a clause passes through unchanged.
pub fn rewrite(query: &PrefQuery) -> Result<RewriteResult, RewriteError> {
    validate(query)?;
    let prefer = match &query.prefer {
        Some(p) => p,
        None => {
            return Ok(RewriteResult { query: query.base.clone(), fresh: IndexMap::new() })
        }
    };
    if !query.base.group_by.is_empty() {
        return Err(RewriteError::GroupBy);
    }
    if !query.base.having.is_empty() {
        return Err(RewriteError::Having);
    }
    let projection = match &query.base.projection {
        Projection::Vars(vars) => vars.clone(),
        Projection::Star => unreachable!("validation rejects `SELECT *` under PREFER"),
    };

    let unfolded = unfold(&prefer.body, &prefer.left, &prefer.right);

    // Anything visible in the enclosing group is substituted into the NOT
    // EXISTS pattern by the SPARQL semantics, so no variable of the inner
    // copy may reuse such a name (except the deliberate references to the
    // enclosing row). Fresh names must dodge every name in sight.
    let pattern_vars = query.base.pattern.variables();
    let mut outer_scope = pattern_vars.clone();
    outer_scope.extend(projection.iter().cloned());
    let mut used: IndexSet<Variable> = query.base.all_variables();
    used.extend(prefer.left.iter().cloned());
    used.extend(prefer.right.iter().cloned());
    used.extend(unfolded.variables());

    let mut fresh = IndexMap::new();
    let mut inner_map: HashMap<Variable, Variable> = HashMap::new();
    let mut constraint_map: HashMap<Variable, Variable> = HashMap::new();

    // projected positions: the inner copy binds the left-list name, and
    // the constraint's right-list name becomes the enclosing variable
    for (i, projected) in projection.iter().enumerate() {
        let l1 = &prefer.left[i];
        let target = if outer_scope.contains(l1) {
            let f = fresh_name(l1, &mut used);
            fresh.insert(l1.clone(), f.clone());
            f
        } else {
            l1.clone()
        };
        inner_map.insert(projected.clone(), target.clone());
        constraint_map.insert(l1.clone(), target);
        constraint_map.insert(prefer.right[i].clone(), projected.clone());
    }
    // every other variable of the pattern copy is existential
    for v in &pattern_vars {
        if !projection.contains(v) {
            let f = fresh_name(v, &mut used);
            fresh.insert(v.clone(), f.clone());
            inner_map.insert(v.clone(), f);
        }
    }
    // helper variables inside the constraint's own EXISTS patterns move
    // when they would collide with a name bound around them
    let inner_names: IndexSet<Variable> = inner_map.values().cloned().collect();
    for v in unfolded.variables() {
        if constraint_map.contains_key(&v) {
            continue;
        }
        if outer_scope.contains(&v) || inner_names.contains(&v) {
            let f = fresh_name(&v, &mut used);
            fresh.insert(v.clone(), f.clone());
            constraint_map.insert(v, f);
        }
    }

    let mut inner = query.base.pattern.rename(&inner_map);
    inner.elements.push(Element::Filter(unfolded.rename(&constraint_map)));

    let mut rewritten = query.base.clone();
    rewritten.pattern.elements.push(Element::Filter(Expression::NotExists(inner)));
    Ok(RewriteResult { query: rewritten, fresh })
}
