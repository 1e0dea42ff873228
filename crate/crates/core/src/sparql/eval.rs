//! Local query evaluation over an in-memory dataset.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::rdf::{Dataset, Mapping, SolutionSeq, Term, Variable};

use super::ast::{Element, GroupPattern, OrderKey, Projection, Query, QueryForm};
use super::expr::{eval_ebv, eval_expression};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unsupported feature: {0}")]
    Unsupported(String),
}

/// Evaluates a SELECT query: pattern matching, then ORDER BY, projection,
/// DISTINCT and LIMIT/OFFSET, in that order.
pub fn eval_select(query: &Query, dataset: &Dataset) -> Result<SolutionSeq, EvalError> {
    reject_aggregation(query)?;
    let mut rows = eval_group(&query.pattern, dataset);
    sort_rows(&mut rows, &query.order_by, dataset);
    let vars: Vec<Variable> = match &query.projection {
        Projection::Star => query.pattern.binding_variables().into_iter().collect(),
        Projection::Vars(vars) => vars.clone(),
    };
    let mut rows: Vec<Mapping> = rows.iter().map(|m| m.project(&vars)).collect();
    if query.distinct {
        let mut seen = HashSet::new();
        rows.retain(|m| seen.insert(m.clone()));
    }
    let rows = slice(rows, query.offset, query.limit);
    Ok(SolutionSeq::new(vars, rows))
}

pub fn eval_ask(query: &Query, dataset: &Dataset) -> Result<bool, EvalError> {
    reject_aggregation(query)?;
    Ok(!eval_group(&query.pattern, dataset).is_empty())
}

/// Convenience entry point dispatching on the query form; ASK yields a
/// single-row or empty sequence with no variables.
pub fn evaluate(query: &Query, dataset: &Dataset) -> Result<SolutionSeq, EvalError> {
    match query.form {
        QueryForm::Select => eval_select(query, dataset),
        QueryForm::Ask => {
            let rows = if eval_ask(query, dataset)? { vec![Mapping::new()] } else { vec![] };
            Ok(SolutionSeq::new(vec![], rows))
        }
    }
}

fn reject_aggregation(query: &Query) -> Result<(), EvalError> {
    if !query.group_by.is_empty() {
        return Err(EvalError::Unsupported("GROUP BY in local evaluation".into()));
    }
    if !query.having.is_empty() {
        return Err(EvalError::Unsupported("HAVING in local evaluation".into()));
    }
    Ok(())
}

/// Evaluates a group pattern to its multiset of solution mappings. Filters
/// apply to the whole group regardless of where they appear in it.
pub(crate) fn eval_group(group: &GroupPattern, dataset: &Dataset) -> Vec<Mapping> {
    let mut rows = vec![Mapping::new()];
    let mut filters: Vec<&super::ast::Expression> = Vec::new();
    for el in &group.elements {
        match el {
            Element::Triple(tp) => {
                let mut next = Vec::new();
                for row in &rows {
                    let matched = dataset.match_pattern(&tp.bind(row));
                    for m in matched.rows {
                        if let Some(merged) = row.merge(&m) {
                            next.push(merged);
                        }
                    }
                }
                rows = next;
            }
            Element::Values(vb) => {
                let mut next = Vec::new();
                for row in &rows {
                    'data: for data_row in &vb.rows {
                        let mut merged = row.clone();
                        for (var, value) in vb.vars.iter().zip(data_row) {
                            if let Some(term) = value {
                                match merged.get(var) {
                                    Some(existing) if existing != term => continue 'data,
                                    Some(_) => {}
                                    None => merged.bind(var.clone(), term.clone()),
                                }
                            }
                        }
                        next.push(merged);
                    }
                }
                rows = next;
            }
            Element::Group(sub) => {
                let sub_rows = eval_group(sub, dataset);
                let mut next = Vec::new();
                for row in &rows {
                    for sub_row in &sub_rows {
                        if let Some(merged) = row.merge(sub_row) {
                            next.push(merged);
                        }
                    }
                }
                rows = next;
            }
            Element::Filter(e) => filters.push(e),
        }
    }
    if !filters.is_empty() {
        rows.retain(|row| {
            filters
                .iter()
                .all(|f| eval_ebv(f, row, dataset) == Ok(true))
        });
    }
    rows
}

fn sort_rows(rows: &mut [Mapping], keys: &[OrderKey], dataset: &Dataset) {
    if keys.is_empty() {
        return;
    }
    rows.sort_by(|a, b| {
        for key in keys {
            // an erroring order expression sorts with unbound
            let left = eval_expression(&key.expr, a, dataset).ok();
            let right = eval_expression(&key.expr, b, dataset).ok();
            let ord = compare_order_values(&left, &right);
            let ord = if key.descending { ord.reverse() } else { ord };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    });
}

fn compare_order_values(a: &Option<Term>, b: &Option<Term>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.order_cmp(y),
    }
}

fn slice(rows: Vec<Mapping>, offset: Option<usize>, limit: Option<usize>) -> Vec<Mapping> {
    let skipped = offset.unwrap_or(0);
    rows.into_iter()
        .skip(skipped)
        .take(limit.unwrap_or(usize::MAX))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Triple, TriplePattern};
    use crate::sparql::ast::{ArithOp, CompareOp, Expression, ValuesBlock};

    fn v(name: &str) -> Variable {
        Variable::new(name)
    }

    fn iri(local: &str) -> Term {
        Term::iri(format!("http://example.org/movies#{}", local))
    }

    fn sample() -> Dataset {
        let mut ds = Dataset::new();
        let films = [
            ("m1", "A New Hope", 121),
            ("m2", "The Empire Strikes Back", 124),
            ("m3", "Return of the Jedi", 130),
        ];
        for (id, title, runtime) in films {
            ds.insert(Triple::new(iri(id), iri("title"), Term::string(title)));
            ds.insert(Triple::new(iri(id), iri("runtime"), Term::integer(runtime)));
        }
        ds.insert(Triple::new(iri("m1"), iri("sequel"), iri("m2")));
        ds.insert(Triple::new(iri("m2"), iri("sequel"), iri("m3")));
        ds
    }

    fn bgp() -> GroupPattern {
        GroupPattern::new(vec![
            Element::Triple(TriplePattern::new(v("s"), iri("title"), v("title"))),
            Element::Triple(TriplePattern::new(v("s"), iri("runtime"), v("runtime"))),
        ])
    }

    fn select(pattern: GroupPattern, vars: &[&str]) -> Query {
        Query {
            form: QueryForm::Select,
            distinct: false,
            projection: Projection::Vars(vars.iter().map(|n| v(n)).collect()),
            pattern,
            group_by: vec![],
            having: vec![],
            order_by: vec![],
            limit: None,
            offset: None,
        }
    }

    #[test]
    fn bgp_join_binds_shared_variables() {
        let q = select(bgp(), &["title", "runtime"]);
        let out = eval_select(&q, &sample()).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.rows.iter().all(|m| m.len() == 2));
    }

    #[test]
    fn filters_drop_rows_and_swallow_errors() {
        let mut pattern = bgp();
        pattern.elements.push(Element::Filter(Expression::Compare(
            CompareOp::Gt,
            Box::new(Expression::Var(v("runtime"))),
            Box::new(Expression::Const(Term::integer(123))),
        )));
        let q = select(pattern, &["title"]);
        assert_eq!(eval_select(&q, &sample()).unwrap().len(), 2);

        // an erroring filter drops every row instead of failing the query
        let mut pattern = bgp();
        pattern.elements.push(Element::Filter(Expression::Compare(
            CompareOp::Gt,
            Box::new(Expression::Arith(
                ArithOp::Div,
                Box::new(Expression::Var(v("runtime"))),
                Box::new(Expression::Const(Term::integer(0))),
            )),
            Box::new(Expression::Const(Term::integer(0))),
        )));
        let q = select(pattern, &["title"]);
        assert_eq!(eval_select(&q, &sample()).unwrap().len(), 0);
    }

    #[test]
    fn values_joins_with_undef_as_wildcard() {
        let mut pattern = bgp();
        pattern.elements.push(Element::Values(ValuesBlock {
            vars: vec![v("title"), v("note")],
            rows: vec![
                vec![Some(Term::string("A New Hope")), Some(Term::string("first"))],
                vec![None, Some(Term::string("any"))],
            ],
        }));
        let q = select(pattern, &["title", "note"]);
        let out = eval_select(&q, &sample()).unwrap();
        // one row matches the constrained entry, all three match UNDEF
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn empty_values_is_the_join_identity() {
        let mut pattern = bgp();
        pattern.elements.push(Element::Values(ValuesBlock {
            vars: vec![],
            rows: vec![vec![]],
        }));
        let q = select(pattern, &["title"]);
        assert_eq!(eval_select(&q, &sample()).unwrap().len(), 3);

        // ... while an empty row set annihilates
        let mut pattern = bgp();
        pattern.elements.push(Element::Values(ValuesBlock { vars: vec![], rows: vec![] }));
        let q = select(pattern, &["title"]);
        assert_eq!(eval_select(&q, &sample()).unwrap().len(), 0);
    }

    #[test]
    fn exists_substitutes_the_outer_binding() {
        let mut pattern = bgp();
        pattern.elements.push(Element::Filter(Expression::Exists(GroupPattern::new(
            vec![Element::Triple(TriplePattern::new(v("s"), iri("sequel"), v("next")))],
        ))));
        let q = select(pattern, &["title"]);
        let out = eval_select(&q, &sample()).unwrap();
        // m3 has no sequel triple
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn order_project_distinct_slice_pipeline() {
        let mut q = select(bgp(), &["runtime"]);
        q.order_by = vec![OrderKey {
            expr: Expression::Var(v("runtime")),
            descending: true,
        }];
        q.limit = Some(2);
        q.offset = Some(1);
        let out = eval_select(&q, &sample()).unwrap();
        assert_eq!(
            out.rows
                .iter()
                .map(|m| m.get(&v("runtime")).unwrap().clone())
                .collect::<Vec<_>>(),
            vec![Term::integer(124), Term::integer(121)]
        );
    }

    #[test]
    fn distinct_dedupes_after_projection() {
        let mut ds = sample();
        ds.insert(Triple::new(iri("m4"), iri("title"), Term::string("A New Hope")));
        ds.insert(Triple::new(iri("m4"), iri("runtime"), Term::integer(121)));
        let mut q = select(bgp(), &["title", "runtime"]);
        assert_eq!(eval_select(&q, &ds).unwrap().len(), 4);
        q.distinct = true;
        assert_eq!(eval_select(&q, &ds).unwrap().len(), 3);
    }

    #[test]
    fn group_by_is_rejected_locally() {
        let mut q = select(bgp(), &["title"]);
        q.group_by = vec![Expression::Var(v("title"))];
        let err = eval_select(&q, &sample()).unwrap_err();
        assert!(matches!(err, EvalError::Unsupported(msg) if msg.contains("GROUP BY")));
    }

    #[test]
    fn ask_reports_pattern_satisfiability() {
        let q = Query {
            form: QueryForm::Ask,
            ..select(bgp(), &[])
        };
        assert!(eval_ask(&q, &sample()).unwrap());
        assert!(!eval_ask(&q, &Dataset::new()).unwrap());
    }
}
